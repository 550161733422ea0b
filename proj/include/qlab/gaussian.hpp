#pragma once

#include <vector>

#include "qlab/grid.hpp"
#include "qlab/rng.hpp"
#include "qlab/zq.hpp"

namespace qlab {

struct GaussianParam {
    double width;   // the s (or sigma) parameter
    double center = 0;

    GaussianParam(double w, double c = 0) : width(w), center(c) {
        if (w <= 0) throw std::invalid_argument("GaussianParam: width must be positive");
    }
};

// rho_{width,center}(x) = exp(-pi (x-center)^2 / width^2)
double rho(const GaussianParam& p, double x);
double rho(double width, double x);

// Symmetric positive definite covariance-style matrix for rho_{sqrt(Sigma)}.
struct CovarianceSpec {
    int dimension;
    std::vector<double> sigma;  // row-major dimension x dimension

    CovarianceSpec(int dim, std::vector<double> mat);
    // Solve Sigma y = x via the cached Cholesky factor.
    std::vector<double> solve(const std::vector<double>& x) const;

  private:
    std::vector<double> chol_;  // lower-triangular factor
};

// rho_{sqrt(Sigma)}(x) = exp(-pi x^T Sigma^{-1} x)
double rho_cov(const CovarianceSpec& cov, const std::vector<double>& x);

// Support radius of the project-wide truncation rule: keep points where
// rho >= 1e-16 * peak, i.e. |x - center| <= width * sqrt(16 ln 10 / pi).
double truncation_radius(double width);

// Exact normalized table over a grid; used for inversion sampling and for
// closeness bookkeeping (discarded l2 mass is recorded by the callers that
// truncate).
class DiscreteGaussianTable {
  public:
    // probability proportional to rho (paper's D) or rho^2 (Born weights).
    enum class Weight { Rho, RhoSquared };

    DiscreteGaussianTable(const CosetGrid& grid, const GaussianParam& param,
                          Weight weight = Weight::Rho);

    double probability(i64 index) const { return prob_[index]; }
    i64 size() const { return static_cast<i64>(prob_.size()); }
    const CosetGrid& grid() const { return grid_; }

    // Inversion sampling; deterministic given the rng stream.
    i64 sample_index(Rng& rng) const;
    double sample_value(Rng& rng) const { return grid_.value(sample_index(rng)); }

  private:
    CosetGrid grid_;
    std::vector<double> prob_;
    std::vector<double> cdf_;
};

// Convenience: D_{Z+0, width} truncated at the 1e-16 rule around `center`,
// with the precondition halfwidth >= width * sqrt(64 / 2pi) enforced.
DiscreteGaussianTable discrete_gaussian_over_grid(const CosetGrid& grid, const GaussianParam& p,
                                                  DiscreteGaussianTable::Weight weight =
                                                      DiscreteGaussianTable::Weight::Rho);

}  // namespace qlab
