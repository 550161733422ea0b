#include "qlab/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qlab {

namespace {
constexpr double kPi = std::numbers::pi;
}

double rho(const GaussianParam& p, double x) {
    const double d = (x - p.center) / p.width;
    return std::exp(-kPi * d * d);
}

double rho(double width, double x) { return rho(GaussianParam(width), x); }

CovarianceSpec::CovarianceSpec(int dim, std::vector<double> mat) : dimension(dim), sigma(std::move(mat)) {
    if (dim < 1 || static_cast<int>(sigma.size()) != dim * dim)
        throw std::invalid_argument("CovarianceSpec: bad shape");
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
            if (std::abs(sigma[i * dim + j] - sigma[j * dim + i]) > 1e-12)
                throw std::invalid_argument("CovarianceSpec: matrix not symmetric");
    // Cholesky; failure of a pivot above tolerance means not positive definite.
    chol_.assign(sigma.begin(), sigma.end());
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = chol_[i * dim + j];
            for (int k = 0; k < j; ++k) sum -= chol_[i * dim + k] * chol_[j * dim + k];
            if (i == j) {
                if (sum <= 1e-10) throw std::invalid_argument("CovarianceSpec: not positive definite");
                chol_[i * dim + j] = std::sqrt(sum);
            } else {
                chol_[i * dim + j] = sum / chol_[j * dim + j];
            }
        }
        for (int j = i + 1; j < dim; ++j) chol_[i * dim + j] = 0.0;
    }
}

std::vector<double> CovarianceSpec::solve(const std::vector<double>& x) const {
    const int n = dimension;
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
        double sum = x[i];
        for (int k = 0; k < i; ++k) sum -= chol_[i * n + k] * y[k];
        y[i] = sum / chol_[i * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double sum = y[i];
        for (int k = i + 1; k < n; ++k) sum -= chol_[k * n + i] * y[k];
        y[i] = sum / chol_[i * n + i];
    }
    return y;
}

double rho_cov(const CovarianceSpec& cov, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != cov.dimension)
        throw std::invalid_argument("rho_cov: dimension mismatch");
    auto y = cov.solve(x);
    double quad = 0;
    for (int i = 0; i < cov.dimension; ++i) quad += x[i] * y[i];
    return std::exp(-kPi * quad);
}

double truncation_radius(double width) {
    // rho(x)/rho(0) = 1e-16  at  |x| = width * sqrt(16 ln 10 / pi)
    static const double factor = std::sqrt(16.0 * std::log(10.0) / kPi);
    return width * factor;
}

DiscreteGaussianTable::DiscreteGaussianTable(const CosetGrid& grid, const GaussianParam& param,
                                             Weight weight)
    : grid_(grid) {
    const i64 n = grid.size();
    if (n <= 0) throw std::invalid_argument("DiscreteGaussianTable: empty grid");
    prob_.resize(n);
    double total = 0;
    for (i64 i = 0; i < n; ++i) {
        double v = rho(param, grid.value(i));
        if (weight == Weight::RhoSquared) v *= v;
        prob_[i] = v;
        total += v;
    }
    if (total <= 0) throw std::invalid_argument("DiscreteGaussianTable: zero mass on grid");
    cdf_.resize(n);
    double acc = 0;
    for (i64 i = 0; i < n; ++i) {
        prob_[i] /= total;
        acc += prob_[i];
        cdf_[i] = acc;
    }
    cdf_.back() = 1.0;
}

i64 DiscreteGaussianTable::sample_index(Rng& rng) const {
    const double u = rng.u01();
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<i64>(it - cdf_.begin());
}

DiscreteGaussianTable discrete_gaussian_over_grid(const CosetGrid& grid, const GaussianParam& p,
                                                  DiscreteGaussianTable::Weight weight) {
    // Guard: the grid must reach far enough that the discarded mass is < 1e-12.
    const double needed = p.width * std::sqrt(64.0 / (2.0 * kPi));
    const double lo = grid.value(0), hi = grid.value(grid.size() - 1);
    if (p.center - lo < needed || hi - p.center < needed)
        throw std::invalid_argument("discrete_gaussian_over_grid: grid too narrow for width");
    return DiscreteGaussianTable(grid, p, weight);
}

}  // namespace qlab
