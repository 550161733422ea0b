#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qlab/gaussian.hpp"
#include "qlab/stats.hpp"

using namespace qlab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("rho point values") {
    CHECK(rho(GaussianParam(2, 0), 0.0) == doctest::Approx(1.0));
    CHECK(rho(GaussianParam(2, 0), 2.0) == doctest::Approx(std::exp(-kPi)));
    CHECK(rho(GaussianParam(2, 3), 3.0) == doctest::Approx(1.0));
}

TEST_CASE("rho_cov examples") {
    CovarianceSpec id2(2, {1, 0, 0, 1});
    CHECK(rho_cov(id2, {0, 0}) == doctest::Approx(1.0));
    // scalar reduction: Sigma = s^2 I_1
    const double s = 3.0;
    CovarianceSpec sc(1, {s * s});
    CHECK(rho_cov(sc, {1.7}) == doctest::Approx(rho(GaussianParam(s), 1.7)));
    // Sigma = I + (alpha^2 / beta^2 q^2) e e^T with alpha=4, beta q=8, e=(1,0):
    // hand-checkable 2x2 inverse gives x^T Sigma^{-1} x = 0.8 + 1 at x=(1,1).
    CovarianceSpec cov(2, {1.25, 0, 0, 1});
    CHECK(rho_cov(cov, {1, 1}) == doctest::Approx(std::exp(-kPi * 1.8)).epsilon(1e-12));
    CHECK(rho_cov(cov, {1, 1}) == doctest::Approx(0.003500439396667).epsilon(1e-9));
}

TEST_CASE("non positive definite covariance rejected") {
    CHECK_THROWS(CovarianceSpec(2, {1, 2, 2, 1}));
    CHECK_THROWS(CovarianceSpec(2, {1, 0, 1, 1}));  // asymmetric
}

TEST_CASE("discrete gaussian sampling matches the exact table") {
    // grid = Z, width 3, center 0; empirical frequencies over 10^6 draws.
    CosetGrid grid = CosetGrid::integers_about(0, 40);
    DiscreteGaussianTable table(grid, GaussianParam(3.0));
    Rng rng(123);
    const int draws = 1000000;
    std::vector<double> counts(grid.size(), 0.0), expected(grid.size(), 0.0);
    for (int i = 0; i < draws; ++i) counts[table.sample_index(rng)] += 1.0;
    for (i64 i = 0; i < grid.size(); ++i) expected[i] = table.probability(i) * draws;
    const auto chi = chi_square_gof(counts, expected);
    CHECK(chi.p_value > 0.01);
}

TEST_CASE("coset grids keep their support") {
    // 2Z + 1 (odd integers): step 2, offset 1
    CosetGrid odd = CosetGrid::truncated(2.0, 1.0, 15.0);
    DiscreteGaussianTable table(odd, GaussianParam(3.0));
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        const double v = table.sample_value(rng);
        const i64 iv = static_cast<i64>(std::llround(v));
        CHECK(std::abs(v - iv) < 1e-12);
        CHECK(((iv % 2) + 2) % 2 == 1);
    }
}

TEST_CASE("tiny width concentrates on the nearest grid point") {
    CosetGrid grid = CosetGrid::integers_about(0, 10);
    DiscreteGaussianTable table(grid, GaussianParam(1e-3, 4.0));
    Rng rng(9);
    for (int i = 0; i < 100; ++i) CHECK(table.sample_value(rng) == doctest::Approx(4.0));
}

TEST_CASE("fractional_mod grid matches Z_{qR}/R") {
    CosetGrid g = CosetGrid::fractional_mod(97, 16);
    CHECK(g.size() == 97 * 16);
    CHECK(g.value(g.size() - 1) == doctest::Approx(97.0 / 2.0));
    CHECK(g.value(0) == doctest::Approx(-97.0 / 2.0 + 1.0 / 16.0));
}

TEST_CASE("poisson summation identity on scaled grids") {
    // sum_{x in sZ} rho_r(x + c) = (r/s) sum_{y in (1/s)Z} rho_{1/r}(y) cos(2 pi c y)
    for (double s : {1.0, 2.0}) {
        for (double r : {2.5, 4.0}) {
            for (double c : {0.0, 0.3, 1.7}) {
                double lhs = 0;
                const i64 n = static_cast<i64>(std::ceil(truncation_radius(r) / s)) + 4;
                for (i64 k = -n; k <= n; ++k) lhs += rho(GaussianParam(r), s * k + c);
                double rhs = 0;
                const i64 nd = static_cast<i64>(std::ceil(truncation_radius(1.0 / r) * s)) + 4;
                for (i64 k = -nd; k <= nd; ++k) {
                    const double y = k / s;
                    rhs += rho(GaussianParam(1.0 / r), y) * std::cos(2.0 * kPi * c * y);
                }
                rhs *= r / s;
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("banaszczyk tail trend on Z^n") {
    // mass of rho_r outside radius r sqrt(n) t is below (t sqrt(2 pi e) e^{-pi t^2})^n rho_r(Z^n)
    const double r = 2.0;
    for (int n = 1; n <= 4; ++n) {
        for (double t : {1.0, 1.5, 2.0}) {
            const i64 hw = static_cast<i64>(std::ceil(r * std::sqrt(n) * (t + 3.0)));
            double total = 0, outside = 0;
            std::vector<i64> x(n, -hw);
            // odometer enumeration
            while (true) {
                double n2 = 0;
                for (int i = 0; i < n; ++i) n2 += static_cast<double>(x[i]) * x[i];
                const double w = std::exp(-kPi * n2 / (r * r));
                total += w;
                if (n2 > r * r * n * t * t) outside += w;
                int pos = n - 1;
                while (pos >= 0 && x[pos] == hw) x[pos--] = -hw;
                if (pos < 0) break;
                ++x[pos];
            }
            const double bound = std::pow(t * std::sqrt(2.0 * kPi * std::exp(1.0)) *
                                              std::exp(-kPi * t * t),
                                          n) *
                                 total;
            CHECK(outside < bound);
        }
    }
}

TEST_CASE("truncation radius hits the 1e-16 rule") {
    const double r = 7.0;
    const double R = truncation_radius(r);
    CHECK(rho(GaussianParam(r), R) == doctest::Approx(1e-16).epsilon(1e-6));
}
