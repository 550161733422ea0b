#include "qlab/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace qlab {

namespace {

// Lower regularized incomplete gamma by series; valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double sum = 1.0 / a, term = sum, ap = a;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma by continued fraction; valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a, c = 1e308, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
    if (x < 0 || a <= 0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                               const std::vector<double>& expected, double min_expected) {
    if (observed.size() != expected.size() || observed.empty())
        throw std::invalid_argument("chi_square_gof: size mismatch");
    // Pool low-expectation bins left to right.
    std::vector<double> obs, exp;
    double o_acc = 0, e_acc = 0;
    for (size_t i = 0; i < observed.size(); ++i) {
        o_acc += observed[i];
        e_acc += expected[i];
        if (e_acc >= min_expected) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
            o_acc = e_acc = 0;
        }
    }
    if (e_acc > 0 && !exp.empty()) {
        obs.back() += o_acc;
        exp.back() += e_acc;
    } else if (e_acc > 0) {
        obs.push_back(o_acc);
        exp.push_back(e_acc);
    }
    if (exp.size() < 2) return ChiSquareResult{0.0, 0, 1.0};
    double stat = 0;
    for (size_t i = 0; i < exp.size(); ++i) {
        const double d = obs[i] - exp[i];
        stat += d * d / exp[i];
    }
    const int dof = static_cast<int>(exp.size()) - 1;
    return ChiSquareResult{stat, dof, gamma_q(dof / 2.0, stat / 2.0)};
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw std::invalid_argument("total_variation: size mismatch");
    double acc = 0;
    for (size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
    return acc / 2.0;
}

}  // namespace qlab
