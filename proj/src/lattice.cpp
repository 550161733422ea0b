#include "qlab/lattice.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qlab {

double LatticeBasis::det() const {
    if (dim == 1) return b[0];
    return b[0] * b[3] - b[1] * b[2];
}

LatticeBasis LatticeBasis::dual() const {
    if (dim == 1) return LatticeBasis{1, {1.0 / b[0], 0, 0, 1}};
    const double d = det();
    if (std::abs(d) < 1e-300) throw std::invalid_argument("LatticeBasis: singular");
    // B^{-T} for row-major 2x2
    return LatticeBasis{2, {b[3] / d, -b[2] / d, -b[1] / d, b[0] / d}};
}

LatticeBasis LatticeBasis::scaled(double f) const {
    LatticeBasis out = *this;
    for (auto& v : out.b) v *= f;
    return out;
}

std::vector<double> LatticeBasis::vec(const std::vector<i64>& c) const {
    if (dim == 1) return {b[0] * static_cast<double>(c[0])};
    return {b[0] * c[0] + b[1] * c[1], b[2] * c[0] + b[3] * c[1]};
}

std::vector<i64> LatticeBasis::coeffs_of(const std::vector<double>& p) const {
    if (dim == 1) return {round_half_up(p[0] / b[0])};
    const double d = det();
    const double c0 = (b[3] * p[0] - b[1] * p[1]) / d;
    const double c1 = (-b[2] * p[0] + b[0] * p[1]) / d;
    return {round_half_up(c0), round_half_up(c1)};
}

namespace {

template <typename Fn>
void enum_coeffs(int dim, i64 radius, Fn&& fn) {
    if (dim == 1) {
        for (i64 k = -radius; k <= radius; ++k) fn(std::vector<i64>{k});
    } else {
        for (i64 k0 = -radius; k0 <= radius; ++k0)
            for (i64 k1 = -radius; k1 <= radius; ++k1) fn(std::vector<i64>{k0, k1});
    }
}

double norm2(const std::vector<double>& v) {
    double acc = 0;
    for (double x : v) acc += x * x;
    return acc;
}

}  // namespace

double lattice_lambda1(const LatticeBasis& L) {
    double best = 1e300;
    enum_coeffs(L.dim, 8, [&](const std::vector<i64>& c) {
        bool zero = true;
        for (i64 v : c) zero = zero && v == 0;
        if (zero) return;
        best = std::min(best, norm2(L.vec(c)));
    });
    return std::sqrt(best);
}

std::vector<double> lattice_kappa(const LatticeBasis& L, const std::vector<double>& x) {
    auto c0 = L.coeffs_of(x);
    double best = 1e300;
    std::vector<double> best_v;
    enum_coeffs(L.dim, 2, [&](const std::vector<i64>& d) {
        std::vector<i64> c(c0);
        for (int i = 0; i < L.dim; ++i) c[i] += d[i];
        auto v = L.vec(c);
        std::vector<double> diff(v);
        for (int i = 0; i < L.dim; ++i) diff[i] -= x[i];
        const double n = norm2(diff);
        if (n < best - 1e-15) {
            best = n;
            best_v = v;
        }
    });
    return best_v;
}

double dist_to_lattice(const LatticeBasis& L, const std::vector<double>& x) {
    auto k = lattice_kappa(L, x);
    double acc = 0;
    for (int i = 0; i < L.dim; ++i) acc += (x[i] - k[i]) * (x[i] - k[i]);
    return std::sqrt(acc);
}

double dual_rho_tail(const LatticeBasis& L, double s) {
    const LatticeBasis D = L.dual();
    const double width = 1.0 / s;
    // enumerate dual points within the 1e-16 truncation radius
    const double lam = lattice_lambda1(D);
    const i64 radius = std::max<i64>(2, static_cast<i64>(std::ceil(3.5 * width / lam)) + 2);
    double acc = 0;
    enum_coeffs(D.dim, radius, [&](const std::vector<i64>& c) {
        bool zero = true;
        for (i64 v : c) zero = zero && v == 0;
        if (zero) return;
        const double n2 = norm2(D.vec(c));
        acc += std::exp(-std::numbers::pi * n2 / (width * width));
    });
    return acc;
}

double eta_eps(const LatticeBasis& L, double eps) {
    double lo = 1e-6, hi = 1e6;
    if (dual_rho_tail(L, hi) > eps) throw std::runtime_error("eta_eps: bracket too small");
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (dual_rho_tail(L, mid) <= eps)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace qlab
