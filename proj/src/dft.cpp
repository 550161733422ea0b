#include "qlab/dft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qlab {

double AmplitudeTable::l2_norm() const {
    double s = 0;
    for (const auto& v : values) s += std::norm(v);
    return std::sqrt(s);
}

void AmplitudeTable::l2_normalize() {
    const double n = l2_norm();
    if (n <= 0) throw std::invalid_argument("AmplitudeTable: zero norm");
    for (auto& v : values) v /= n;
}

std::vector<cplx> dft_amplitude(const AmplitudeTable& f, const Modulus& q) {
    if (f.values.empty()) throw std::invalid_argument("dft_amplitude: empty support");
    if (std::abs(f.grid.step - 1.0) > 1e-12)
        throw std::invalid_argument("dft_amplitude: grid step must be 1");
    const i64 Q = q.q;
    std::vector<cplx> g(Q);
    const double two_pi_over_q = 2.0 * std::numbers::pi / static_cast<double>(Q);
    for (i64 j = 0; j < Q; ++j) {
        cplx acc = 0;
        for (i64 i = 0; i < f.grid.size(); ++i) {
            const double e = f.grid.value(i);
            const double ang = two_pi_over_q * static_cast<double>(j) * e;
            acc += f.values[i] * cplx(std::cos(ang), std::sin(ang));
        }
        g[j] = acc / std::sqrt(static_cast<double>(Q));
    }
    return g;
}

std::vector<cplx> fold_mod_q(const AmplitudeTable& f, i64 q) {
    std::vector<cplx> out(q, cplx(0, 0));
    for (i64 i = 0; i < f.grid.size(); ++i) {
        const i64 e = static_cast<i64>(std::llround(f.grid.value(i)));
        out[((e % q) + q) % q] += f.values[i];
    }
    return out;
}

}  // namespace qlab
