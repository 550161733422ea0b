#include "qlab/qsim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qlab/kernels.hpp"

namespace qlab {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<cplx> qft_matrix(i64 q, int sign) {
    std::vector<cplx> M(q * q);
    const double w = 2.0 * kPi / static_cast<double>(q) * sign;
    for (i64 y = 0; y < q; ++y)
        for (i64 x = 0; x < q; ++x) {
            const double ang = w * static_cast<double>((x * y) % q);
            M[y * q + x] = cplx(std::cos(ang), std::sin(ang)) / std::sqrt(static_cast<double>(q));
        }
    return M;
}

PureState apply_matrix(const PureState& state, int reg, const std::vector<cplx>& M) {
    const auto& shape = state.shape();
    const i64 q = shape.registers[reg].size();
    const i64 outer = shape.outer(reg);
    const i64 stride = shape.stride(reg);
    std::vector<cplx> out(state.dimension());
    kernels::apply_register_matrix(state.amplitudes().data(), out.data(), M.data(), q, outer, stride);
    return PureState(shape, std::move(out), state.truncation_loss());
}

void check_reg(const PureState& state, int reg) {
    if (reg < 0 || reg >= state.shape().num_registers())
        throw std::invalid_argument("register index out of range");
}

}  // namespace

PureState qft(const PureState& state, int reg) {
    check_reg(state, reg);
    const auto& r = state.shape().registers[reg];
    if (r.kind != Register::Kind::Cyclic) throw std::invalid_argument("qft: register not cyclic");
    return apply_matrix(state, reg, qft_matrix(r.q, +1));
}

PureState qft_inverse(const PureState& state, int reg) {
    check_reg(state, reg);
    const auto& r = state.shape().registers[reg];
    if (r.kind != Register::Kind::Cyclic) throw std::invalid_argument("qft: register not cyclic");
    return apply_matrix(state, reg, qft_matrix(r.q, -1));
}

cplx overlap(const PureState& phi, const PureState& psi) {
    if (!phi.shape().same_as(psi.shape())) throw std::invalid_argument("overlap: shape mismatch");
    return kernels::inner_product(phi.amplitudes().data(), psi.amplitudes().data(), phi.dimension());
}

double trace_distance_pure(const PureState& phi, const PureState& psi) {
    // Squared norms keep identical states at distance exactly 0.
    const double np2 = kernels::norm_squared(phi.amplitudes().data(), phi.dimension());
    const double ns2 = kernels::norm_squared(psi.amplitudes().data(), psi.dimension());
    if (np2 <= 0 || ns2 <= 0) throw std::invalid_argument("trace_distance_pure: zero vector");
    const double f2 = std::norm(overlap(phi, psi)) / (np2 * ns2);
    return std::sqrt(std::max(0.0, 1.0 - f2));
}

double aligned_l2_distance(const PureState& phi, const PureState& psi) {
    if (!phi.shape().same_as(psi.shape())) throw std::invalid_argument("shape mismatch");
    const double np = phi.norm(), ns = psi.norm();
    cplx ov = overlap(phi, psi);
    cplx phase = (std::abs(ov) > 0) ? ov / std::abs(ov) : cplx(1, 0);
    double acc = 0;
    const auto& a = phi.amplitudes();
    const auto& b = psi.amplitudes();
    for (i64 i = 0; i < phi.dimension(); ++i) acc += std::norm(a[i] / np - phase * b[i] / ns);
    return std::sqrt(acc);
}

RejectionResult rejection_sample(const PureState& state, int reg, const std::vector<double>& gamma,
                                 Rng& rng) {
    check_reg(state, reg);
    const i64 q = state.shape().registers[reg].size();
    if (static_cast<i64>(gamma.size()) != q)
        throw std::invalid_argument("rejection_sample: gamma length mismatch");
    for (double g : gamma)
        if (g < 0.0 || g > 1.0 + 1e-12)
            throw std::invalid_argument("rejection_sample: gamma out of [0,1]");
    const auto marg = marginals(state, reg);
    double M = 0;
    for (i64 x = 0; x < q; ++x) M += gamma[x] * gamma[x] * marg[x];
    RejectionResult result{std::nullopt, M};
    if (rng.u01() >= M) return result;
    const auto& shape = state.shape();
    const i64 outer = shape.outer(reg), stride = shape.stride(reg);
    std::vector<cplx> out(state.amplitudes());
    for (i64 o = 0; o < outer; ++o)
        for (i64 x = 0; x < q; ++x) {
            cplx* base = out.data() + (o * q + x) * stride;
            for (i64 i = 0; i < stride; ++i) base[i] *= gamma[x];
        }
    PureState collapsed(shape, std::move(out), state.truncation_loss());
    result.state = collapsed.normalized();
    return result;
}

std::vector<double> marginals(const PureState& state, int reg) {
    check_reg(state, reg);
    const auto& shape = state.shape();
    const i64 q = shape.registers[reg].size();
    std::vector<double> marg(q);
    kernels::register_marginals(state.amplitudes().data(), marg.data(), q, shape.outer(reg),
                                shape.stride(reg));
    const double total = kernels::norm_squared(state.amplitudes().data(), state.dimension());
    for (auto& m : marg) m /= total;
    return marg;
}

MeasureResult measure(const PureState& state, int reg, Rng& rng) {
    const auto marg = marginals(state, reg);
    const double u = rng.u01();
    double acc = 0;
    i64 outcome = static_cast<i64>(marg.size()) - 1;
    for (i64 x = 0; x < static_cast<i64>(marg.size()); ++x) {
        acc += marg[x];
        if (u < acc) {
            outcome = x;
            break;
        }
    }
    const auto& shape = state.shape();
    const i64 q = shape.registers[reg].size();
    const i64 outer = shape.outer(reg), stride = shape.stride(reg);
    std::vector<cplx> out(state.dimension(), cplx(0, 0));
    const auto& in = state.amplitudes();
    for (i64 o = 0; o < outer; ++o) {
        const i64 base = (o * q + outcome) * stride;
        for (i64 i = 0; i < stride; ++i) out[base + i] = in[base + i];
    }
    PureState collapsed(shape, std::move(out), state.truncation_loss());
    return MeasureResult{outcome, collapsed.normalized(), marg[outcome]};
}

namespace {

void check_orthonormal(const std::vector<std::vector<cplx>>& basis, double tol) {
    const size_t t = basis.size();
    for (size_t i = 0; i < t; ++i) {
        if (basis[i].size() != t) throw std::invalid_argument("basis: not square");
        for (size_t j = i; j < t; ++j) {
            cplx acc = 0;
            for (size_t x = 0; x < t; ++x) acc += std::conj(basis[i][x]) * basis[j][x];
            const double target = (i == j) ? 1.0 : 0.0;
            if (std::abs(acc - target) > tol)
                throw std::invalid_argument("basis: rows not orthonormal");
        }
    }
}

}  // namespace

std::vector<double> basis_outcome_distribution(const PureState& state, int reg,
                                               const std::vector<std::vector<cplx>>& basis) {
    check_reg(state, reg);
    const auto& shape = state.shape();
    const i64 q = shape.registers[reg].size();
    if (static_cast<i64>(basis.size()) != q)
        throw std::invalid_argument("basis size != register size");
    check_orthonormal(basis, 1e-10);
    // Rotate: new[d] = sum_x conj(basis[d][x]) old[x]; then computational marginals.
    std::vector<cplx> M(q * q);
    for (i64 d = 0; d < q; ++d)
        for (i64 x = 0; x < q; ++x) M[d * q + x] = std::conj(basis[d][x]);
    std::vector<cplx> rotated(state.dimension());
    kernels::apply_register_matrix(state.amplitudes().data(), rotated.data(), M.data(), q,
                                   shape.outer(reg), shape.stride(reg));
    std::vector<double> marg(q, 0.0);
    kernels::register_marginals(rotated.data(), marg.data(), q, shape.outer(reg), shape.stride(reg));
    const double total = kernels::norm_squared(rotated.data(), state.dimension());
    for (auto& m : marg) m /= total;
    return marg;
}

MeasureResult measure_in_basis(const PureState& state, int reg,
                               const std::vector<std::vector<cplx>>& basis, Rng& rng) {
    check_reg(state, reg);
    const auto& shape = state.shape();
    const i64 q = shape.registers[reg].size();
    if (static_cast<i64>(basis.size()) != q)
        throw std::invalid_argument("basis size != register size");
    check_orthonormal(basis, 1e-10);
    std::vector<cplx> M(q * q);
    for (i64 d = 0; d < q; ++d)
        for (i64 x = 0; x < q; ++x) M[d * q + x] = std::conj(basis[d][x]);
    std::vector<cplx> rotated(state.dimension());
    kernels::apply_register_matrix(state.amplitudes().data(), rotated.data(), M.data(), q,
                                   shape.outer(reg), shape.stride(reg));
    PureState rotated_state(shape, std::move(rotated), state.truncation_loss());
    MeasureResult r = measure(rotated_state, reg, rng);
    // Rotate the collapsed register content back: |d> -> |psi_d>.
    const i64 outer = shape.outer(reg), stride = shape.stride(reg);
    const auto& in = r.state.amplitudes();
    std::vector<cplx> out(state.dimension(), cplx(0, 0));
    for (i64 o = 0; o < outer; ++o)
        for (i64 i = 0; i < stride; ++i) {
            const cplx coeff = in[(o * q + r.outcome) * stride + i];
            if (coeff == cplx(0, 0)) continue;
            for (i64 x = 0; x < q; ++x) out[(o * q + x) * stride + i] += basis[r.outcome][x] * coeff;
        }
    return MeasureResult{r.outcome, PureState(shape, std::move(out), state.truncation_loss()).normalized(),
                         r.probability};
}

PureState apply_relabel_phase(const PureState& state, int reg,
                              const std::map<i64, std::pair<i64, cplx>>& map, double tol) {
    check_reg(state, reg);
    const auto& shape = state.shape();
    const i64 q = shape.registers[reg].size();
    // Injectivity of targets; unit phases.
    std::vector<bool> used(q, false);
    for (const auto& [src, dst] : map) {
        if (src < 0 || src >= q || dst.first < 0 || dst.first >= q)
            throw std::invalid_argument("apply_relabel_phase: label out of range");
        if (used[dst.first]) throw std::invalid_argument("apply_relabel_phase: map not injective");
        used[dst.first] = true;
        if (std::abs(std::abs(dst.second) - 1.0) > 1e-9)
            throw std::invalid_argument("apply_relabel_phase: phase not unit modulus");
    }
    const auto marg = marginals(state, reg);
    for (i64 x = 0; x < q; ++x)
        if (!map.count(x) && marg[x] > tol)
            throw std::invalid_argument("apply_relabel_phase: unmapped label carries amplitude");
    const i64 outer = shape.outer(reg), stride = shape.stride(reg);
    const auto& in = state.amplitudes();
    std::vector<cplx> out(state.dimension(), cplx(0, 0));
    for (const auto& [src, dst] : map) {
        for (i64 o = 0; o < outer; ++o) {
            const cplx* bi = in.data() + (o * q + src) * stride;
            cplx* bo = out.data() + (o * q + dst.first) * stride;
            for (i64 i = 0; i < stride; ++i) bo[i] = dst.second * bi[i];
        }
    }
    return PureState(shape, std::move(out), state.truncation_loss());
}

bool equal_up_to_phase(const PureState& a, const PureState& b, double tol) {
    return aligned_l2_distance(a, b) <= tol;
}

}  // namespace qlab
