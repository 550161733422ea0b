#include "qlab/clwe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qlab/kernels.hpp"

namespace qlab {

namespace {
constexpr double kPi = std::numbers::pi;
}

void ClweParams::validate() const {
    if (n < 1 || m < 1 || ell < 1) throw std::invalid_argument("ClweParams: bad sizes");
    if (static_cast<int>(q.factors.size()) != ell)
        throw std::invalid_argument("ClweParams: q must carry ell coprime factors");
    if (m % ell != 0) throw std::invalid_argument("ClweParams: ell must divide m");
    if (r <= 0) throw std::invalid_argument("ClweParams: r must be positive");
    const double ln_n = std::log(static_cast<double>(n));  // vacuous at n = 1, as intended
    if (m + 1e-9 < 2.0 * ell * n * log_slack * ln_n)
        throw std::invalid_argument("ClweParams: m below 2*ell*n*log_slack*ln n");
    if (strict_mode) {
        i64 maxq = 0;
        for (i64 f : q.factors) maxq = std::max(maxq, f);
        const double lower = 30.0 * n * ln_n * static_cast<double>(maxq);
        const double upper = static_cast<double>(q.q) / std::sqrt(static_cast<double>(n));
        if (!(r > lower && r < upper))
            throw std::invalid_argument("ClweParams: strict mode needs q/sqrt(n) > r > 30 n ln n max q_i");
    }
}

std::vector<std::vector<cplx>> psi_basis(i64 t) {
    if (t < 1) throw std::invalid_argument("psi_basis: t must be >= 1");
    std::vector<std::vector<cplx>> rows(t, std::vector<cplx>(t));
    const double inv_sqrt_t = 1.0 / std::sqrt(static_cast<double>(t));
    for (i64 d = 0; d < t; ++d)
        for (i64 x = 0; x < t; ++x) {
            const double diff = static_cast<double>(x - d);
            const double ang = -kPi * diff * diff / static_cast<double>(t);
            rows[d][x] = cplx(std::cos(ang), std::sin(ang)) * inv_sqrt_t;
        }
    return rows;
}

i64 find_center(const PureState& state, i64 t, Rng& rng) {
    if (state.shape().num_registers() != 1)
        throw std::invalid_argument("find_center: state must have one register");
    const auto& reg = state.shape().registers[0];
    if (reg.kind != Register::Kind::Grid || std::abs(reg.grid.step - 1.0) > 1e-12)
        throw std::invalid_argument("find_center: register must be an integer grid");
    if (t == 1) return 0;
    // Split labels x into high k = floor(x/t) and low d = x mod t.
    const i64 n = reg.size();
    i64 kmin = 0, kmax = 0;
    {
        const i64 x0 = static_cast<i64>(std::llround(reg.grid.value(0)));
        const i64 x1 = static_cast<i64>(std::llround(reg.grid.value(n - 1)));
        auto fdiv = [t](i64 x) { return (x >= 0) ? x / t : -((-x + t - 1) / t); };
        kmin = fdiv(x0);
        kmax = fdiv(x1);
    }
    const i64 nk = kmax - kmin + 1;
    RegisterShape split_shape(
        {Register::from_grid(CosetGrid{1.0, 0.0, kmin, kmax, static_cast<double>(
                                            std::max(std::abs(kmin), std::abs(kmax)))}),
         Register::cyclic(t)});
    std::vector<cplx> amp(nk * t, cplx(0, 0));
    for (i64 i = 0; i < n; ++i) {
        const i64 x = static_cast<i64>(std::llround(reg.grid.value(i)));
        const i64 d = ((x % t) + t) % t;
        const i64 k = (x - d) / t;
        amp[(k - kmin) * t + d] = state.amplitudes()[i];
    }
    PureState split(split_shape, std::move(amp), state.truncation_loss());
    auto high = measure(split, 0, rng);
    auto low = measure_in_basis(high.state, 1, psi_basis(t), rng);
    return low.outcome;
}

std::vector<double> center_outcome_distribution(i64 t, double r, i64 c_mod_t) {
    // P(d) = sum_k | sum_y rho_r(kt + y - c) w_t^{y (c-d)} |^2 / (t sum_x rho_r(x)^2)
    const i64 hw = static_cast<i64>(std::ceil(truncation_radius(r)));
    const i64 c = ((c_mod_t % t) + t) % t;
    auto fdiv = [t](i64 x) { return (x >= 0) ? x / t : -((-x + t - 1) / t); };
    const i64 kmin = fdiv(c - hw), kmax = fdiv(c + hw);
    std::vector<double> num(t, 0.0);
    std::vector<double> re(t), im(t);
    double denom = 0.0;
    for (i64 k = kmin; k <= kmax; ++k) {
        std::fill(re.begin(), re.end(), 0.0);
        std::fill(im.begin(), im.end(), 0.0);
        for (i64 y = 0; y < t; ++y) {
            const double v = rho(r, static_cast<double>(k * t + y - c));
            if (v == 0.0) continue;
            denom += v * v;
            for (i64 sft = 0; sft < t; ++sft) {  // sft = (c - d) mod t
                const double ang = 2.0 * kPi * static_cast<double>((y * sft) % t) / t;
                re[sft] += v * std::cos(ang);
                im[sft] += v * std::sin(ang);
            }
        }
        for (i64 sft = 0; sft < t; ++sft) num[sft] += re[sft] * re[sft] + im[sft] * im[sft];
    }
    std::vector<double> out(t);
    for (i64 sft = 0; sft < t; ++sft) {
        // outcome d with (c - d) mod t = sft
        const i64 d = ((c - sft) % t + t) % t;
        out[d] = num[sft] / (static_cast<double>(t) * denom);
    }
    return out;
}

double exact_center_prob(i64 t, double r, i64 c, double truncation) {
    if (t == 1) return 1.0;
    const i64 hw = static_cast<i64>(std::ceil(std::max(truncation, truncation_radius(r))));
    auto fdiv = [t](i64 x) { return (x >= 0) ? x / t : -((-x + t - 1) / t); };
    const i64 kmin = fdiv(c - hw), kmax = fdiv(c + hw);
    double num = 0.0, denom = 0.0;
    for (i64 k = kmin; k <= kmax; ++k) {
        double block = 0.0;
        for (i64 y = 0; y < t; ++y) {
            const double v = rho(r, static_cast<double>(k * t + y - c));
            block += v;
            denom += v * v;
        }
        num += block * block;
    }
    return num / (static_cast<double>(t) * denom);
}

BlockCenterSampler::BlockCenterSampler(double r, i64 t)
    : r_(r),
      t_(t),
      hw_(static_cast<i64>(std::ceil(truncation_radius(r)))),
      error_table_(CosetGrid::integers_about(0, static_cast<i64>(std::ceil(truncation_radius(r)))),
                   GaussianParam(r), DiscreteGaussianTable::Weight::RhoSquared) {
    env_.resize(2 * hw_ + 1);
    prefix2_.resize(env_.size() + 1, 0.0);
    for (i64 i = 0; i < static_cast<i64>(env_.size()); ++i) {
        env_[i] = rho(r_, static_cast<double>(i - hw_));
        prefix2_[i + 1] = prefix2_[i] + env_[i] * env_[i];
    }
    cos_.resize(t_);
    sin_.resize(t_);
    for (i64 j = 0; j < t_; ++j) {
        const double ang = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(t_);
        cos_[j] = std::cos(ang);
        sin_[j] = std::sin(ang);
    }
}

i64 BlockCenterSampler::sample_error(Rng& rng) const {
    return static_cast<i64>(std::llround(error_table_.sample_value(rng)));
}

i64 BlockCenterSampler::sample_outcome(i64 c, Rng& rng) const {
    if (t_ == 1) return 0;
    // labels = c + x, x in [-hw, hw]; block k covers labels [k t, (k+1) t).
    const i64 t = t_;
    auto fdiv = [t](i64 x) { return (x >= 0) ? x / t : -((-x + t - 1) / t); };
    const i64 kmin = fdiv(c - hw_), kmax = fdiv(c + hw_);
    // Draw the high register from the block rho^2 masses via prefix sums.
    const double total = prefix2_.back();
    double u = rng.u01() * total;
    i64 kdraw = kmax;
    for (i64 k = kmin; k <= kmax; ++k) {
        const i64 lo = std::max<i64>(k * t - c + hw_, 0);
        const i64 hi = std::min<i64>(k * t + t - c + hw_, static_cast<i64>(env_.size()));
        const double mass = (hi > lo) ? prefix2_[hi] - prefix2_[lo] : 0.0;
        if (u < mass || k == kmax) {
            kdraw = k;
            break;
        }
        u -= mass;
    }
    // Born over d within the drawn block: |sum_y env(kt+y-c) w_t^{y (c-d)}|^2.
    std::vector<double> re(t, 0.0), im(t, 0.0);
    for (i64 y = 0; y < t; ++y) {
        const i64 x = kdraw * t + y - c;
        if (x < -hw_ || x > hw_) continue;
        const double v = env_[x + hw_];
        i64 idx = 0;
        for (i64 sft = 0; sft < t; ++sft) {
            re[sft] += v * cos_[idx];
            im[sft] += v * sin_[idx];
            idx += y;
            if (idx >= t) idx -= t;
        }
    }
    std::vector<double> w(t);
    double tot = 0.0;
    for (i64 sft = 0; sft < t; ++sft) {
        w[sft] = re[sft] * re[sft] + im[sft] * im[sft];
        tot += w[sft];
    }
    double v = rng.u01() * tot;
    i64 sft_draw = t - 1;
    for (i64 sft = 0; sft < t; ++sft) {
        if (v < w[sft]) {
            sft_draw = sft;
            break;
        }
        v -= w[sft];
    }
    return ((c - sft_draw) % t + t) % t;
}

double BlockCenterSampler::correct_probability(i64 c) const {
    return exact_center_prob(t_, r_, c, static_cast<double>(hw_));
}

std::optional<std::vector<i64>> recover_block(const ApproxObservation& obs) {
    const int n = obs.n;
    const int cols = obs.cols;
    if (cols < 4 * n) throw std::invalid_argument("recover_block: need m/ell >= 4n");
    const int group = 2 * n;
    const int num_groups = cols / group;
    const int half = num_groups / 2;
    for (int i = 0; i < half; ++i) {
        // Solve A_{j,i}^T s = y_i over Z_{q_j}.
        std::vector<i64> At(group * n), rhs(group);
        for (int row = 0; row < group; ++row) {
            const int col = i * group + row;
            for (int k = 0; k < n; ++k) At[row * n + k] = obs.A[k * cols + col];
            rhs[row] = obs.y_tilde[col];
        }
        auto cand = solve_linear_mod(At, rhs, group, n, obs.q_j);
        if (!cand) continue;
        // Verify on the paired group i + half at the 0.9 threshold.
        const int vi = i + half;
        int matches = 0;
        for (int row = 0; row < group; ++row) {
            const int col = vi * group + row;
            i64 pred = 0;
            for (int k = 0; k < n; ++k) pred += obs.A[k * cols + col] * (*cand)[k];
            pred = ((pred % obs.q_j) + obs.q_j) % obs.q_j;
            const i64 seen = ((obs.y_tilde[col] % obs.q_j) + obs.q_j) % obs.q_j;
            if (pred == seen) ++matches;
        }
        if (static_cast<double>(matches) >= 0.9 * static_cast<double>(group)) {
            std::vector<i64> out(n);
            for (int k = 0; k < n; ++k) out[k] = ((*cand)[k] % obs.q_j + obs.q_j) % obs.q_j;
            return out;
        }
    }
    return std::nullopt;
}

SampledBranchResult construct_clwe_sampled(const std::vector<i64>& A, const ClweParams& params,
                                           Rng& rng) {
    params.validate();
    const int n = params.n, m = params.m, ell = params.ell;
    const i64 q = params.q.q;
    if (static_cast<int>(A.size()) != n * m)
        throw std::invalid_argument("construct_clwe_sampled: A shape mismatch");
    SampledBranchResult res;
    res.branch_s.resize(n);
    for (int i = 0; i < n; ++i) res.branch_s[i] = static_cast<i64>(rng.below(q));
    res.b.resize(m);
    std::vector<i64> dtilde(m);
    const int bs = params.block_size();
    // Point-mass error (support collapses to {0}): the labels are classical,
    // so the computational readout already reveals the centers exactly.
    const bool classical = truncation_radius(params.r) < 1.0;
    for (int j = 0; j < ell; ++j) {
        const i64 t = params.block_modulus(j);
        std::optional<BlockCenterSampler> sampler;
        if (!classical) sampler.emplace(params.r, t);
        for (int col = j * bs; col < (j + 1) * bs; ++col) {
            i64 c = 0;
            for (int k = 0; k < n; ++k) c += A[k * m + col] * res.branch_s[k];
            c = ((c % q) + q) % q;
            const i64 x = classical ? 0 : sampler->sample_error(rng);
            res.b[col] = centered_mod(c + x, q);
            dtilde[col] = classical ? (c % t) : sampler->sample_outcome(c, rng);
        }
    }
    // Per-block recovery + CRT.
    std::vector<std::pair<i64, i64>> residues;
    bool ok = true;
    for (int j = 0; j < ell && ok; ++j) {
        ApproxObservation obs;
        obs.n = n;
        obs.cols = bs;
        obs.q_j = params.block_modulus(j);
        obs.A.resize(n * bs);
        obs.y_tilde.resize(bs);
        for (int k = 0; k < n; ++k)
            for (int col = 0; col < bs; ++col) obs.A[k * bs + col] = A[k * m + j * bs + col];
        for (int col = 0; col < bs; ++col) obs.y_tilde[col] = dtilde[j * bs + col];
        auto rec = recover_block(obs);
        if (!rec) {
            ok = false;
            break;
        }
        for (int k = 0; k < n; ++k) residues.emplace_back((*rec)[k], obs.q_j);
    }
    if (ok) {
        res.s_recovered.resize(n);
        for (int k = 0; k < n; ++k) {
            std::vector<std::pair<i64, i64>> rk;
            for (int j = 0; j < ell; ++j) rk.push_back(residues[j * n + k]);
            res.s_recovered[k] = crt_combine(rk);
        }
        res.recovered_ok = true;
        for (int k = 0; k < n; ++k)
            res.recovered_ok = res.recovered_ok && (res.s_recovered[k] == res.branch_s[k]);
    }
    return res;
}

namespace {

// Folded complex Gaussian over Z_q: sum_x rho_r(x) e^{-pi i x^2/t} |(shift+x) mod q>.
std::vector<cplx> folded_complex_gaussian(i64 q, i64 t, double r, i64 shift) {
    const i64 hw = static_cast<i64>(std::ceil(truncation_radius(r)));
    std::vector<cplx> amp(q, cplx(0, 0));
    for (i64 x = -hw; x <= hw; ++x) {
        const double ang = -kPi * static_cast<double>(x) * static_cast<double>(x) / t;
        amp[((shift + x) % q + q) % q] += rho(r, x) * cplx(std::cos(ang), std::sin(ang));
    }
    return amp;
}

// Classical recovery used inside the coherent unitary, n = 1: one solve
// group of two equations, one verify group at the 0.9 threshold.
std::optional<i64> coherent_block_solve(const std::vector<i64>& a, const std::vector<i64>& dts,
                                        i64 t) {
    const int bs = static_cast<int>(a.size());
    ApproxObservation obs;
    obs.n = 1;
    obs.cols = bs;
    obs.q_j = t;
    obs.A = a;
    obs.y_tilde = dts;
    auto r = recover_block(obs);
    if (!r) return std::nullopt;
    return (*r)[0];
}

}  // namespace

CoherentTinyResult construct_clwe_coherent_tiny(const std::vector<i64>& A, const ClweParams& params,
                                                Rng& rng) {
    params.validate();
    (void)rng;  // fully deterministic: no measurement is performed
    if (params.n != 1)
        throw std::invalid_argument("construct_clwe_coherent_tiny: supported at n = 1 only");
    const i64 q = params.q.q;
    const int m = params.m, ell = params.ell;
    const int bs = params.block_size();
    double dim_check = static_cast<double>(q);
    for (int i = 0; i < m; ++i) {
        dim_check *= static_cast<double>(q);
        if (dim_check > static_cast<double>(kDimensionCap))
            throw std::invalid_argument("construct_clwe_coherent_tiny: dimension cap exceeded");
    }
    // Solve-group usability for the drawn A (the theorem's full-rank event);
    // bail out before the heavy simulation when the event failed.
    CoherentTinyResult out{1.0, true};
    for (int j = 0; j < ell; ++j) {
        const i64 t = params.block_modulus(j);
        bool usable = false;
        for (int col = j * bs; col < j * bs + 2; ++col)
            usable = usable || (gcd_i64(A[col], t) == 1);
        out.recovery_usable = out.recovery_usable && usable;
    }
    if (!out.recovery_usable) return out;

    const i64 dim = static_cast<i64>(std::llround(std::pow(static_cast<double>(q), m)));
    // Ideal |phi> over the m label registers.
    std::vector<cplx> ideal(dim, cplx(0, 0));
    std::vector<std::vector<std::vector<cplx>>> coord(q);  // [s][i] -> folded state
    for (i64 s = 0; s < q; ++s) {
        coord[s].resize(m);
        for (int i = 0; i < m; ++i) {
            const i64 t = params.block_modulus(i / bs);
            coord[s][i] = folded_complex_gaussian(q, t, params.r, ((A[i] * s) % q + q) % q);
        }
    }
    std::vector<i64> digits(m);
    for (i64 idx = 0; idx < dim; ++idx) {
        i64 tmp = idx;
        for (int i = m - 1; i >= 0; --i) {
            digits[i] = tmp % q;
            tmp /= q;
        }
        cplx total = 0;
        for (i64 s = 0; s < q; ++s) {
            cplx prod = 1;
            for (int i = 0; i < m; ++i) prod *= coord[s][i][digits[i]];
            total += prod;
        }
        ideal[idx] = total;
    }
    // |phi_0> = sum_s |s> (x) prod_i state_i(s).
    std::vector<cplx> phi0(q * dim, cplx(0, 0));
    for (i64 s = 0; s < q; ++s) {
        // product state via progressive kron
        std::vector<cplx> acc = {cplx(1, 0)};
        for (int i = 0; i < m; ++i) {
            std::vector<cplx> next(acc.size() * q);
            for (size_t a_i = 0; a_i < acc.size(); ++a_i)
                for (i64 y = 0; y < q; ++y) next[a_i * q + y] = acc[a_i] * coord[s][i][y];
            acc = std::move(next);
        }
        std::copy(acc.begin(), acc.end(), phi0.begin() + s * dim);
    }
    {
        const double nrm = std::sqrt(kernels::norm_squared(phi0.data(), q * dim));
        for (auto& v : phi0) v /= nrm;
        const double ni = std::sqrt(kernels::norm_squared(ideal.data(), dim));
        for (auto& v : ideal) v /= ni;
    }
    // Rotation of the low part of one coordinate register by W (psi basis):
    // y = t h + d; new[d'] = sum_d conj(psi_{d'}(d)) old[d].
    auto rotate = [&](std::vector<cplx>& vec, int coord_idx, i64 t, bool inverse) {
        const auto basis = psi_basis(t);
        std::vector<cplx> M(q * q, cplx(0, 0));
        for (i64 h = 0; h < q / t; ++h)
            for (i64 dp = 0; dp < t; ++dp)
                for (i64 d = 0; d < t; ++d) {
                    const cplx w = inverse ? basis[d][dp] : std::conj(basis[dp][d]);
                    M[(h * t + dp) * q + (h * t + d)] = w;
                }
        // register coord_idx of the m label registers (after the s register)
        i64 stride = 1;
        for (int i = coord_idx + 1; i < m; ++i) stride *= q;
        const i64 outer = static_cast<i64>(phi0.size()) / (stride * q);
        std::vector<cplx> tmp(vec.size());
        kernels::apply_register_matrix(vec.data(), tmp.data(), M.data(), q, outer, stride);
        vec.swap(tmp);
    };
    for (int i = 0; i < m; ++i) rotate(phi0, i, params.block_modulus(i / bs), false);
    // V: |s>|D> -> |s - stilde(D)>|D>, stilde from the classical recovery on
    // the rotated low digits. Per-block pattern lookup tables keep this
    // linear in the state dimension.
    std::vector<std::vector<std::optional<i64>>> block_lut(ell);
    for (int j = 0; j < ell; ++j) {
        const i64 t = params.block_modulus(j);
        i64 npat = 1;
        for (int c = 0; c < bs; ++c) npat *= t;
        block_lut[j].resize(npat);
        std::vector<i64> dts(bs), ablock(bs);
        for (int c = 0; c < bs; ++c) ablock[c] = A[j * bs + c];
        for (i64 pat = 0; pat < npat; ++pat) {
            i64 tmp = pat;
            for (int c = 0; c < bs; ++c) {
                dts[c] = tmp % t;
                tmp /= t;
            }
            block_lut[j][pat] = coherent_block_solve(ablock, dts, t);
        }
    }
    std::vector<i64> stilde(dim);
    for (i64 idx = 0; idx < dim; ++idx) {
        i64 tmp = idx;
        for (int i = m - 1; i >= 0; --i) {
            digits[i] = tmp % q;
            tmp /= q;
        }
        std::vector<std::pair<i64, i64>> residues;
        bool ok = true;
        for (int j = 0; j < ell && ok; ++j) {
            const i64 t = params.block_modulus(j);
            i64 pat = 0, mult = 1;
            for (int c = 0; c < bs; ++c) {
                pat += (digits[j * bs + c] % t) * mult;
                mult *= t;
            }
            const auto& sj = block_lut[j][pat];
            if (!sj)
                ok = false;
            else
                residues.emplace_back(*sj, t);
        }
        stilde[idx] = ok ? crt_combine(residues) : 0;
    }
    std::vector<cplx> after(q * dim);
    for (i64 sp = 0; sp < q; ++sp)
        for (i64 y = 0; y < dim; ++y) after[sp * dim + y] = phi0[((sp + stilde[y]) % q) * dim + y];
    phi0.swap(after);
    for (int i = 0; i < m; ++i) rotate(phi0, i, params.block_modulus(i / bs), true);
    // Overlap with |0> (x) |phi>.
    const cplx ov = kernels::inner_product(ideal.data(), phi0.data(), dim);
    const double f = std::abs(ov);
    out.trace_distance = std::sqrt(std::max(0.0, 1.0 - f * f));
    return out;
}

std::string oblivious_sample_to_json(const ObliviousSample& s) {
    std::ostringstream os;
    os << "{\"n\":" << s.n << ",\"m\":" << s.m << ",\"q\":" << s.q << ",\"A\":[";
    for (size_t i = 0; i < s.A.size(); ++i) os << (i ? "," : "") << s.A[i];
    os << "],\"b\":[";
    for (size_t i = 0; i < s.b.size(); ++i) os << (i ? "," : "") << s.b[i];
    os << "],\"provenance\":{\"mode\":\"" << s.provenance_mode
       << "\",\"seed\":" << s.provenance_seed << "}}";
    return os.str();
}

InstrumentedObliviousSample oblivious_sample_instrumented(const std::vector<i64>& A,
                                                          const ClweParams& params,
                                                          std::uint64_t seed, int max_retries) {
    Rng rng(seed);
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        auto branch = construct_clwe_sampled(A, params, rng);
        if (!branch.recovered_ok) continue;
        ObliviousSample s;
        s.n = params.n;
        s.m = params.m;
        s.q = params.q.q;
        s.A = A;
        for (auto& v : s.A) v = centered_mod(v, params.q.q);
        s.b = branch.b;
        s.provenance_mode = "sampled_branch";
        s.provenance_seed = seed;
        s.alpha = params.r / (std::sqrt(2.0) * static_cast<double>(params.q.q));
        return InstrumentedObliviousSample{std::move(s), branch.branch_s, attempt};
    }
    throw std::runtime_error("oblivious_sample: recovery failed after retry budget");
}

ObliviousSample oblivious_sample(const std::vector<i64>& A, const ClweParams& params,
                                 std::uint64_t seed, int max_retries) {
    return oblivious_sample_instrumented(A, params, seed, max_retries).sample;
}

bool modulus_switch_condition(int n, double s_w, i64 q_prime, double alpha, double alpha_prime,
                              double omega_factor) {
    const double lhs = alpha_prime * alpha_prime;
    const double rhs = alpha * alpha + std::pow(s_w * std::sqrt(static_cast<double>(n)) /
                                                    static_cast<double>(q_prime),
                                                2.0) *
                                           omega_factor;
    return lhs >= rhs;
}

ObliviousSample modulus_switch(const ObliviousSample& sample, i64 q_prime, double alpha,
                               double alpha_prime, double omega_factor, Rng& rng) {
    if (q_prime > sample.q) throw std::invalid_argument("modulus_switch: q' must be <= q");
    if (!modulus_switch_condition(sample.n, sample.secret_width, q_prime, alpha, alpha_prime,
                                  omega_factor))
        throw std::invalid_argument(
            "modulus_switch: condition (alpha')^2 >= alpha^2 + (s_w sqrt n / q')^2 * omega violated");
    const double ratio = static_cast<double>(q_prime) / static_cast<double>(sample.q);
    const double drift =
        (q_prime == sample.q) ? 0.0 : sample.secret_width * std::sqrt(sample.n) / 2.0;
    const double aq2 = alpha_prime * alpha_prime * q_prime * q_prime;
    const double aq1 = alpha * alpha * q_prime * q_prime;
    const double smooth2 = aq2 - aq1 - drift * drift;
    if (smooth2 < -1e-9)
        throw std::invalid_argument("modulus_switch: (alpha' q')^2 - (alpha q')^2 - drift^2 < 0");
    const double smooth = std::sqrt(std::max(0.0, smooth2));
    ObliviousSample out = sample;
    out.q = q_prime;
    out.alpha = alpha_prime;
    for (auto& v : out.A) v = centered_mod(round_half_up(ratio * static_cast<double>(v)), q_prime);
    std::optional<DiscreteGaussianTable> noise;
    if (smooth > 0) {
        const i64 hw = std::max<i64>(1, static_cast<i64>(std::ceil(truncation_radius(smooth))) + 1);
        noise.emplace(CosetGrid::integers_about(0, hw), GaussianParam(smooth),
                      DiscreteGaussianTable::Weight::Rho);
    }
    for (auto& v : out.b) {
        i64 nv = round_half_up(ratio * static_cast<double>(v));
        if (noise) nv += static_cast<i64>(std::llround(noise->sample_value(rng)));
        v = centered_mod(nv, q_prime);
    }
    return out;
}

}  // namespace qlab
