#include "qlab/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qlab/qsim.hpp"

namespace qlab {

namespace {
constexpr double kPi = std::numbers::pi;
}

HeavyPair find_heavy_pair(const AmplitudeSpec& f, i64 q, double threshold) {
    const auto table = normalized_table(f);
    const auto g = dft_amplitude(table, Modulus(q));
    double best = -1;
    i64 bj1 = -1, bj2 = -1;
    for (i64 j1 = 0; j1 < q; ++j1) {
        for (i64 j2 = 0; j2 < q; ++j2) {
            if (j1 == j2 || gcd_i64(j1 - j2, q) != 1) continue;
            const double mn = std::min(std::abs(g[j1]), std::abs(g[j2]));
            if (mn < threshold) continue;
            if (mn > best + 1e-15) {
                best = mn;
                bj1 = j1;
                bj2 = j2;
            }
        }
    }
    if (bj1 < 0)
        throw std::runtime_error("find_heavy_pair: no admissible pair above threshold, aborting");
    return HeavyPair{bj1, bj2, g[bj1], g[bj2], threshold};
}

std::optional<LabeledQubit> slwe_to_dcp(const SlweSample& sample, const HeavyPair& pair, Rng& rng) {
    PureState fourier = qft(sample.state, 0);
    const i64 q = sample.state.shape().registers[0].q;
    const double mn = std::min(std::abs(pair.g1), std::abs(pair.g2));
    std::vector<double> gamma(q, 0.0);
    gamma[pair.j1] = std::min(1.0, mn / std::abs(pair.g1));
    gamma[pair.j2] = std::min(1.0, mn / std::abs(pair.g2));
    auto rej = rejection_sample(fourier, 0, gamma, rng);
    if (!rej.state) return std::nullopt;
    std::map<i64, std::pair<i64, cplx>> relabel;
    relabel[pair.j1] = {0, std::conj(pair.g1) / std::abs(pair.g1)};
    relabel[pair.j2] = {1, std::conj(pair.g2) / std::abs(pair.g2)};
    PureState two = apply_relabel_phase(*rej.state, 0, relabel, 1e-9);
    std::vector<cplx> amp = {two.amplitudes()[0], two.amplitudes()[1]};
    std::vector<i64> label(sample.a.size());
    for (size_t i = 0; i < sample.a.size(); ++i)
        label[i] = centered_mod((pair.j2 - pair.j1) * sample.a[i], q);
    RegisterShape shape({Register::cyclic(2)});
    return LabeledQubit{std::move(label),
                        PureState(shape, std::move(amp), two.truncation_loss()).normalized()};
}

LabeledQubit sieve_combine(const LabeledQubit& x, const LabeledQubit& y, Rng& rng) {
    if (x.label.size() != y.label.size())
        throw std::invalid_argument("sieve_combine: label dimension mismatch");
    const cplx x0 = x.state.amplitudes()[0], x1 = x.state.amplitudes()[1];
    const cplx y0 = y.state.amplitudes()[0], y1 = y.state.amplitudes()[1];
    // CNOT then measure the target: outcome 0 keeps (x0 y0, x1 y1) with the
    // sum label; outcome 1 keeps (x0 y1, x1 y0) with the difference label.
    const cplx s0 = x0 * y0, s1 = x1 * y1;
    const cplx d0 = x0 * y1, d1 = x1 * y0;
    const double ps = std::norm(s0) + std::norm(s1);
    const double pd = std::norm(d0) + std::norm(d1);
    const double u = rng.u01() * (ps + pd);
    std::vector<i64> label(x.label.size());
    std::vector<cplx> amp(2);
    if (u < ps) {
        for (size_t i = 0; i < label.size(); ++i) label[i] = x.label[i] + y.label[i];
        amp = {s0 / std::sqrt(ps), s1 / std::sqrt(ps)};
    } else {
        for (size_t i = 0; i < label.size(); ++i) label[i] = x.label[i] - y.label[i];
        amp = {d0 / std::sqrt(pd), d1 / std::sqrt(pd)};
    }
    RegisterShape shape({Register::cyclic(2)});
    return LabeledQubit{std::move(label), PureState(shape, std::move(amp))};
}

namespace {

bool is_power_of_two(i64 q) { return q >= 2 && (q & (q - 1)) == 0; }

bool is_prime(i64 q) {
    if (q < 2) return false;
    for (i64 p = 2; p * p <= q; ++p)
        if (q % p == 0) return false;
    return true;
}

// Measure a phase qubit in the {|0> + e^{i theta}|1>, |0> - e^{i theta}|1>}
// basis; returns 0 for the + outcome.
int measure_rotated(const LabeledQubit& qb, double theta, Rng& rng) {
    const cplx a0 = qb.state.amplitudes()[0], a1 = qb.state.amplitudes()[1];
    const cplx ph(std::cos(theta), std::sin(theta));
    const double pp = std::norm(a0 + std::conj(ph) * a1) / 2.0;
    const double pm = std::norm(a0 - std::conj(ph) * a1) / 2.0;
    return (rng.u01() * (pp + pm) < pp) ? 0 : 1;
}

// Solve M s = b over GF(2); rows are (coeffs, rhs). Returns nullopt when the
// system is rank-deficient or inconsistent.
std::optional<std::vector<i64>> solve_gf2(std::vector<std::vector<int>> rows, int n) {
    int rank = 0;
    std::vector<int> pivot;
    for (int col = 0; col < n; ++col) {
        int sel = -1;
        for (int r = rank; r < static_cast<int>(rows.size()); ++r)
            if (rows[r][col]) {
                sel = r;
                break;
            }
        if (sel < 0) return std::nullopt;
        std::swap(rows[rank], rows[sel]);
        for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
            if (r != rank && rows[r][col])
                for (int c = 0; c <= n; ++c) rows[r][c] ^= rows[rank][c];
        }
        pivot.push_back(col);
        ++rank;
    }
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
        if (rows[r][n]) return std::nullopt;
    std::vector<i64> s(n, 0);
    for (int i = 0; i < rank; ++i) s[pivot[i]] = rows[i][n];
    return s;
}

// One sieve stage for modulus 2^k: cancel low digits level by level, then
// read GF(2) equations <v, s> = bit from labels 2^{k-1} v.
// Pairing inside each residue bucket follows insertion order.
std::optional<std::vector<i64>> sieve_stage_bits(std::vector<LabeledQubit> pool, i64 qq, int n,
                                                 Rng& rng) {
    const int k = static_cast<int>(std::llround(std::log2(static_cast<double>(qq))));
    for (int b = 0; b + 1 < k; ++b) {
        const i64 mod = i64(1) << (b + 1);
        std::vector<LabeledQubit> out;
        std::map<std::vector<i64>, std::vector<LabeledQubit>> buckets;
        for (auto& qb : pool) {
            std::vector<i64> res(n);
            bool zero = true;
            for (int i = 0; i < n; ++i) {
                res[i] = ((qb.label[i] % mod) + mod) % mod;
                zero = zero && (res[i] == 0);
            }
            if (zero)
                out.push_back(std::move(qb));
            else
                buckets[res].push_back(std::move(qb));
        }
        for (auto& [res, lst] : buckets) {
            for (size_t i = 0; i + 1 < lst.size(); i += 2) {
                LabeledQubit combined = sieve_combine(lst[i], lst[i + 1], rng);
                bool zero = true;
                for (int c = 0; c < n; ++c) zero = zero && (combined.label[c] % mod == 0);
                if (zero) out.push_back(std::move(combined));
            }
        }
        pool = std::move(out);
    }
    // labels are now multiples of 2^{k-1}: label = 2^{k-1} v with v in {0,1}^n
    const i64 half = qq / 2;
    std::vector<std::vector<int>> rows;
    for (const auto& qb : pool) {
        std::vector<int> row(n + 1, 0);
        bool nonzero = false;
        for (int i = 0; i < n; ++i) {
            row[i] = static_cast<int>(((qb.label[i] / half) % 2 + 2) % 2);
            nonzero = nonzero || row[i];
        }
        if (!nonzero) continue;
        row[n] = measure_rotated(qb, 0.0, rng);  // |+->: outcome 1 iff <v,s> odd
        rows.push_back(std::move(row));
    }
    return solve_gf2(std::move(rows), n);
}

SecretKey kuperberg_power_of_two(std::vector<LabeledQubit> qubits, i64 q, int n, Rng& rng) {
    const int k = static_cast<int>(std::llround(std::log2(static_cast<double>(q))));
    std::vector<i64> s_known(n, 0);  // recovered low bits of each coordinate
    const size_t share = qubits.size() / k;
    size_t cursor = 0;
    i64 qq = q;
    for (int stage = 0; stage < k; ++stage) {
        const size_t take = (stage == k - 1) ? qubits.size() - cursor : share;
        std::vector<LabeledQubit> pool;
        pool.reserve(take);
        for (size_t i = 0; i < take; ++i) {
            LabeledQubit qb = qubits[cursor + i];
            // Strip the known bits: multiply |1> by w_q^{-<label, s_known>},
            // turning the phase into w_{qq}^{<label, s_rem>}.
            i64 dot = 0;
            for (int c = 0; c < n; ++c) dot += qb.label[c] * s_known[c];
            const double ang = -2.0 * kPi * static_cast<double>(((dot % q) + q) % q) /
                               static_cast<double>(q);
            std::vector<cplx> amp = {qb.state.amplitudes()[0],
                                     qb.state.amplitudes()[1] * cplx(std::cos(ang), std::sin(ang))};
            std::vector<i64> lab(n);
            for (int c = 0; c < n; ++c) lab[c] = ((qb.label[c] % qq) + qq) % qq;
            RegisterShape shape({Register::cyclic(2)});
            pool.push_back(LabeledQubit{std::move(lab), PureState(shape, std::move(amp))});
        }
        cursor += take;
        auto bits = sieve_stage_bits(std::move(pool), qq, n, rng);
        if (!bits)
            throw std::runtime_error("kuperberg_solve: stage " + std::to_string(stage) +
                                     " ran out of independent equations");
        for (int c = 0; c < n; ++c) s_known[c] += (*bits)[c] << stage;
        qq /= 2;
    }
    SecretKey out;
    out.s.resize(n);
    for (int c = 0; c < n; ++c) out.s[c] = centered_mod(s_known[c], q);
    return out;
}

// Odd prime fallback: sieve to unit-vector-supported labels coordinate by
// coordinate, then maximum-likelihood phase readout over the q candidates.
SecretKey kuperberg_mle(std::vector<LabeledQubit> qubits, i64 q, int n, Rng& rng) {
    SecretKey out;
    out.s.assign(n, 0);
    // Zero out all coordinates except `target` via difference combines.
    for (int target = 0; target < n; ++target) {
        std::vector<LabeledQubit> pool;
        const size_t share = qubits.size() / n;
        const size_t lo = target * share;
        const size_t hi = (target == n - 1) ? qubits.size() : lo + share;
        for (size_t i = lo; i < hi; ++i) pool.push_back(qubits[i]);
        for (int other = 0; other < n; ++other) {
            if (other == target) continue;
            std::map<i64, std::vector<LabeledQubit>> buckets;
            std::vector<LabeledQubit> out_pool;
            for (auto& qb : pool) {
                const i64 r = ((qb.label[other] % q) + q) % q;
                if (r == 0)
                    out_pool.push_back(std::move(qb));
                else
                    buckets[r].push_back(std::move(qb));
            }
            for (auto& [r, lst] : buckets) {
                for (size_t i = 0; i + 1 < lst.size(); i += 2) {
                    LabeledQubit c = sieve_combine(lst[i], lst[i + 1], rng);
                    if (c.label[other] % q == 0) out_pool.push_back(std::move(c));
                }
            }
            pool = std::move(out_pool);
        }
        // Likelihood over candidates for s_target from rotated measurements.
        std::vector<double> loglik(q, 0.0);
        bool any = false;
        for (auto& qb : pool) {
            const i64 ell = ((qb.label[target] % q) + q) % q;
            if (ell == 0) continue;
            any = true;
            const double theta = kPi / 2.0 * rng.u01();  // vary the basis
            const int outcome = measure_rotated(qb, theta, rng);
            for (i64 cand = 0; cand < q; ++cand) {
                const double phase = 2.0 * kPi * static_cast<double>((ell * cand) % q) / q - theta;
                double p = (1.0 + std::cos(phase)) / 2.0;
                p = std::min(1.0 - 1e-12, std::max(1e-12, p));
                loglik[cand] += std::log(outcome == 0 ? p : 1.0 - p);
            }
        }
        if (!any) throw std::runtime_error("kuperberg_solve: MLE stage has no usable qubits");
        i64 best = 0;
        for (i64 c = 1; c < q; ++c)
            if (loglik[c] > loglik[best]) best = c;
        out.s[target] = centered_mod(best, q);
    }
    return out;
}

}  // namespace

i64 kuperberg_budget(int n, i64 q) {
    if (is_power_of_two(q)) {
        const int k = static_cast<int>(std::llround(std::log2(static_cast<double>(q))));
        i64 total = 0;
        for (int stage = 0; stage < k; ++stage) {
            const int levels = k - stage - 1;
            total += (i64(1) << (2 * levels)) * 4 * (n + 8);
        }
        return total;
    }
    return 64 * q * n;  // MLE mode
}

SecretKey kuperberg_solve(std::vector<LabeledQubit> qubits, i64 q, int n, Rng& rng) {
    const i64 needed = kuperberg_budget(n, q);
    if (static_cast<i64>(qubits.size()) < needed)
        throw std::runtime_error("kuperberg_solve: insufficient qubits, need >= " +
                                 std::to_string(needed) + ", got " + std::to_string(qubits.size()));
    if (is_power_of_two(q)) return kuperberg_power_of_two(std::move(qubits), q, n, rng);
    if (is_prime(q) && q <= 64) return kuperberg_mle(std::move(qubits), q, n, rng);
    throw std::invalid_argument("kuperberg_solve: q must be 2^k, or an odd prime <= 64");
}

namespace {

bool is_errorless(const AmplitudeSpec& spec) {
    const auto table = normalized_table(spec);
    int nonzero = 0;
    for (const auto& v : table.values)
        if (std::abs(v) > 1e-12) ++nonzero;
    return nonzero == 1;
}

SecretKey solve_errorless(const std::vector<SlweSample>& samples, const AmplitudeSpec& spec, i64 q,
                          int n) {
    // The state is |<a,s> + e0 mod q> exactly; read it off and solve mod q.
    const auto table = normalized_table(spec);
    i64 e0 = 0;
    for (i64 i = 0; i < table.grid.size(); ++i)
        if (std::abs(table.values[i]) > 1e-12) {
            e0 = static_cast<i64>(std::llround(table.grid.value(i)));
            break;
        }
    std::vector<i64> A, b;
    int rows = 0;
    for (const auto& sample : samples) {
        const auto marg = marginals(sample.state, 0);
        const i64 outcome =
            std::max_element(marg.begin(), marg.end()) - marg.begin();
        for (int i = 0; i < n; ++i) A.push_back(sample.a[i]);
        b.push_back(((outcome - e0) % q + q) % q);
        if (++rows >= 4 * n + 8) break;
    }
    auto sol = solve_linear_mod(A, b, rows, n, q);
    if (!sol) throw std::runtime_error("solve_slwe: errorless linear system not solvable");
    SecretKey out;
    out.s.resize(n);
    for (int i = 0; i < n; ++i) out.s[i] = centered_mod((*sol)[i], q);
    return out;
}

}  // namespace

SecretKey solve_slwe(const std::vector<SlweSample>& samples, const AmplitudeSpec& spec, i64 q, int n,
                     Rng& rng) {
    if (samples.empty()) throw std::invalid_argument("solve_slwe: no samples");
    if (is_errorless(spec)) return solve_errorless(samples, spec, q, n);
    HeavyPair pair = find_heavy_pair(spec, q, 0.05);
    std::vector<LabeledQubit> qubits;
    qubits.reserve(samples.size() / 2);
    for (const auto& sample : samples) {
        auto qb = slwe_to_dcp(sample, pair, rng);
        if (qb) qubits.push_back(std::move(*qb));
    }
    return kuperberg_solve(std::move(qubits), q, n, rng);
}

}  // namespace qlab
