#include "qlab/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "qlab/gaussian.hpp"
#include "qlab/kernels.hpp"

namespace qlab {

namespace {
constexpr double kPi = std::numbers::pi;
}

void EdcpParams::validate() const {
    if (n < 1 || m < 1 || q < 2) throw std::invalid_argument("EdcpParams: bad sizes");
    if (alpha <= 0 || beta <= 0 || gamma <= 0) throw std::invalid_argument("EdcpParams: bad rates");
    if (alpha + 1e-12 < alpha_floor)
        throw std::invalid_argument("EdcpParams: alpha below alpha_floor");
    if (strict_mode) {
        if (m < n * std::log2(static_cast<double>(q)))
            throw std::invalid_argument("EdcpParams: strict mode needs m >= n log2 q");
        const double lo = alpha * gamma * std::sqrt(static_cast<double>(m));
        const double hi =
            1.0 / (16.0 * std::sqrt(static_cast<double>(m) * std::log(beta * static_cast<double>(q))));
        if (!(lo < beta && beta < hi))
            throw std::invalid_argument("EdcpParams: strict mode needs alpha gamma sqrt(m) < beta < "
                                        "1/(16 sqrt(m ln(beta q)))");
    }
}

std::pair<double, double> edcp_sigma_c(const EdcpParams& params, const std::vector<i64>& e,
                                       const std::vector<i64>& x) {
    double e2 = 0, xe = 0;
    for (size_t i = 0; i < e.size(); ++i) {
        e2 += static_cast<double>(e[i]) * static_cast<double>(e[i]);
        xe += static_cast<double>(x[i]) * static_cast<double>(e[i]);
    }
    const double bq = params.beta * static_cast<double>(params.q);
    const double D = params.alpha * params.alpha * e2 + bq * bq;
    const double sigma = params.alpha * bq / std::sqrt(D);
    const double c = -params.alpha * params.alpha * xe / D;
    return {sigma, c};
}

std::pair<double, double> center_distribution_params(const EdcpParams& params,
                                                     const std::vector<i64>& e) {
    double e2 = 0;
    for (i64 v : e) e2 += static_cast<double>(v) * static_cast<double>(v);
    const double bq = params.beta * static_cast<double>(params.q);
    const double D = params.alpha * params.alpha * e2 + bq * bq;
    const double step = params.alpha * params.alpha / D;
    const double sigma_c = params.alpha * params.alpha * std::sqrt(e2) / std::sqrt(2.0 * D);
    return {step, sigma_c};
}

namespace {

// Enumerate integer vectors of dim m with l2 norm <= radius.
std::vector<std::vector<i64>> ball_points(int m, double radius) {
    std::vector<std::vector<i64>> out;
    const i64 lim = static_cast<i64>(std::floor(radius));
    std::vector<i64> cur(m, 0);
    std::function<void(int, double)> rec = [&](int pos, double norm2_left) {
        if (pos == m) {
            out.push_back(cur);
            return;
        }
        const i64 hw = static_cast<i64>(std::floor(std::sqrt(norm2_left)));
        for (i64 v = -std::min(lim, hw); v <= std::min(lim, hw); ++v) {
            cur[pos] = v;
            rec(pos + 1, norm2_left - static_cast<double>(v) * static_cast<double>(v));
        }
    };
    rec(0, radius * radius);
    return out;
}

i64 pow_i64(i64 base, int exp) {
    i64 out = 1;
    while (exp-- > 0) out *= base;
    return out;
}

double edcp_radius(const std::vector<i64>& A, const EdcpParams& params) {
    const double bq = params.beta * static_cast<double>(params.q);
    const double lam1 = lambda1_l2(A, params.n, params.m, params.q);
    return std::min(0.499 * lam1, 1.5 * bq * std::sqrt(static_cast<double>(params.m) *
                                                       std::log(std::max(bq, 2.0))));
}

}  // namespace

std::vector<std::vector<i64>> edcp_x_support(const std::vector<i64>& A, const EdcpParams& params) {
    return ball_points(params.m, edcp_radius(A, params));
}

EdcpSample lwe_to_edcp(const std::vector<i64>& A, const std::vector<i64>& b,
                       const EdcpParams& params, Rng& rng,
                       const std::optional<LweWitness>& witness) {
    params.validate();
    const int n = params.n, m = params.m;
    const i64 q = params.q;
    if (static_cast<int>(A.size()) != n * m || static_cast<int>(b.size()) != m)
        throw std::invalid_argument("lwe_to_edcp: shape mismatch");
    const double bq = params.beta * static_cast<double>(q);
    const bool regime_ok = lambda1_inf_check(A, n, m, q);
    const double radius = edcp_radius(A, params);
    if (radius < 1.0)
        throw std::invalid_argument("lwe_to_edcp: x-truncation radius degenerate (lambda1 too small)");
    const auto xs = ball_points(m, radius);

    // Sample the third-register measurement by drawing (j, v, x) from the
    // product Born weights and emitting y = (A^T v - j b + x) mod q; the
    // grouped contributions are disjoint so this is the exact outcome law.
    DiscreteGaussianTable jtab(CosetGrid::integers_about(0, q / 2), GaussianParam(params.alpha),
                               DiscreteGaussianTable::Weight::RhoSquared);
    std::vector<double> xw(xs.size()), xcdf(xs.size());
    double xtot = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        double n2 = 0;
        for (i64 v : xs[i]) n2 += static_cast<double>(v) * static_cast<double>(v);
        xw[i] = std::exp(-2.0 * kPi * n2 / (bq * bq));
        xtot += xw[i];
        xcdf[i] = xtot;
    }
    const double ux = rng.u01() * xtot;
    const size_t xi = std::lower_bound(xcdf.begin(), xcdf.end(), ux) - xcdf.begin();
    const i64 jdraw = static_cast<i64>(std::llround(jtab.sample_value(rng)));
    std::vector<i64> vdraw(n);
    for (int i = 0; i < n; ++i) vdraw[i] = static_cast<i64>(rng.below(q));
    std::vector<i64> y(m);
    for (int col = 0; col < m; ++col) {
        i64 acc = xs[xi][col] - jdraw * b[col];
        for (int row = 0; row < n; ++row) acc += A[row * m + col] * vdraw[row];
        y[col] = centered_mod(acc, q);
    }
    // Decompose y = A^T v0 + x0 with the minimum-norm lift: this is the EDCP
    // shift/offset pair (the drawn (v, x) sit before the change of variables).
    std::vector<i64> v0(n, 0), x0(m, 0);
    {
        const i64 vdim_dec = pow_i64(q, n);
        double best = 1e300;
        std::vector<i64> vv(n), lift(m);
        for (i64 vidx = 0; vidx < vdim_dec; ++vidx) {
            i64 tmp = vidx;
            for (int i = n - 1; i >= 0; --i) {
                vv[i] = tmp % q;
                tmp /= q;
            }
            double n2 = 0;
            for (int col = 0; col < m; ++col) {
                i64 acc = y[col];
                for (int row = 0; row < n; ++row) acc -= A[row * m + col] * vv[row];
                lift[col] = centered_mod(acc, q);
                n2 += static_cast<double>(lift[col]) * static_cast<double>(lift[col]);
            }
            if (n2 < best) {
                best = n2;
                v0 = vv;
                x0 = lift;
            }
        }
    }

    // Residual state over (j, v): amplitude rho_alpha(j) rho_{beta q}(x(j,v))
    // for the unique in-ball lift x(j,v) of y - A^T v + j b.
    const i64 vdim = pow_i64(q, n);
    RegisterShape shape({Register::cyclic(q), Register::cyclic(vdim)});
    std::vector<cplx> amp(q * vdim, cplx(0, 0));
    std::vector<i64> vvec(n);
    for (i64 vidx = 0; vidx < vdim; ++vidx) {
        i64 tmp = vidx;
        for (int i = n - 1; i >= 0; --i) {
            vvec[i] = tmp % q;
            tmp /= q;
        }
        for (i64 j = 0; j < q; ++j) {
            const i64 jc = centered_mod(j, q);
            double n2 = 0;
            bool in_ball = true;
            for (int col = 0; col < m && in_ball; ++col) {
                i64 acc = y[col] + jc * b[col];
                for (int row = 0; row < n; ++row) acc -= A[row * m + col] * vvec[row];
                const i64 lift = centered_mod(acc, q);
                const double lv = static_cast<double>(lift);
                n2 += lv * lv;
                // centered lift is the only candidate; radius < q/2 by construction
                if (std::abs(lv) > radius) in_ball = false;
            }
            if (!in_ball || n2 > radius * radius) continue;
            amp[j * vdim + vidx] =
                rho(params.alpha, static_cast<double>(jc)) * std::exp(-kPi * n2 / (bq * bq));
        }
    }
    PureState state = PureState(shape, std::move(amp)).normalized();

    EdcpHidden hidden;
    hidden.v = v0;
    hidden.x = x0;
    hidden.sigma = 0;
    hidden.c = 0;
    if (witness) {
        auto [sig, c] = edcp_sigma_c(params, witness->e, x0);
        hidden.sigma = sig;
        hidden.c = c;
    }
    return EdcpSample{std::move(y), std::move(state), std::move(hidden), regime_ok};
}

SlwePhaseSample edcp_to_slwe_phase(const EdcpSample& sample, const EdcpParams& params, Rng& rng) {
    const i64 q = params.q;
    const int n = params.n;
    const i64 vdim = sample.state.shape().registers[1].size();
    // QFT over Z_q^n on the v register: with the register flattened, apply the
    // tensor QFT as a dense vdim x vdim matrix (desk scale keeps vdim small).
    std::vector<cplx> F(vdim * vdim);
    std::vector<i64> da(n), db(n);
    for (i64 r = 0; r < vdim; ++r) {
        i64 tmp = r;
        for (int i = n - 1; i >= 0; --i) {
            da[i] = tmp % q;
            tmp /= q;
        }
        for (i64 c = 0; c < vdim; ++c) {
            tmp = c;
            for (int i = n - 1; i >= 0; --i) {
                db[i] = tmp % q;
                tmp /= q;
            }
            i64 dot = 0;
            for (int i = 0; i < n; ++i) dot += da[i] * db[i];
            const double ang = 2.0 * kPi * static_cast<double>(dot % q) / static_cast<double>(q);
            F[r * vdim + c] = cplx(std::cos(ang), std::sin(ang)) /
                              std::sqrt(static_cast<double>(vdim));
        }
    }
    const auto& shp = sample.state.shape();
    std::vector<cplx> rotated(sample.state.dimension());
    kernels::apply_register_matrix(sample.state.amplitudes().data(), rotated.data(), F.data(), vdim,
                                   shp.outer(1), shp.stride(1));
    PureState after_qft(shp, std::move(rotated), sample.state.truncation_loss());
    auto mv = measure(after_qft, 1, rng);
    std::vector<i64> ahat(n);
    {
        i64 tmp = mv.outcome;
        for (int i = n - 1; i >= 0; --i) {
            ahat[i] = tmp % q;
            tmp /= q;
        }
    }
    PureState jstate = qft(mv.state, 0);
    // Collapse the (now irrelevant) v register away.
    std::vector<cplx> jamp(q);
    for (i64 j = 0; j < q; ++j) jamp[j] = jstate.amplitudes()[j * vdim + mv.outcome];
    RegisterShape jshape({Register::cyclic(q)});
    PureState out_state = PureState(jshape, std::move(jamp)).normalized();
    std::vector<i64> a(n);
    for (int i = 0; i < n; ++i) a[i] = centered_mod(-ahat[i], q);
    SlwePhaseHidden hidden{sample.y, sample.hidden.c / static_cast<double>(q), sample.hidden.sigma};
    return SlwePhaseSample{std::move(a), sample.y, std::move(out_state), std::move(hidden)};
}

bool verify_lwe_secret(const std::vector<i64>& A, const std::vector<i64>& b,
                       const std::vector<i64>& s_candidate, int n, int m, i64 q, double threshold) {
    double n2 = 0;
    for (int col = 0; col < m; ++col) {
        i64 acc = b[col];
        for (int row = 0; row < n; ++row) acc -= A[row * m + col] * s_candidate[row];
        const double r = static_cast<double>(centered_mod(acc, q));
        n2 += r * r;
    }
    return std::sqrt(n2) <= threshold;
}

SecretKey guess_E_driver(const std::vector<i64>& A, const std::vector<i64>& b,
                         const EdcpParams& params, int ell, const SlwePhaseSolver& solver, Rng& rng) {
    const int n = params.n, m = params.m;
    const i64 q = params.q;
    const double bq = params.beta * static_cast<double>(q);
    const double gq = params.gamma * static_cast<double>(q);
    const double threshold = 1.5 * std::sqrt(static_cast<double>(m)) * gq;
    // Errorless instances degenerate the E loop: plain elimination first.
    {
        std::vector<i64> At(m * n);
        for (int col = 0; col < m; ++col)
            for (int row = 0; row < n; ++row) At[col * n + row] = A[row * m + col];
        auto direct = solve_linear_mod(At, b, m, n, q);
        if (direct) {
            std::vector<i64> cand(n);
            for (int i = 0; i < n; ++i) cand[i] = centered_mod((*direct)[i], q);
            if (verify_lwe_secret(A, b, cand, n, m, q, threshold)) return SecretKey{cand};
        }
    }
    const i64 E_max = std::max<i64>(
        1, static_cast<i64>(std::ceil(static_cast<double>(m) * gq * gq)));
    for (i64 E = 1; E <= E_max; ++E) {
        const double sigmaE =
            params.alpha * bq / std::sqrt(params.alpha * params.alpha * static_cast<double>(E) + bq * bq);
        AmplitudeSpec f_E = RealGaussian{static_cast<double>(q) / sigmaE};
        std::vector<SlwePhaseSample> samples;
        samples.reserve(ell);
        for (int i = 0; i < ell; ++i) {
            auto edcp = lwe_to_edcp(A, b, params, rng);
            samples.push_back(edcp_to_slwe_phase(edcp, params, rng));
        }
        std::vector<SlwePhaseView> views;
        views.reserve(samples.size());
        for (const auto& s : samples) views.push_back(public_view(s));
        auto cand = solver(views, f_E);
        if (!cand) continue;
        if (verify_lwe_secret(A, b, cand->s, n, m, q, threshold)) return *cand;
    }
    throw std::runtime_error("guess_E_driver: all E guesses exhausted without verified secret");
}

RegevSampleRecord regev_generate_sample(const LatticeBasis& L, const std::vector<double>& x, i64 q,
                                        double alpha, double sigma, double r, i64 R, Rng& rng) {
    if (L.dim > 2) throw std::invalid_argument("regev_generate_sample: dim <= 2 only");
    if (!(sigma >= alpha * static_cast<double>(q) - 1e-9 &&
          sigma <= std::sqrt(2.0) * alpha * static_cast<double>(q) + 1e-9))
        throw std::invalid_argument("regev_generate_sample: sigma outside [alpha q, sqrt2 alpha q]");
    const double eta = eta_eps(L, 1e-6);
    if (!(r > 4.0 * static_cast<double>(q) * eta))
        throw std::invalid_argument("regev_generate_sample: r below 4 q eta_eps(L) smoothing floor");
    const int dim = L.dim;
    // x must lie on L*/R.
    const LatticeBasis dual_R = L.dual().scaled(1.0 / static_cast<double>(R));
    {
        auto k = lattice_kappa(dual_R, x);
        double err = 0;
        for (int i = 0; i < dim; ++i) err = std::max(err, std::abs(k[i] - x[i]));
        if (err > 1e-9) throw std::invalid_argument("regev_generate_sample: x not on L*/R grid");
    }
    const auto kap = lattice_kappa(L.dual(), x);
    std::vector<double> xp(dim);
    for (int i = 0; i < dim; ++i) xp[i] = x[i] - kap[i];
    double xp2 = 0;
    for (double v : xp) xp2 += v * v;
    const double t = std::sqrt(sigma * sigma + r * r * xp2);

    // Enumerate v = L c within the truncation radius, grouped by a = c mod q.
    const double hw_v = truncation_radius(r);
    const i64 climit = static_cast<i64>(std::ceil(hw_v / std::abs(L.dim == 1 ? L.b[0] : 1.0))) + 1;
    std::vector<std::vector<i64>> coeffs;
    if (dim == 1) {
        for (i64 c = -climit; c <= climit; ++c) coeffs.push_back({c});
    } else {
        for (i64 c0 = -climit; c0 <= climit; ++c0)
            for (i64 c1 = -climit; c1 <= climit; ++c1) coeffs.push_back({c0, c1});
    }
    // Born draw of a from the rho^2 coset masses.
    const i64 adim = pow_i64(q, dim);
    std::vector<double> amass(adim, 0.0);
    std::vector<double> vnorm2(coeffs.size());
    for (size_t i = 0; i < coeffs.size(); ++i) {
        auto vv = L.vec(coeffs[i]);
        double n2 = 0;
        for (double u : vv) n2 += u * u;
        vnorm2[i] = n2;
        if (n2 > hw_v * hw_v) continue;
        i64 aidx = 0;
        for (int d = 0; d < dim; ++d) aidx = aidx * q + (((coeffs[i][d] % q) + q) % q);
        amass[aidx] += std::exp(-2.0 * kPi * n2 / (r * r));
    }
    double atot = 0;
    for (double v : amass) atot += v;
    double ua = rng.u01() * atot;
    i64 adraw = adim - 1;
    for (i64 i = 0; i < adim; ++i) {
        if (ua < amass[i]) {
            adraw = i;
            break;
        }
        ua -= amass[i];
    }
    std::vector<i64> avec(dim);
    {
        i64 tmp = adraw;
        for (int d = dim - 1; d >= 0; --d) {
            avec[d] = tmp % q;
            tmp /= q;
        }
    }

    // Joint state over (v mod R per coordinate, u-grid), restricted to the coset.
    const CosetGrid ugrid = CosetGrid::fractional_mod(q, R);
    const i64 qR = ugrid.size();
    const i64 vregs = pow_i64(R, dim);
    RegisterShape shape = (dim == 1)
                              ? RegisterShape({Register::cyclic(R), Register::from_grid(ugrid)})
                              : RegisterShape({Register::cyclic(R), Register::cyclic(R),
                                               Register::from_grid(ugrid)});
    std::vector<cplx> amp(vregs * qR, cplx(0, 0));
    std::vector<double> eenv(qR);
    for (i64 k = 0; k < qR; ++k) eenv[k] = rho(sigma, ugrid.value(k));
    for (size_t i = 0; i < coeffs.size(); ++i) {
        if (vnorm2[i] > hw_v * hw_v) continue;
        bool in_coset = true;
        for (int d = 0; d < dim; ++d)
            in_coset = in_coset && ((((coeffs[i][d] % q) + q) % q) == avec[d]);
        if (!in_coset) continue;
        auto vv = L.vec(coeffs[i]);
        const double w = rho(r, std::sqrt(vnorm2[i]));
        double ipd = 0;
        for (int d = 0; d < dim; ++d) ipd += x[d] * vv[d];
        // <x, v> is on the 1/R grid; the label shift in grid units is exact.
        const i64 shift = round_half_up(ipd * static_cast<double>(R));
        i64 vflat = 0;
        for (int d = 0; d < dim; ++d) {
            // v coordinates are integers (integer lattice); reduce mod R
            const i64 vcoord = static_cast<i64>(std::llround(vv[d]));
            vflat = vflat * R + (((vcoord % R) + R) % R);
        }
        for (i64 k = 0; k < qR; ++k) {
            const i64 lbl = ((k + shift) % qR + qR) % qR;
            amp[vflat * qR + lbl] += w * eenv[k];
        }
    }
    PureState joint = PureState(shape, std::move(amp)).normalized();
    for (int d = 0; d < dim; ++d) joint = qft(joint, d);

    // Exact per-y ensemble (no sampling: the record carries the full mixture).
    RegevSampleRecord rec;
    rec.a = avec;
    rec.r = r;
    rec.sigma = sigma;
    rec.t = t;
    rec.R = static_cast<double>(R);
    rec.x = x;
    rec.x_prime = xp;
    rec.basis = L;
    RegisterShape ushape({Register::from_grid(ugrid)});
    const auto& ja = joint.amplitudes();
    for (i64 y = 0; y < vregs; ++y) {
        double p = 0;
        for (i64 k = 0; k < qR; ++k) p += std::norm(ja[y * qR + k]);
        if (p < 1e-12) continue;
        std::vector<cplx> ua2(qR);
        for (i64 k = 0; k < qR; ++k) ua2[k] = ja[y * qR + k];
        std::vector<i64> yvec(dim);
        i64 tmp = y;
        for (int d = dim - 1; d >= 0; --d) {
            yvec[d] = tmp % R;
            tmp /= R;
        }
        rec.ensemble.push_back(
            {p, std::move(yvec), PureState(ushape, std::move(ua2)).normalized()});
    }
    return rec;
}

double regev_continuum_distance(const PureState& u_state, double t, double phase_coef,
                                i64 label_shift_mod_q, i64 q, i64 R, int oversample) {
    const auto& reg = u_state.shape().registers[0];
    const i64 qR = reg.size();
    const double h = 1.0 / static_cast<double>(R);
    // Step embedding of the state: value amp_k * sqrt(R) on cell k.
    const double state_norm = u_state.norm();
    // Cell integrals of the closed form at labels (shift + u) mod q: cell k
    // holds label value reg.value(k); the formula argument u satisfies
    // (shift + u) == label (mod q) with u in (-q/2, q/2].
    std::vector<cplx> cell(qR);
    double f_l2 = 0;
    cplx dot = 0;
    for (i64 k = 0; k < qR; ++k) {
        const double label = reg.label(k);
        const double u0 = centered_mod_real(label - static_cast<double>(label_shift_mod_q),
                                            static_cast<double>(q));
        cplx integral = 0;
        double l2 = 0;
        for (int s = 0; s < oversample; ++s) {
            const double u = u0 + ((s + 0.5) / oversample - 0.5) * h;
            const double mag = rho(t, u);
            const double ang = 2.0 * kPi * u * phase_coef;
            const cplx f = mag * cplx(std::cos(ang), std::sin(ang));
            integral += f;
            l2 += std::norm(f);
        }
        cell[k] = integral * (h / oversample);
        f_l2 += l2 * (h / oversample);
        dot += std::conj(u_state.amplitudes()[k] / state_norm * std::sqrt(static_cast<double>(R))) *
               cell[k];
    }
    const double fnorm = std::sqrt(f_l2);
    const double ov = std::abs(dot) / fnorm;
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * ov));
}

std::vector<double> width_grid(double alpha, i64 q, int m) {
    if (m < 1) throw std::invalid_argument("width_grid: m must be >= 1");
    std::vector<double> out;
    const double aq = alpha * static_cast<double>(q);
    for (int i = 0; i <= 2 * m; ++i)
        out.push_back(aq * (1.0 + (std::sqrt(2.0) - 1.0) * static_cast<double>(i) /
                                      (2.0 * static_cast<double>(m))));
    return out;
}

TailBoundReport verify_tail_bounds(const LatticeBasis& L, const std::vector<double>& sigmas,
                                   const std::vector<std::vector<double>>& us, double eps) {
    TailBoundReport report;
    report.all_pass = true;
    const LatticeBasis D = L.dual();
    const double lamD = lattice_lambda1(D);
    for (double sigma : sigmas) {
        const double eps_add = (eps > 0) ? eps : dual_rho_tail(L, sigma / 2.0);
        const double eps_mul = (eps > 0) ? eps : dual_rho_tail(L, sigma / (2.0 * std::sqrt(2.0)));
        // Preconditions sigma > 2 eta_{eps_add}, sigma > 2 sqrt2 eta_{eps_mul}:
        // rho_{1/s}(L* \ 0) at s = sigma/2 (resp sigma/(2 sqrt2)) must be <= eps.
        const bool pre_add = dual_rho_tail(L, sigma / 2.0) <= eps_add * (1.0 + 1e-12);
        const bool pre_mul =
            dual_rho_tail(L, sigma / (2.0 * std::sqrt(2.0))) <= eps_mul * (1.0 + 1e-12);
        for (const auto& u : us) {
            TailBoundPoint pt;
            pt.sigma = sigma;
            pt.u = u;
            pt.eps_add = eps_add;
            pt.eps_mul = eps_mul;
            pt.skipped = !(pre_add && pre_mul);
            if (pt.skipped) {
                pt.tail = pt.margin_add = pt.margin_mul = 0;
                report.points.push_back(pt);
                continue;
            }
            const auto kap = lattice_kappa(D, u);
            double dk2 = 0;
            for (int i = 0; i < D.dim; ++i) dk2 += (kap[i] - u[i]) * (kap[i] - u[i]);
            // tail = sum over L* \ {kappa} of rho_{1/sigma}(x - u)
            const i64 radius =
                std::max<i64>(3, static_cast<i64>(std::ceil(truncation_radius(1.0 / sigma) / lamD)) + 3);
            double tail = 0;
            auto kap_coeffs = D.coeffs_of(kap);
            if (D.dim == 1) {
                for (i64 k = kap_coeffs[0] - radius; k <= kap_coeffs[0] + radius; ++k) {
                    if (k == kap_coeffs[0]) continue;
                    const double d = D.vec({k})[0] - u[0];
                    tail += std::exp(-kPi * d * d * sigma * sigma);
                }
            } else {
                for (i64 k0 = kap_coeffs[0] - radius; k0 <= kap_coeffs[0] + radius; ++k0)
                    for (i64 k1 = kap_coeffs[1] - radius; k1 <= kap_coeffs[1] + radius; ++k1) {
                        if (k0 == kap_coeffs[0] && k1 == kap_coeffs[1]) continue;
                        auto v = D.vec({k0, k1});
                        const double d2 = (v[0] - u[0]) * (v[0] - u[0]) + (v[1] - u[1]) * (v[1] - u[1]);
                        tail += std::exp(-kPi * d2 * sigma * sigma);
                    }
            }
            pt.tail = tail;
            pt.margin_add = eps_add - tail;
            pt.margin_mul = eps_mul * std::exp(-kPi * dk2 * sigma * sigma / 2.0) - tail;
            report.all_pass = report.all_pass && pt.margin_add > 0 && pt.margin_mul > 0;
            report.points.push_back(pt);
        }
    }
    return report;
}

}  // namespace qlab
