#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qlab/gaussian.hpp"
#include "qlab/reductions.hpp"
#include "qlab/stats.hpp"

using namespace qlab;

namespace {

constexpr double kPi = std::numbers::pi;

EdcpParams desk_params() {
    EdcpParams p;
    p.n = 1;
    p.m = 4;
    p.q = 9;
    p.alpha = 1.0;
    p.beta = 1.2 / 9.0;
    p.gamma = 0.06;
    return p;
}

// Seeded A with a healthy lambda_1 (mirrors the experiment setup).
std::vector<i64> good_A(const EdcpParams& p, std::uint64_t seed) {
    Rng rng(seed);
    double best = -1;
    std::vector<i64> bestA;
    for (int tries = 0; tries < 300; ++tries) {
        std::vector<i64> A(p.n * p.m);
        for (auto& v : A) v = static_cast<i64>(rng.below(p.q));
        if (!lambda1_inf_check(A, p.n, p.m, p.q)) continue;
        const double lam = lambda1_l2(A, p.n, p.m, p.q);
        if (lam > best) {
            best = lam;
            bestA = A;
        }
    }
    return bestA;
}

}  // namespace

TEST_CASE("edcp_sigma_c closed forms") {
    EdcpParams p = desk_params();
    p.alpha = 4.0;
    p.beta = 8.0 / 9.0;  // beta q = 8
    SUBCASE("x orthogonal to e gives c = 0") {
        auto [sigma, c] = edcp_sigma_c(p, {1, 0, 0, 0}, {0, 3, -2, 1});
        CHECK(c == doctest::Approx(0.0));
        (void)sigma;
    }
    SUBCASE("e = 0 gives sigma = alpha and c = 0") {
        auto [sigma, c] = edcp_sigma_c(p, {0, 0, 0, 0}, {1, 2, 0, 0});
        CHECK(sigma == doctest::Approx(4.0));
        CHECK(c == doctest::Approx(0.0));
    }
    SUBCASE("worked values at alpha=4, beta q=8") {
        auto [sigma, c] = edcp_sigma_c(p, {1, 0, 0, 0}, {2, 0, 0, 0});
        CHECK(sigma == doctest::Approx(32.0 / std::sqrt(80.0)).epsilon(1e-12));
        CHECK(c == doctest::Approx(-0.4).epsilon(1e-12));
    }
    SUBCASE("sigma stays in (alpha/sqrt2, alpha]") {
        Rng rng(3);
        for (int t = 0; t < 200; ++t) {
            std::vector<i64> e(4), x(4);
            for (auto& v : e) v = static_cast<i64>(rng.below(3)) - 1;
            for (auto& v : x) v = static_cast<i64>(rng.below(5)) - 2;
            // the range statement applies only when alpha ||e|| <= beta q
            double e2 = 0;
            for (i64 v : e) e2 += v * v;
            if (p.alpha * std::sqrt(e2) > p.beta * p.q) continue;
            auto [sigma, c] = edcp_sigma_c(p, e, x);
            CHECK(sigma > p.alpha / std::sqrt(2.0) - 1e-12);
            CHECK(sigma <= p.alpha + 1e-12);
            (void)c;
        }
    }
}

TEST_CASE("edcp amplitude identity is algebraic") {
    // rho_alpha(j) rho_{beta q}(x + j e) = C(x) rho_sigma(j - c), pointwise
    EdcpParams p = desk_params();
    const std::vector<i64> e = {1, 0, 0, 0};
    const std::vector<i64> x = {2, -1, 0, 1};
    auto [sigma, c] = edcp_sigma_c(p, e, x);
    const double bq = p.beta * p.q;
    // C(x): evaluate at j = 0
    double x2 = 0;
    for (i64 v : x) x2 += v * v;
    const double C = std::exp(-kPi * x2 / (bq * bq)) / rho(sigma, -c);
    for (i64 j = -6; j <= 6; ++j) {
        double shifted2 = 0;
        for (size_t i = 0; i < x.size(); ++i) {
            const double v = static_cast<double>(x[i]) + static_cast<double>(j) * e[i];
            shifted2 += v * v;
        }
        const double lhs = rho(p.alpha, static_cast<double>(j)) * std::exp(-kPi * shifted2 / (bq * bq));
        const double rhs = C * rho(sigma, static_cast<double>(j) - c);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("lwe_to_edcp") {
    EdcpParams p = desk_params();
    auto A = good_A(p, 99);
    REQUIRE(!A.empty());
    SUBCASE("zero error gives c = 0 and amplitudes proportional to rho_alpha") {
        Rng rng(5);
        std::vector<i64> s = {4};
        std::vector<i64> b(p.m);
        for (int col = 0; col < p.m; ++col) b[col] = centered_mod(A[col] * s[0], p.q);
        auto sample = lwe_to_edcp(A, b, p, rng, LweWitness{s, {0, 0, 0, 0}});
        CHECK(sample.hidden.c == doctest::Approx(0.0));
        CHECK(sample.hidden.sigma == doctest::Approx(p.alpha));
        // residual line along v0 + j s carries rho_alpha(j)
        const i64 vdim = sample.state.shape().registers[1].size();
        double peak = 0;
        for (i64 j = 0; j < p.q; ++j) {
            const i64 vidx = ((sample.hidden.v[0] + centered_mod(j, p.q) * s[0]) % p.q + p.q) % p.q;
            const double a = std::abs(sample.state.amplitudes()[j * vdim + vidx]);
            peak = std::max(peak, a);
            const double want = rho(p.alpha, static_cast<double>(centered_mod(j, p.q)));
            if (want > 1e-6)
                CHECK(a / std::abs(sample.state.amplitudes()[0 * vdim +
                                                             ((sample.hidden.v[0]) % p.q + p.q) % p.q]) ==
                      doctest::Approx(want).epsilon(1e-9));
        }
        CHECK(peak > 0);
    }
    SUBCASE("regime flag reflects the lambda1 check") {
        Rng rng(6);
        std::vector<i64> s = {2};
        std::vector<i64> b(p.m);
        for (int col = 0; col < p.m; ++col) b[col] = centered_mod(A[col] * s[0] + (col == 0), p.q);
        auto sample = lwe_to_edcp(A, b, p, rng);
        CHECK(sample.regime_ok);
    }
    SUBCASE("hidden v marginal is uniform") {
        std::vector<double> counts(p.q, 0.0);
        const int runs = 10000;
        std::vector<i64> s = {4};
        std::vector<i64> e = {1, 0, 0, 0};
        std::vector<i64> b(p.m);
        for (int col = 0; col < p.m; ++col) b[col] = centered_mod(A[col] * s[0] + e[col], p.q);
        for (int t = 0; t < runs; ++t) {
            Rng rng = Rng::derive(777, t);
            auto sample = lwe_to_edcp(A, b, p, rng, LweWitness{s, e});
            counts[((sample.hidden.v[0]) % p.q + p.q) % p.q] += 1.0;
        }
        const auto chi = chi_square_gof(counts, std::vector<double>(p.q, runs / double(p.q)));
        CHECK(chi.p_value > 0.01);
    }
}

TEST_CASE("edcp_to_slwe_phase on a synthetic state") {
    // c = 0 branch at q = 9, sigma = 3: trace distance to the plain Gaussian
    // S|LWE> is around 1.6e-4 (frozen from the direct Poisson evaluation).
    const i64 q = 9;
    const double sigma = 3.0;
    EdcpParams p = desk_params();
    RegisterShape shape({Register::cyclic(q), Register::cyclic(q)});
    const i64 v0 = 2, s0 = 4;
    std::vector<cplx> amp(q * q, cplx(0, 0));
    for (i64 j = 0; j < q; ++j) {
        const i64 vidx = ((v0 + centered_mod(j, q) * s0) % q + q) % q;
        amp[j * q + vidx] = rho(sigma, static_cast<double>(centered_mod(j, q)));
    }
    EdcpSample sample{std::vector<i64>(p.m, 0),
                      PureState(shape, std::move(amp)).normalized(),
                      EdcpHidden{{v0}, {0, 0, 0, 0}, sigma, 0.0},
                      true};
    Rng rng(11);
    auto out = edcp_to_slwe_phase(sample, p, rng);
    // ideal: plain Gaussian S|LWE> with width q/sigma centered at <a, s>
    const double wq = static_cast<double>(q) / sigma;
    std::vector<cplx> ideal(q, cplx(0, 0));
    const i64 as = ((out.a[0] * s0) % q + q) % q;
    for (i64 e = -40; e <= 40; ++e) ideal[((as + e) % q + q) % q] += rho(wq, static_cast<double>(e));
    RegisterShape one({Register::cyclic(q)});
    PureState ideal_state = PureState(one, std::move(ideal)).normalized();
    const double dist = trace_distance_pure(out.state, ideal_state);
    CHECK(dist <= 1e-3);
    CHECK(dist == doctest::Approx(1.575e-4).epsilon(0.05));
}

TEST_CASE("center_distribution_params") {
    EdcpParams p = desk_params();
    p.alpha = 4.0;
    p.beta = 8.0 / 9.0;
    SUBCASE("e = 0 collapses the center to zero width") {
        auto [step, sigma_c] = center_distribution_params(p, {0, 0, 0, 0});
        CHECK(sigma_c == doctest::Approx(0.0));
        CHECK(step > 0);
    }
    SUBCASE("worked value and the sigma_c identity") {
        auto [step, sigma_c] = center_distribution_params(p, {1, 0, 0, 0});
        CHECK(sigma_c == doctest::Approx(16.0 / std::sqrt(160.0)).epsilon(1e-12));
        auto [sigma, c] = edcp_sigma_c(p, {1, 0, 0, 0}, {0, 0, 0, 0});
        const double bq = p.beta * p.q;
        CHECK(sigma_c ==
              doctest::Approx(p.alpha * 1.0 / (std::sqrt(2.0) * bq) * sigma).epsilon(1e-12));
        (void)step;
        (void)c;
    }
}

TEST_CASE("guess_E_driver with a cheating oracle solver") {
    EdcpParams p = desk_params();
    auto A = good_A(p, 123);
    std::vector<i64> s_true = {4};  // centered in Z_9
    std::vector<i64> e = {1, 0, 0, 0};
    std::vector<i64> b(p.m);
    for (int col = 0; col < p.m; ++col) b[col] = centered_mod(A[col] * s_true[0] + e[col], p.q);
    double e2 = 0;
    for (i64 v : e) e2 += v * v;
    const double bq = p.beta * p.q;
    const double sigma_true = p.alpha * bq / std::sqrt(p.alpha * p.alpha * e2 + bq * bq);
    SUBCASE("oracle answers only at the correct E; wrong-E rounds are rejected") {
        int calls = 0;
        SlwePhaseSolver oracle = [&](const std::vector<SlwePhaseView>& views,
                                     const AmplitudeSpec& f_E) -> std::optional<SecretKey> {
            ++calls;
            CHECK(!views.empty());
            const auto* g = std::get_if<RealGaussian>(&f_E);
            REQUIRE(g != nullptr);
            const double sigmaE = static_cast<double>(p.q) / g->sigma;
            if (std::abs(sigmaE - sigma_true) < 1e-9) return SecretKey{s_true};
            // wrong guess: return a uniformly random wrong candidate
            Rng r(calls);
            SecretKey bad{{centered_mod(static_cast<i64>(r.below(p.q)), p.q)}};
            if (bad.s == s_true) bad.s[0] = centered_mod(bad.s[0] + 1, p.q);
            return bad;
        };
        Rng rng(17);
        auto got = guess_E_driver(A, b, p, 2, oracle, rng);
        CHECK(got.s == s_true);
        CHECK(calls >= 1);
    }
    SUBCASE("zero error takes the classical elimination fast path") {
        std::vector<i64> b0(p.m);
        for (int col = 0; col < p.m; ++col) b0[col] = centered_mod(A[col] * s_true[0], p.q);
        SlwePhaseSolver never = [&](const std::vector<SlwePhaseView>&,
                                    const AmplitudeSpec&) -> std::optional<SecretKey> {
            FAIL("solver must not be called on the errorless fast path");
            return std::nullopt;
        };
        Rng rng(19);
        auto got = guess_E_driver(A, b0, p, 2, never, rng);
        CHECK(got.s == s_true);
    }
    SUBCASE("verification rejects random wrong candidates") {
        Rng rng(23);
        const double threshold = 1.5 * std::sqrt(static_cast<double>(p.m)) * p.gamma * p.q;
        int rejected = 0;
        for (int t = 0; t < 50; ++t) {
            std::vector<i64> wrong = {centered_mod(static_cast<i64>(rng.below(p.q)), p.q)};
            if (wrong == s_true) wrong[0] = centered_mod(wrong[0] + 1, p.q);
            if (!verify_lwe_secret(A, b, wrong, p.n, p.m, p.q, threshold)) ++rejected;
        }
        CHECK(rejected >= 49);
    }
}

TEST_CASE("width_grid") {
    SUBCASE("m = 1 endpoints") {
        auto g = width_grid(1.0, 10, 1);
        REQUIRE(g.size() == 3);
        CHECK(g.front() == doctest::Approx(10.0));
        CHECK(g[1] == doctest::Approx(10.0 * (1.0 + (std::sqrt(2.0) - 1.0) / 2.0)));
        CHECK(g.back() == doctest::Approx(10.0 * std::sqrt(2.0)));
    }
    SUBCASE("alpha q = 10, m = 2 frozen values") {
        auto g = width_grid(1.0, 10, 2);
        const std::vector<double> want = {10.0, 11.03553, 12.07107, 13.10660, 14.14214};
        REQUIRE(g.size() == want.size());
        for (size_t i = 0; i < g.size(); ++i) CHECK(g[i] == doctest::Approx(want[i]).epsilon(1e-6));
    }
    SUBCASE("the grid covers (alpha q, sqrt2 alpha q]") {
        auto g = width_grid(0.19, 5, 3);
        Rng rng(3);
        for (int t = 0; t < 100; ++t) {
            const double sp = g.front() + (g.back() - g.front()) * (rng.u01() * 0.999 + 1e-6);
            bool covered = false;
            for (size_t i = 0; i + 1 < g.size(); ++i)
                covered = covered || (g[i] < sp && sp <= g[i + 1] + 1e-12);
            CHECK(covered);
        }
    }
}

TEST_CASE("regev sample generation") {
    LatticeBasis L = LatticeBasis::integers();
    const i64 q = 5;
    const double alpha = 0.19;
    const double r = 48.0;
    const double sigma = width_grid(alpha, q, 2)[0];
    SUBCASE("x on the dual lattice gives t = sigma and a real Gaussian state") {
        Rng rng(31);
        auto rec = regev_generate_sample(L, {1.0}, q, alpha, sigma, r, 64, rng);
        CHECK(rec.t == doctest::Approx(sigma));
        CHECK(rec.x_prime[0] == doctest::Approx(0.0));
        for (const auto& entry : rec.ensemble) {
            // phases vanish: amplitudes real up to global phase
            const auto& amp = entry.u_state.amplitudes();
            i64 imax = 0;
            for (i64 i = 0; i < entry.u_state.dimension(); ++i)
                if (std::abs(amp[i]) > std::abs(amp[imax])) imax = i;
            const cplx ph = amp[imax] / std::abs(amp[imax]);
            for (i64 i = 0; i < entry.u_state.dimension(); ++i)
                CHECK(std::abs((amp[i] / ph).imag()) < 1e-9);
        }
    }
    SUBCASE("off-grid x rejected") {
        Rng rng(32);
        CHECK_THROWS(regev_generate_sample(L, {0.01771}, q, alpha, sigma, r, 64, rng));
    }
    SUBCASE("smoothing floor enforced") {
        Rng rng(33);
        CHECK_THROWS(regev_generate_sample(L, {0.015625}, q, alpha, sigma, 20.0, 64, rng));
    }
    SUBCASE("per-y states match the continuum closed form at the oracle level") {
        Rng rng(34);
        const i64 R = 128;
        const double xstar = 0.0179;
        const double x = std::round(xstar * R) / R;
        auto rec = regev_generate_sample(L, {x}, q, alpha, sigma, r, R, rng);
        double wmean = 0;
        for (const auto& entry : rec.ensemble) {
            const double z = static_cast<double>(entry.y[0]) / R -
                             std::round(static_cast<double>(entry.y[0]) / R * q) / q;
            const double coef = r * r * rec.x_prime[0] * z / (rec.t * rec.t);
            wmean += entry.probability * regev_continuum_distance(entry.u_state, rec.t, coef, 0, q, R);
        }
        CHECK(wmean <= 0.01);
        CHECK(wmean > 0.0);
    }
}

TEST_CASE("verify_tail_bounds") {
    SUBCASE("margins are positive on Z at sigma = 8 with the proof epsilons") {
        auto rep = verify_tail_bounds(LatticeBasis::integers(), {8.0},
                                      {{0.0}, {0.1}, {0.25}, {0.4}, {0.5}});
        CHECK(rep.all_pass);
        for (const auto& pt : rep.points) {
            CHECK_FALSE(pt.skipped);
            CHECK(pt.margin_add > 0);
            CHECK(pt.margin_mul > 0);
        }
    }
    SUBCASE("u on the dual lattice leaves margin ~ eps") {
        auto rep = verify_tail_bounds(LatticeBasis::integers(), {6.0}, {{0.0}});
        REQUIRE(rep.points.size() == 1);
        const auto& pt = rep.points[0];
        CHECK(pt.margin_add == doctest::Approx(pt.eps_add - pt.tail));
        CHECK(pt.tail < pt.eps_add);
    }
    SUBCASE("margins shrink toward the deep hole") {
        // sigma = 4 keeps the near-hole tails above double resolution
        auto rep = verify_tail_bounds(LatticeBasis::integers(), {4.0},
                                      {{0.3}, {0.4}, {0.45}, {0.5}});
        for (size_t i = 0; i + 1 < rep.points.size(); ++i)
            CHECK(rep.points[i].margin_add > rep.points[i + 1].margin_add);
    }
}

TEST_CASE("lattice helpers") {
    LatticeBasis Z = LatticeBasis::integers();
    CHECK(lattice_lambda1(Z) == doctest::Approx(1.0));
    CHECK(lattice_lambda1(LatticeBasis::scaled_integers(2.0)) == doctest::Approx(2.0));
    CHECK(lattice_kappa(Z, {3.4})[0] == doctest::Approx(3.0));
    CHECK(dist_to_lattice(Z, {3.4}) == doctest::Approx(0.4));
    // eta_eps(Z) at eps = 1e-6: 2 exp(-pi s^2) = 1e-6 -> s ~ 2.1486
    const double eta = eta_eps(Z, 1e-6);
    CHECK(dual_rho_tail(Z, eta) <= 1e-6);
    CHECK(dual_rho_tail(Z, eta * 0.995) > 1e-6);
    CHECK(eta == doctest::Approx(2.1487).epsilon(1e-3));
    // dual of 2Z is Z/2
    LatticeBasis halfZ = LatticeBasis::scaled_integers(2.0).dual();
    CHECK(halfZ.b[0] == doctest::Approx(0.5));
}
