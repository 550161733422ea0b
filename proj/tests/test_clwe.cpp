#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qlab/clwe.hpp"
#include "qlab/stats.hpp"

using namespace qlab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("psi basis") {
    SUBCASE("t = 1 is the 1x1 identity") {
        auto b = psi_basis(1);
        REQUIRE(b.size() == 1);
        CHECK(std::abs(b[0][0] - cplx(1, 0)) < 1e-15);
    }
    SUBCASE("t = 2 rows carry the e^{-i pi/2} cross terms and are unitary") {
        auto b = psi_basis(2);
        CHECK(std::abs(b[0][0] - cplx(1, 0) / std::sqrt(2.0)) < 1e-12);
        CHECK(std::abs(b[0][1] - cplx(0, -1) / std::sqrt(2.0)) < 1e-12);
        CHECK(std::abs(b[1][0] - cplx(0, -1) / std::sqrt(2.0)) < 1e-12);
        cplx gram = 0;
        for (int x = 0; x < 2; ++x) gram += std::conj(b[0][x]) * b[1][x];
        CHECK(std::abs(gram) < 1e-14);
    }
    SUBCASE("orthonormality across sizes") {
        for (i64 t : {2, 3, 5, 16, 101, 256}) {
            auto b = psi_basis(t);
            double worst = 0;
            for (i64 i = 0; i < t; ++i)
                for (i64 j = i; j < t; ++j) {
                    cplx acc = 0;
                    for (i64 x = 0; x < t; ++x) acc += std::conj(b[i][x]) * b[j][x];
                    worst = std::max(worst, std::abs(acc - (i == j ? 1.0 : 0.0)));
                }
            CHECK(worst <= 1e-12);
        }
        // t = 1024 spot checks (full Gram is cubic)
        auto b = psi_basis(1024);
        for (i64 i : {0, 17, 513}) {
            cplx self = 0, cross = 0;
            for (i64 x = 0; x < 1024; ++x) {
                self += std::conj(b[i][x]) * b[i][x];
                cross += std::conj(b[i][x]) * b[(i + 101) % 1024][x];
            }
            CHECK(std::abs(self - 1.0) <= 1e-12);
            CHECK(std::abs(cross) <= 1e-12);
        }
    }
}

TEST_CASE("exact_center_prob basics") {
    CHECK(exact_center_prob(1, 30.0, 4, 200.0) == doctest::Approx(1.0));
    // bound holds for every acceptance tuple
    const double p1 = exact_center_prob(5, 1200.0, 13, truncation_radius(1200.0));
    CHECK(p1 == doctest::Approx(0.9999956367).epsilon(1e-8));
    CHECK(p1 >= 1.0 - 8.0 * kPi * 5 * std::log(8.0) / 1200.0);
    const double p2 = exact_center_prob(3, 500.0, 7, truncation_radius(500.0));
    CHECK(p2 == doctest::Approx(0.9999916225).epsilon(1e-8));
    CHECK(p2 >= 1.0 - 8.0 * kPi * 3 * std::log(4.0) / 500.0);
}

TEST_CASE("center outcome distribution matches the state-level Born rule") {
    // cross-oracle: full double-sum vs the split-register basis measurement
    const double r = 30.0;
    const i64 t = 5;
    for (i64 c : {0, 2, 13}) {
        auto dist = center_outcome_distribution(t, r, c % t);
        const i64 hw = static_cast<i64>(std::ceil(truncation_radius(r)));
        auto psi = complex_gaussian_state(r, t, c, hw);
        // exact distribution via measuring high computationally then low in psi basis
        std::vector<double> state_dist(t, 0.0);
        const int draws = 20000;
        Rng rng(7);
        for (int i = 0; i < draws; ++i)
            state_dist[find_center(psi, t, rng)] += 1.0 / draws;
        for (i64 d = 0; d < t; ++d)
            CHECK(state_dist[d] == doctest::Approx(dist[d]).epsilon(0.0).scale(1.0).epsilon(0.05));
        double total = 0;
        for (double p : dist) total += p;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(dist[((c % t) + t) % t] == doctest::Approx(exact_center_prob(t, r, c, truncation_radius(r)))
                                              .epsilon(1e-9));
    }
}

TEST_CASE("block center sampler agrees with find_center statistics") {
    const double r = 40.0;
    const i64 t = 7;
    BlockCenterSampler sampler(r, t);
    const i64 c = 23;
    auto dist = center_outcome_distribution(t, r, c % t);
    Rng rng(19);
    const int draws = 50000;
    std::vector<double> counts(t, 0.0), expected(t, 0.0);
    for (int i = 0; i < draws; ++i) counts[sampler.sample_outcome(c, rng)] += 1.0;
    for (i64 d = 0; d < t; ++d) expected[d] = dist[d] * draws;
    const auto chi = chi_square_gof(counts, expected);
    CHECK(chi.p_value > 0.01);
    CHECK(sampler.correct_probability(c) == doctest::Approx(dist[((c % t) + t) % t]).epsilon(1e-9));
}

TEST_CASE("find_center end to end at the theorem scale") {
    const i64 t = 5;
    const double r = 1200.0;
    const i64 c = 13;
    const i64 hw = static_cast<i64>(std::ceil(r * std::sqrt(64.0 / (2.0 * kPi)))) + 1;
    auto psi = complex_gaussian_state(r, t, c, hw);
    Rng rng(29);
    int hits = 0;
    const int draws = 400;
    for (int i = 0; i < draws; ++i) hits += (find_center(psi, t, rng) == c % t) ? 1 : 0;
    CHECK(hits >= draws - 4);  // exact probability is 0.9999956
}

TEST_CASE("recover_block") {
    Rng rng(37);
    const int n = 4;
    const i64 qj = 5;
    const int cols = 32;  // 4 groups of 2n = 8
    SUBCASE("error-free observations recover exactly") {
        for (int trial = 0; trial < 20; ++trial) {
            ApproxObservation obs;
            obs.n = n;
            obs.cols = cols;
            obs.q_j = qj;
            obs.A.resize(n * cols);
            for (auto& v : obs.A) v = static_cast<i64>(rng.below(qj));
            std::vector<i64> s(n);
            for (auto& v : s) v = static_cast<i64>(rng.below(qj));
            obs.y_tilde.resize(cols);
            for (int c = 0; c < cols; ++c) {
                i64 acc = 0;
                for (int k = 0; k < n; ++k) acc += obs.A[k * cols + c] * s[k];
                obs.y_tilde[c] = ((acc % qj) + qj) % qj;
            }
            auto got = recover_block(obs);
            REQUIRE(got.has_value());
            CHECK(*got == s);
        }
    }
    SUBCASE("wrong-secret observations are rejected") {
        int rejections = 0;
        for (int trial = 0; trial < 50; ++trial) {
            ApproxObservation obs;
            obs.n = n;
            obs.cols = cols;
            obs.q_j = qj;
            obs.A.resize(n * cols);
            for (auto& v : obs.A) v = static_cast<i64>(rng.below(qj));
            std::vector<i64> s(n), s2(n);
            for (auto& v : s) v = static_cast<i64>(rng.below(qj));
            for (auto& v : s2) v = static_cast<i64>(rng.below(qj));
            if (s2 == s) s2[0] = (s2[0] + 1) % qj;
            obs.y_tilde.resize(cols);
            for (int c = 0; c < cols; ++c) {
                i64 acc = 0;
                for (int k = 0; k < n; ++k) acc += obs.A[k * cols + c] * s[k];
                obs.y_tilde[c] = ((acc % qj) + qj) % qj;
            }
            // verification of the wrong candidate on the paired group
            const int group = 2 * n;
            const int vi = cols / group / 2;
            int matches = 0;
            for (int row = 0; row < group; ++row) {
                const int c = vi * group + row;
                i64 pred = 0;
                for (int k = 0; k < n; ++k) pred += obs.A[k * cols + c] * s2[k];
                if (((pred % qj) + qj) % qj == obs.y_tilde[c]) ++matches;
            }
            if (static_cast<double>(matches) < 0.9 * group) ++rejections;
        }
        CHECK(rejections >= 49);
    }
}

TEST_CASE("construct_clwe sampled branch") {
    // small but in-regime parameters: recovery must reproduce the branch secret
    const i64 q1 = 101, q2 = 103;
    ClweParams params{1, 8, 2, Modulus(q1 * q2, {q1, q2}), 3000.0, 4.0, false};
    int ok = 0;
    for (int t = 0; t < 10; ++t) {
        Rng rng(300 + t);
        std::vector<i64> A(8);
        for (auto& v : A) v = static_cast<i64>(rng.below(params.q.q));
        auto res = construct_clwe_sampled(A, params, rng);
        if (res.recovered_ok) ++ok;
        // error marginal sanity: b - A^T s stays near zero relative to q
        for (int col = 0; col < 8; ++col) {
            const i64 c = centered_mod(A[col] * res.branch_s[0], params.q.q);
            const i64 err = centered_mod(res.b[col] - c, params.q.q);
            CHECK(std::abs(err) < 4500);  // ~ 5 sigma of (r/sqrt2)/sqrt(2 pi)
        }
    }
    CHECK(ok >= 8);
}

TEST_CASE("sampled-branch error marginal matches the rho^2 table") {
    const i64 q1 = 101, q2 = 103;
    ClweParams params{1, 8, 2, Modulus(q1 * q2, {q1, q2}), 3000.0, 4.0, false};
    std::map<i64, double> counts;
    const int runs = 4000;
    int made = 0;
    for (int t = 0; t < runs; ++t) {
        Rng rng(7000 + t);
        std::vector<i64> A(8);
        for (auto& v : A) v = static_cast<i64>(rng.below(params.q.q));
        auto res = construct_clwe_sampled(A, params, rng);
        ++made;
        for (int col = 0; col < 8; ++col) {
            const i64 c = centered_mod(A[col] * res.branch_s[0], params.q.q);
            counts[centered_mod(res.b[col] - c, params.q.q)] += 1.0;
        }
    }
    // chi-square against D_{Z, r/sqrt2}
    const double width = 3000.0 / std::sqrt(2.0);
    const i64 lim = 8000;
    std::vector<double> obs, expd;
    double norm = 0;
    for (i64 x = -lim; x <= lim; ++x) norm += rho(width, static_cast<double>(x));
    for (i64 x = -lim; x <= lim; ++x) {
        expd.push_back(rho(width, static_cast<double>(x)) / norm * made * 8);
        auto it = counts.find(x);
        obs.push_back(it == counts.end() ? 0.0 : it->second);
    }
    const auto chi = chi_square_gof(obs, expd);
    CHECK(chi.p_value > 0.01);
}

TEST_CASE("oblivious sampler record hygiene and determinism") {
    const i64 q1 = 101, q2 = 103;
    ClweParams params{1, 8, 2, Modulus(q1 * q2, {q1, q2}), 3000.0, 4.0, false};
    Rng arng(55);
    std::vector<i64> A(8);
    for (auto& v : A) v = static_cast<i64>(arng.below(params.q.q));
    auto s1 = oblivious_sample(A, params, 424242);
    auto s2 = oblivious_sample(A, params, 424242);
    CHECK(s1.b == s2.b);  // bit-reproducible given the seed
    const std::string json = oblivious_sample_to_json(s1);
    for (const char* key : {"\"n\"", "\"m\"", "\"q\"", "\"A\"", "\"b\"", "\"provenance\"",
                            "\"mode\"", "\"seed\""})
        CHECK(json.find(key) != std::string::npos);
    for (const char* bad : {"\"secret\"", "\"hidden\"", "\"theta\"", "\"branch_s\"", "\"s\":",
                            "\"x\":", "\"e\":"})
        CHECK(json.find(bad) == std::string::npos);
    // distinct seeds give distinct branch secrets with high probability
    int distinct = 0;
    for (int t = 0; t < 20; ++t) {
        auto w1 = oblivious_sample_instrumented(A, params, 1000 + t);
        auto w2 = oblivious_sample_instrumented(A, params, 5000 + t);
        if (w1.branch_s != w2.branch_s) ++distinct;
    }
    CHECK(distinct >= 18);
}

TEST_CASE("oblivious sampler with point-mass error is exact classical LWE") {
    // ell = 1, q prime, error delta_0: b = A^T s exactly
    ClweParams params{1, 8, 1, Modulus(13, {13}), 0.05, 4.0, false};
    Rng arng(66);
    std::vector<i64> A(8);
    for (auto& v : A) v = static_cast<i64>(arng.below(13));
    auto inst = oblivious_sample_instrumented(A, params, 777);
    for (int col = 0; col < 8; ++col) {
        const i64 want = centered_mod(A[col] * inst.branch_s[0], 13);
        CHECK(inst.sample.b[col] == want);
    }
}

TEST_CASE("modulus switching") {
    ClweParams params{1, 8, 2, Modulus(101 * 103, {101, 103}), 3000.0, 4.0, false};
    Rng arng(77);
    std::vector<i64> A(8);
    for (auto& v : A) v = static_cast<i64>(arng.below(params.q.q));
    auto inst = oblivious_sample_instrumented(A, params, 888);
    inst.sample.secret_width = 0.0;  // uniform secret: drift term vacuous at q'=q
    SUBCASE("q' = q with alpha' = alpha is the identity") {
        Rng rng(1);
        auto out = modulus_switch(inst.sample, inst.sample.q, inst.sample.alpha,
                                  inst.sample.alpha, 4.0, rng);
        CHECK(out.A == inst.sample.A);
        CHECK(out.b == inst.sample.b);
    }
    SUBCASE("condition violation names the inequality") {
        Rng rng(2);
        ObliviousSample tagged = inst.sample;
        tagged.secret_width = 50.0;
        try {
            modulus_switch(tagged, inst.sample.q / 2, inst.sample.alpha,
                           inst.sample.alpha, 4.0, rng);
            FAIL("expected parameter error");
        } catch (const std::invalid_argument& ex) {
            CHECK(std::string(ex.what()).find("alpha") != std::string::npos);
        }
    }
    SUBCASE("paper's worked-example scaling is satisfiable") {
        // q' ~ n^2 prime, r' ~ n^1.5, s ~ sqrt n at n = 64
        const int n = 64;
        const double s_w = std::sqrt(static_cast<double>(n));
        const i64 q_prime = 4099;  // ~ n^2
        const double rp = 8.0 * std::pow(n, 1.5);
        const double alpha_p = rp / (std::sqrt(2.0) * q_prime);
        const double alpha0 = 0.5 * alpha_p;
        CHECK(modulus_switch_condition(n, s_w, q_prime, alpha0, alpha_p, 4.0 * std::log(n)));
    }
}

TEST_CASE("switched error variance tracks (alpha' q')^2 / 2pi") {
    // q = 15015 = 3*5*7*11*13; switch to a prime near q/2.
    const i64 q = 15015;
    const i64 q_prime = 7507;  // prime
    const int m = 4000;
    const double alpha = 0.004;
    const double alpha_prime = 0.008;
    Rng rng(91);
    // synthetic oblivious-style samples with a known narrow secret
    const int n = 2;
    std::vector<i64> A(n * m);
    for (auto& v : A) v = static_cast<i64>(rng.below(q));
    std::vector<i64> s = {2, -3};
    DiscreteGaussianTable etab(CosetGrid::integers_about(0, 400), GaussianParam(alpha * q));
    ObliviousSample sample;
    sample.n = n;
    sample.m = m;
    sample.q = q;
    sample.A = A;
    sample.alpha = alpha;
    sample.secret_width = 4.0;
    sample.b.resize(m);
    for (int col = 0; col < m; ++col) {
        i64 acc = static_cast<i64>(std::llround(etab.sample_value(rng)));
        for (int k = 0; k < n; ++k) acc += A[k * m + col] * s[k];
        sample.b[col] = centered_mod(acc, q);
    }
    auto out = modulus_switch(sample, q_prime, alpha, alpha_prime, 4.0 * std::log(2.0), rng);
    double var = 0;
    for (int col = 0; col < m; ++col) {
        i64 acc = out.b[col];
        for (int k = 0; k < n; ++k) acc -= out.A[k * m + col] * s[k];
        const double e = static_cast<double>(centered_mod(acc, q_prime));
        var += e * e;
    }
    var /= m;
    const double want = std::pow(alpha_prime * q_prime, 2.0) / (2.0 * kPi);
    CHECK(var == doctest::Approx(want).epsilon(0.10));
}

TEST_CASE("coherent tiny construction stays close to the ideal state") {
    ClweParams params{1, 8, 2, Modulus(6, {2, 3}), 12.0, 4.0, false};
    for (int attempt = 0; attempt < 64; ++attempt) {
        Rng rng = Rng::derive(0xc0117u, attempt);
        std::vector<i64> A(8);
        for (auto& v : A) v = static_cast<i64>(rng.below(6));
        auto res = construct_clwe_coherent_tiny(A, params, rng);
        if (!res.recovery_usable) continue;
        CHECK(res.trace_distance <= 0.05);
        return;
    }
    FAIL("no usable A drawn");
}

TEST_CASE("state-level psi-basis Born matches the double-sum formula to 1e-10") {
    // split the one-register state into (high, low) exactly as find_center does
    const double r = 25.0;
    const i64 t = 5;
    const i64 c = 13;
    const i64 hw = static_cast<i64>(std::ceil(truncation_radius(r)));
    auto psi = complex_gaussian_state(r, t, c, hw);
    const auto& reg = psi.shape().registers[0];
    auto fdiv = [t](i64 x) { return (x >= 0) ? x / t : -((-x + t - 1) / t); };
    const i64 x0 = static_cast<i64>(std::llround(reg.grid.value(0)));
    const i64 x1 = static_cast<i64>(std::llround(reg.grid.value(psi.dimension() - 1)));
    const i64 kmin = fdiv(x0), kmax = fdiv(x1);
    RegisterShape split_shape(
        {Register::from_grid(CosetGrid{1.0, 0.0, kmin, kmax,
                                       static_cast<double>(std::max(std::abs(kmin), std::abs(kmax)))}),
         Register::cyclic(t)});
    std::vector<cplx> amp((kmax - kmin + 1) * t, cplx(0, 0));
    for (i64 i = 0; i < psi.dimension(); ++i) {
        const i64 x = static_cast<i64>(std::llround(reg.grid.value(i)));
        const i64 d = ((x % t) + t) % t;
        amp[((x - d) / t - kmin) * t + d] = psi.amplitudes()[i];
    }
    PureState split(split_shape, std::move(amp));
    const auto born = basis_outcome_distribution(split, 1, psi_basis(t));
    const auto formula = center_outcome_distribution(t, r, c % t);
    for (i64 d = 0; d < t; ++d) CHECK(std::abs(born[d] - formula[d]) <= 1e-10);
}
