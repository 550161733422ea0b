#include "doctest.h"
#include "qlab/rng.hpp"
#include "qlab/zq.hpp"

using namespace qlab;

TEST_CASE("centered representatives live in (-q/2, q/2]") {
    CHECK(centered_mod(0, 4) == 0);
    CHECK(centered_mod(2, 4) == 2);   // q/2 included
    CHECK(centered_mod(3, 4) == -1);
    CHECK(centered_mod(-2, 4) == 2);
    CHECK(centered_mod(7, 9) == -2);
    CHECK(centered_mod(-13, 9) == -4);
}

TEST_CASE("rounding ties go upward") {
    CHECK(round_half_up(2.5) == 3);
    CHECK(round_half_up(-2.5) == -2);
    CHECK(round_half_up(2.49) == 2);
    CHECK(round_to_multiple(4.5, 3) == 6);   // tie between 3 and 6
    CHECK(round_to_multiple(-4.5, 3) == -3);
    CHECK(round_to_multiple(7.4, 4) == 8);
}

TEST_CASE("crt_combine examples") {
    CHECK(crt_combine({{2, 3}, {3, 5}}) == 8);
    CHECK(crt_combine({{0, 3}, {0, 5}}) == 0);
    // exhaustive-scan oracle over 0..59 confirms 53 for the third system
    i64 expect = -1;
    for (i64 v = 0; v < 60; ++v)
        if (v % 3 == 2 && v % 5 == 3 && v % 4 == 1) expect = v;
    CHECK(expect == 53);
    CHECK(crt_combine({{2, 3}, {3, 5}, {1, 4}}) == 53);
    CHECK_THROWS(crt_combine({{1, 4}, {1, 6}}));  // gcd(4,6)=2
}

TEST_CASE("crt_combine inverts residue reduction") {
    Rng rng(7);
    const std::vector<i64> mods = {3, 5, 4, 7};
    i64 prod = 1;
    for (i64 m : mods) prod *= m;
    for (int trial = 0; trial < 200; ++trial) {
        const i64 v = static_cast<i64>(rng.below(prod));
        std::vector<std::pair<i64, i64>> residues;
        for (i64 m : mods) residues.emplace_back(v % m, m);
        CHECK(crt_combine(residues) == v);
    }
}

TEST_CASE("prime power factorization") {
    auto f = prime_power_factors(360);  // 2^3 * 3^2 * 5
    REQUIRE(f.size() == 3);
    CHECK(f[0] == std::pair<i64, i64>{8, 2});
    CHECK(f[1] == std::pair<i64, i64>{9, 3});
    CHECK(f[2] == std::pair<i64, i64>{5, 5});
}

TEST_CASE("solve_linear_mod over prime, prime power, and composite") {
    // 2x2 over Z_5
    {
        std::vector<i64> A = {1, 2, 3, 4};
        std::vector<i64> x = {2, 3};
        std::vector<i64> b = {(1 * 2 + 2 * 3) % 5, (3 * 2 + 4 * 3) % 5};
        auto sol = solve_linear_mod(A, b, 2, 2, 5);
        REQUIRE(sol.has_value());
        CHECK((*sol)[0] == 2);
        CHECK((*sol)[1] == 3);
    }
    // over Z_9 (prime power): pivot must be a unit mod 3
    {
        std::vector<i64> A = {2, 1, 1, 4};  // det = 7, unit mod 3
        std::vector<i64> x = {4, 7};
        std::vector<i64> b = {(2 * 4 + 1 * 7) % 9, (1 * 4 + 4 * 7) % 9};
        auto sol = solve_linear_mod(A, b, 2, 2, 9);
        REQUIRE(sol.has_value());
        CHECK((*sol)[0] == 4);
        CHECK((*sol)[1] == 7);
    }
    // composite 15 = 3 * 5 via CRT
    {
        std::vector<i64> A = {1, 1, 2, 9};  // det = 7, unit mod 15
        std::vector<i64> x = {11, 6};
        std::vector<i64> b = {(11 + 6) % 15, (2 * 11 + 9 * 6) % 15};
        auto sol = solve_linear_mod(A, b, 2, 2, 15);
        REQUIRE(sol.has_value());
        CHECK((*sol)[0] == 11);
        CHECK((*sol)[1] == 6);
    }
    // inconsistent overdetermined system -> nullopt
    {
        std::vector<i64> A = {1, 0, 1, 0, 0, 1};
        std::vector<i64> b = {1, 2, 0};
        CHECK_FALSE(solve_linear_mod(A, b, 3, 2, 5).has_value());
    }
    // rank-deficient -> nullopt
    {
        std::vector<i64> A = {1, 2, 2, 4};
        std::vector<i64> b = {1, 2};
        CHECK_FALSE(solve_linear_mod(A, b, 2, 2, 5).has_value());
    }
}

TEST_CASE("lambda1_inf_check examples") {
    // A = 0 matrix -> A^T s = 0, check fails
    CHECK_FALSE(lambda1_inf_check(std::vector<i64>(8, 0), 1, 8, 4));
    // n=1, q=4, all-ones row: every s gives entries of magnitude >= 1 = q/4
    CHECK(lambda1_inf_check(std::vector<i64>(8, 1), 1, 8, 4));
    // Monte Carlo at n=2, q=8, m = 2 n log2 q = 12: failures are rare
    Rng rng(11);
    int ok = 0;
    for (int t = 0; t < 100; ++t) {
        std::vector<i64> A(2 * 12);
        for (auto& v : A) v = static_cast<i64>(rng.below(8));
        ok += lambda1_inf_check(A, 2, 12, 8) ? 1 : 0;
    }
    CHECK(ok >= 95);
}

TEST_CASE("lambda1_l2 by enumeration") {
    // n=1, q=9, A=(1,3): shortest centered representative has norm 3 (s=3 or 6)
    std::vector<i64> A = {1, 3};
    CHECK(lambda1_l2(A, 1, 2, 9) == doctest::Approx(3.0));
}

TEST_CASE("modulus validates factors") {
    CHECK_NOTHROW(Modulus(15, {3, 5}));
    CHECK_THROWS(Modulus(15, {3, 6}));
    CHECK_THROWS(Modulus(12, {4, 6}));  // not coprime
    CHECK_THROWS(Modulus(1));
}
