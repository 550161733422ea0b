#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace qlab {

using i64 = std::int64_t;

// Modulus q >= 2, optionally with a pairwise-coprime factorization q = q_1 ... q_l.
struct Modulus {
    i64 q = 2;
    std::vector<i64> factors;  // empty when unfactored

    explicit Modulus(i64 q_in) : q(q_in) { validate(); }
    Modulus(i64 q_in, std::vector<i64> factors_in) : q(q_in), factors(std::move(factors_in)) {
        validate();
    }

  private:
    void validate() const;
};

// Representative of x mod q in (-q/2, q/2].
i64 centered_mod(i64 x, i64 q);
double centered_mod_real(double x, double q);

// Nearest-integer rounding; ties at a+0.5 round up (to a+1... i.e. toward +inf).
i64 round_half_up(double a);
// Nearest multiple of q; ties broken upward.
i64 round_to_multiple(double a, i64 q);

i64 gcd_i64(i64 a, i64 b);
// Extended gcd: returns g, sets (x, y) with a*x + b*y = g.
i64 ext_gcd(i64 a, i64 b, i64& x, i64& y);
// Inverse of a mod m; nullopt when gcd(a, m) != 1.
std::optional<i64> inv_mod(i64 a, i64 m);
i64 mul_mod(i64 a, i64 b, i64 m);

// Chinese remainder combination of pairwise-coprime residues.
// Input pairs (value, modulus); output in [0, prod moduli).
i64 crt_combine(const std::vector<std::pair<i64, i64>>& residues);

// Factor n into prime powers (trial division; n is desk-scale).
std::vector<std::pair<i64, i64>> prime_power_factors(i64 n);  // (p^e, p)

// Solve A x = b (mod m) for x in Z_m^n, A is k x n row-major with k >= n.
// General m via prime-power splitting + CRT. Requires the system to be
// full-rank and consistent mod every prime-power factor; otherwise nullopt.
std::optional<std::vector<i64>> solve_linear_mod(const std::vector<i64>& A, const std::vector<i64>& b,
                                                 int rows, int cols, i64 m);

// True iff every nonzero s in Z_q^n has ||A^T s mod q||_inf >= q/4 with
// centered representatives; A is n x m row-major. Throws when q^n exceeds
// the enumeration cap.
bool lambda1_inf_check(const std::vector<i64>& A, int n, int m, i64 q,
                       i64 enumeration_cap = i64(1) << 24);

// Exact lambda_1 of L_q(A) in l2 norm by enumeration over s in Z_q^n \ {0}
// (min of q and the shortest centered representative). Desk scale: q^n capped.
double lambda1_l2(const std::vector<i64>& A, int n, int m, i64 q,
                  i64 enumeration_cap = i64(1) << 24);

}  // namespace qlab
