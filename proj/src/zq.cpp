#include "qlab/zq.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qlab {

void Modulus::validate() const {
    if (q < 2) throw std::invalid_argument("Modulus: q must be >= 2");
    if (factors.empty()) return;
    i64 prod = 1;
    for (i64 f : factors) {
        if (f < 1) throw std::invalid_argument("Modulus: factors must be positive");
        prod *= f;
    }
    if (prod != q) throw std::invalid_argument("Modulus: factor product != q");
    for (size_t i = 0; i < factors.size(); ++i)
        for (size_t j = i + 1; j < factors.size(); ++j)
            if (gcd_i64(factors[i], factors[j]) != 1)
                throw std::invalid_argument("Modulus: factors not pairwise coprime");
}

i64 centered_mod(i64 x, i64 q) {
    i64 r = x % q;
    if (r < 0) r += q;
    if (2 * r > q) r -= q;
    return r;
}

double centered_mod_real(double x, double q) {
    double r = std::fmod(x, q);
    if (r <= -q / 2) r += q;
    if (r > q / 2) r -= q;
    return r;
}

i64 round_half_up(double a) { return static_cast<i64>(std::floor(a + 0.5)); }

i64 round_to_multiple(double a, i64 q) { return q * round_half_up(a / static_cast<double>(q)); }

i64 gcd_i64(i64 a, i64 b) {
    a = std::abs(a);
    b = std::abs(b);
    while (b) {
        i64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

i64 ext_gcd(i64 a, i64 b, i64& x, i64& y) {
    if (b == 0) {
        x = (a >= 0) ? 1 : -1;
        y = 0;
        return std::abs(a);
    }
    i64 x1, y1;
    i64 g = ext_gcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

std::optional<i64> inv_mod(i64 a, i64 m) {
    i64 x, y;
    i64 g = ext_gcd(((a % m) + m) % m, m, x, y);
    if (g != 1) return std::nullopt;
    return ((x % m) + m) % m;
}

i64 mul_mod(i64 a, i64 b, i64 m) {
    return static_cast<i64>((static_cast<__int128>(a) * b) % m);
}

i64 crt_combine(const std::vector<std::pair<i64, i64>>& residues) {
    if (residues.empty()) throw std::invalid_argument("crt_combine: empty input");
    i64 value = 0, modulus = 1;
    for (auto [r, m] : residues) {
        if (m < 1) throw std::invalid_argument("crt_combine: modulus must be positive");
        if (gcd_i64(modulus, m) != 1)
            throw std::invalid_argument("crt_combine: moduli not pairwise coprime");
        // value' = value (mod modulus), = r (mod m)
        i64 inv = *inv_mod(modulus % m, m);
        i64 diff = (((r - value) % m) + m) % m;
        i64 k = mul_mod(diff, inv, m);
        value += modulus * k;
        modulus *= m;
        value %= modulus;
        if (value < 0) value += modulus;
    }
    return value;
}

std::vector<std::pair<i64, i64>> prime_power_factors(i64 n) {
    std::vector<std::pair<i64, i64>> out;
    for (i64 p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        i64 pe = 1;
        while (n % p == 0) {
            pe *= p;
            n /= p;
        }
        out.emplace_back(pe, p);
    }
    if (n > 1) out.emplace_back(n, n);
    return out;
}

namespace {

// Gaussian elimination for A x = b mod p^e (p prime). Pivots must be units
// mod p; rank-deficient or inconsistent systems return nullopt.
std::optional<std::vector<i64>> solve_prime_power(std::vector<i64> M, int rows, int cols, i64 pe,
                                                  i64 p) {
    const int w = cols + 1;  // augmented
    std::vector<int> pivot_col;
    int row = 0;
    for (int col = 0; col < cols && row < rows; ++col) {
        int sel = -1;
        for (int r = row; r < rows; ++r) {
            if (M[r * w + col] % p != 0) {
                sel = r;
                break;
            }
        }
        if (sel < 0) continue;
        for (int c = 0; c < w; ++c) std::swap(M[row * w + c], M[sel * w + c]);
        i64 inv = *inv_mod(M[row * w + col], pe);
        for (int c = 0; c < w; ++c) M[row * w + c] = mul_mod(M[row * w + c], inv, pe);
        for (int r = 0; r < rows; ++r) {
            if (r == row) continue;
            i64 f = M[r * w + col] % pe;
            if (!f) continue;
            for (int c = 0; c < w; ++c) {
                M[r * w + c] = ((M[r * w + c] - mul_mod(f, M[row * w + c], pe)) % pe + pe) % pe;
            }
        }
        pivot_col.push_back(col);
        ++row;
    }
    if (static_cast<int>(pivot_col.size()) < cols) return std::nullopt;  // not full rank
    for (int r = row; r < rows; ++r) {
        bool zero_row = true;
        for (int c = 0; c < cols; ++c) zero_row = zero_row && (M[r * w + c] % pe == 0);
        if (zero_row && M[r * w + cols] % pe != 0) return std::nullopt;  // inconsistent
        if (!zero_row) return std::nullopt;  // pivot existed only mod p, treat as unsolvable
    }
    std::vector<i64> x(cols, 0);
    for (size_t i = 0; i < pivot_col.size(); ++i) x[pivot_col[i]] = M[i * w + cols] % pe;
    return x;
}

}  // namespace

std::optional<std::vector<i64>> solve_linear_mod(const std::vector<i64>& A, const std::vector<i64>& b,
                                                 int rows, int cols, i64 m) {
    if (static_cast<int>(A.size()) != rows * cols || static_cast<int>(b.size()) != rows)
        throw std::invalid_argument("solve_linear_mod: shape mismatch");
    std::vector<std::pair<i64, i64>> parts;  // (solution_i per factor) recombined below
    auto factors = prime_power_factors(m);
    std::vector<std::vector<i64>> sols;
    for (auto [pe, p] : factors) {
        std::vector<i64> M(rows * (cols + 1));
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) M[r * (cols + 1) + c] = ((A[r * cols + c] % pe) + pe) % pe;
            M[r * (cols + 1) + cols] = ((b[r] % pe) + pe) % pe;
        }
        auto s = solve_prime_power(std::move(M), rows, cols, pe, p);
        if (!s) return std::nullopt;
        sols.push_back(std::move(*s));
    }
    std::vector<i64> x(cols);
    for (int c = 0; c < cols; ++c) {
        std::vector<std::pair<i64, i64>> res;
        for (size_t i = 0; i < factors.size(); ++i) res.emplace_back(sols[i][c], factors[i].first);
        x[c] = crt_combine(res);
    }
    return x;
}

namespace {

template <typename Fn>
void for_each_nonzero_s(int n, i64 q, i64 cap, Fn&& fn) {
    double total = std::pow(static_cast<double>(q), n);
    if (total > static_cast<double>(cap))
        throw std::invalid_argument("secret enumeration exceeds cap; use smaller n or q");
    std::vector<i64> s(n, 0);
    auto count = static_cast<i64>(total);
    for (i64 idx = 1; idx < count; ++idx) {
        i64 t = idx;
        for (int i = 0; i < n; ++i) {
            s[i] = t % q;
            t /= q;
        }
        fn(s);
    }
}

}  // namespace

bool lambda1_inf_check(const std::vector<i64>& A, int n, int m, i64 q, i64 enumeration_cap) {
    bool ok = true;
    for_each_nonzero_s(n, q, enumeration_cap, [&](const std::vector<i64>& s) {
        if (!ok) return;
        i64 norm_inf = 0;
        for (int col = 0; col < m; ++col) {
            i64 acc = 0;
            for (int row = 0; row < n; ++row) acc += A[row * m + col] * s[row];
            norm_inf = std::max(norm_inf, std::abs(centered_mod(acc, q)));
        }
        if (4 * norm_inf < q) ok = false;
    });
    return ok;
}

double lambda1_l2(const std::vector<i64>& A, int n, int m, i64 q, i64 enumeration_cap) {
    double best = static_cast<double>(q);  // q * e_1 is always in L_q(A)
    for_each_nonzero_s(n, q, enumeration_cap, [&](const std::vector<i64>& s) {
        double norm2 = 0;
        for (int col = 0; col < m; ++col) {
            i64 acc = 0;
            for (int row = 0; row < n; ++row) acc += A[row * m + col] * s[row];
            double v = static_cast<double>(centered_mod(acc, q));
            norm2 += v * v;
        }
        best = std::min(best, std::sqrt(norm2));
    });
    return best;
}

}  // namespace qlab
