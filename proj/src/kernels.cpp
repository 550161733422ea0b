#include "qlab/kernels.hpp"

#include <atomic>
#include <cmath>

namespace qlab::kernels {

namespace {
std::atomic<bool> g_parallel{true};
}

void set_parallel(bool enabled) { g_parallel.store(enabled); }
bool parallel_enabled() { return g_parallel.load(); }

void apply_register_matrix_serial(const cplx* in, cplx* out, const cplx* M, std::int64_t q,
                                  std::int64_t outer, std::int64_t stride) {
    for (std::int64_t o = 0; o < outer; ++o) {
        const cplx* base_in = in + o * q * stride;
        cplx* base_out = out + o * q * stride;
        for (std::int64_t y = 0; y < q; ++y) {
            const cplx* row = M + y * q;
            for (std::int64_t i = 0; i < stride; ++i) {
                cplx acc = 0;
                for (std::int64_t x = 0; x < q; ++x) acc += row[x] * base_in[x * stride + i];
                base_out[y * stride + i] = acc;
            }
        }
    }
}

void apply_register_matrix_parallel(const cplx* in, cplx* out, const cplx* M, std::int64_t q,
                                    std::int64_t outer, std::int64_t stride) {
    const std::int64_t slices = outer * stride;
#pragma omp parallel for schedule(static)
    for (std::int64_t sl = 0; sl < slices; ++sl) {
        const std::int64_t o = sl / stride;
        const std::int64_t i = sl % stride;
        const cplx* base_in = in + o * q * stride + i;
        cplx* base_out = out + o * q * stride + i;
        for (std::int64_t y = 0; y < q; ++y) {
            const cplx* row = M + y * q;
            cplx acc = 0;
            for (std::int64_t x = 0; x < q; ++x) acc += row[x] * base_in[x * stride];
            base_out[y * stride] = acc;
        }
    }
}

void apply_register_matrix(const cplx* in, cplx* out, const cplx* M, std::int64_t q,
                           std::int64_t outer, std::int64_t stride) {
    if (g_parallel.load() && outer * stride * q >= 4096)
        apply_register_matrix_parallel(in, out, M, q, outer, stride);
    else
        apply_register_matrix_serial(in, out, M, q, outer, stride);
}

void register_marginals_serial(const cplx* in, double* marg, std::int64_t q, std::int64_t outer,
                               std::int64_t stride) {
    for (std::int64_t x = 0; x < q; ++x) marg[x] = 0;
    for (std::int64_t o = 0; o < outer; ++o) {
        for (std::int64_t x = 0; x < q; ++x) {
            const cplx* base = in + (o * q + x) * stride;
            double acc = 0;
            for (std::int64_t i = 0; i < stride; ++i) acc += std::norm(base[i]);
            marg[x] += acc;
        }
    }
}

void register_marginals_parallel(const cplx* in, double* marg, std::int64_t q, std::int64_t outer,
                                 std::int64_t stride) {
#pragma omp parallel for schedule(static)
    for (std::int64_t x = 0; x < q; ++x) {
        double acc = 0;
        for (std::int64_t o = 0; o < outer; ++o) {
            const cplx* base = in + (o * q + x) * stride;
            for (std::int64_t i = 0; i < stride; ++i) acc += std::norm(base[i]);
        }
        marg[x] = acc;
    }
}

void register_marginals(const cplx* in, double* marg, std::int64_t q, std::int64_t outer,
                        std::int64_t stride) {
    if (g_parallel.load() && outer * stride >= 2048)
        register_marginals_parallel(in, marg, q, outer, stride);
    else
        register_marginals_serial(in, marg, q, outer, stride);
}

cplx inner_product_serial(const cplx* a, const cplx* b, std::int64_t n) {
    cplx acc = 0;
    for (std::int64_t i = 0; i < n; ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

cplx inner_product_parallel(const cplx* a, const cplx* b, std::int64_t n) {
    double re = 0, im = 0;
#pragma omp parallel for reduction(+ : re, im) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const cplx v = std::conj(a[i]) * b[i];
        re += v.real();
        im += v.imag();
    }
    return {re, im};
}

cplx inner_product(const cplx* a, const cplx* b, std::int64_t n) {
    if (g_parallel.load() && n >= 1 << 16) return inner_product_parallel(a, b, n);
    return inner_product_serial(a, b, n);
}

double norm_squared(const cplx* a, std::int64_t n) {
    double acc = 0;
    for (std::int64_t i = 0; i < n; ++i) acc += std::norm(a[i]);
    return acc;
}

}  // namespace qlab::kernels
