#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace qlab::kernels {

using cplx = std::complex<double>;

// The state-vector hot loops. Each kernel has a serial reference and an
// OpenMP version; the unsuffixed entry point dispatches on the global flag.
// Register layout is row-major: for a register of size `q` at stride
// `stride`, amplitude (outer, x, inner) lives at (outer*q + x)*stride + inner.

void set_parallel(bool enabled);
bool parallel_enabled();

// out[(o*q + y)*stride + i] = sum_x M[y*q+x] * in[(o*q + x)*stride + i]
void apply_register_matrix_serial(const cplx* in, cplx* out, const cplx* M, std::int64_t q,
                                  std::int64_t outer, std::int64_t stride);
void apply_register_matrix_parallel(const cplx* in, cplx* out, const cplx* M, std::int64_t q,
                                    std::int64_t outer, std::int64_t stride);
void apply_register_matrix(const cplx* in, cplx* out, const cplx* M, std::int64_t q,
                           std::int64_t outer, std::int64_t stride);

// marg[x] = sum_{o,i} |in[(o*q + x)*stride + i]|^2
void register_marginals_serial(const cplx* in, double* marg, std::int64_t q, std::int64_t outer,
                               std::int64_t stride);
void register_marginals_parallel(const cplx* in, double* marg, std::int64_t q, std::int64_t outer,
                                 std::int64_t stride);
void register_marginals(const cplx* in, double* marg, std::int64_t q, std::int64_t outer,
                        std::int64_t stride);

// acc = sum_i conj(a[i]) * b[i]
cplx inner_product_serial(const cplx* a, const cplx* b, std::int64_t n);
cplx inner_product_parallel(const cplx* a, const cplx* b, std::int64_t n);
cplx inner_product(const cplx* a, const cplx* b, std::int64_t n);

double norm_squared(const cplx* a, std::int64_t n);

}  // namespace qlab::kernels
