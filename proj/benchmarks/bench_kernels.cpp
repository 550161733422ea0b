#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "qlab/kernels.hpp"
#include "qlab/rng.hpp"

namespace {

using qlab::kernels::cplx;

struct Fixture {
    std::vector<cplx> in, out, M;
    std::int64_t q, outer, stride;

    Fixture(std::int64_t q_, std::int64_t outer_, std::int64_t stride_)
        : q(q_), outer(outer_), stride(stride_) {
        qlab::Rng rng(42);
        in.resize(q * outer * stride);
        out.resize(in.size());
        M.resize(q * q);
        for (auto& v : in) v = cplx(rng.u01() - 0.5, rng.u01() - 0.5);
        for (auto& v : M) v = cplx(rng.u01() - 0.5, rng.u01() - 0.5);
    }
};

void BM_apply_matrix_serial(benchmark::State& state) {
    Fixture f(state.range(0), state.range(1), state.range(2));
    for (auto _ : state) {
        qlab::kernels::apply_register_matrix_serial(f.in.data(), f.out.data(), f.M.data(), f.q,
                                                    f.outer, f.stride);
        benchmark::ClobberMemory();
    }
}

void BM_apply_matrix_parallel(benchmark::State& state) {
    Fixture f(state.range(0), state.range(1), state.range(2));
    for (auto _ : state) {
        qlab::kernels::apply_register_matrix_parallel(f.in.data(), f.out.data(), f.M.data(), f.q,
                                                      f.outer, f.stride);
        benchmark::ClobberMemory();
    }
}

void BM_marginals_serial(benchmark::State& state) {
    Fixture f(state.range(0), state.range(1), state.range(2));
    std::vector<double> marg(f.q);
    for (auto _ : state) {
        qlab::kernels::register_marginals_serial(f.in.data(), marg.data(), f.q, f.outer, f.stride);
        benchmark::ClobberMemory();
    }
}

void BM_marginals_parallel(benchmark::State& state) {
    Fixture f(state.range(0), state.range(1), state.range(2));
    std::vector<double> marg(f.q);
    for (auto _ : state) {
        qlab::kernels::register_marginals_parallel(f.in.data(), marg.data(), f.q, f.outer,
                                                   f.stride);
        benchmark::ClobberMemory();
    }
}

}  // namespace

BENCHMARK(BM_apply_matrix_serial)->Args({64, 1, 2560})->Args({512, 1, 2560})->Args({6, 6, 279936});
BENCHMARK(BM_apply_matrix_parallel)->Args({64, 1, 2560})->Args({512, 1, 2560})->Args({6, 6, 279936});
BENCHMARK(BM_marginals_serial)->Args({64, 1, 2560})->Args({512, 1, 2560})->Args({6, 6, 279936});
BENCHMARK(BM_marginals_parallel)->Args({64, 1, 2560})->Args({512, 1, 2560})->Args({6, 6, 279936});

BENCHMARK_MAIN();
