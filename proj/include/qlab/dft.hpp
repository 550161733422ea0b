#pragma once

#include <complex>
#include <vector>

#include "qlab/grid.hpp"
#include "qlab/zq.hpp"

namespace qlab {

using cplx = std::complex<double>;

// Complex table over an integer-step grid.
struct AmplitudeTable {
    CosetGrid grid;                // step must be 1 for dft_amplitude
    std::vector<cplx> values;      // values[i] = f(grid.value(i))
    double truncation_loss = 0.0;  // l2 mass discarded upstream

    double l2_norm() const;
    void l2_normalize();
};

// DFT_q(f)(j) = (1/sqrt q) sum_e f(e) w_q^{je}, j in Z_q (indices 0..q-1).
std::vector<cplx> dft_amplitude(const AmplitudeTable& f, const Modulus& q);

// Fold f into Z_q: F(j) = sum_{e == j mod q} f(e).
std::vector<cplx> fold_mod_q(const AmplitudeTable& f, i64 q);

}  // namespace qlab
