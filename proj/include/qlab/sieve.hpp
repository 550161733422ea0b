#pragma once

#include <optional>
#include <vector>

#include "qlab/amplitudes.hpp"

namespace qlab {

struct HeavyPair {
    i64 j1, j2;  // distinct, gcd(j1 - j2, q) = 1, indices in 0..q-1
    cplx g1, g2;
    double threshold;
};

// Step 1 of the solver: DFT the amplitude and pick two admissible heavy
// points, maximizing min(|g(j1)|, |g(j2)|) with lexicographic tie-break.
// Throws when no admissible pair clears the threshold.
HeavyPair find_heavy_pair(const AmplitudeSpec& f, i64 q, double threshold);

struct LabeledQubit {
    std::vector<i64> label;  // in Z_q^n
    PureState state;         // one cyclic Z_2 register
};

// Steps 2-4: QFT, rejection onto {j1, j2}, relabel to a phase qubit with
// label (j2 - j1) a. Success probability M = 2 min(|g1|, |g2|)^2.
std::optional<LabeledQubit> slwe_to_dcp(const SlweSample& sample, const HeavyPair& pair, Rng& rng);

// CNOT-combine two labeled qubits and measure the second; keeps the sum or
// difference label with the Born weights of the actual amplitudes (equal
// weights give 1/2 each). Consumes both inputs.
LabeledQubit sieve_combine(const LabeledQubit& x, const LabeledQubit& y, Rng& rng);

// Qubits needed by kuperberg_solve for given (n, q); empirical budget.
i64 kuperberg_budget(int n, i64 q);

// Full sieve: q = 2^k digit sieve with per-stage GF(2) solves, or the
// maximum-likelihood fallback for odd prime q <= 64.
SecretKey kuperberg_solve(std::vector<LabeledQubit> qubits, i64 q, int n, Rng& rng);

// End-to-end solver: heavy pair, conversion, sieve. Errorless amplitudes
// take the classical linear-algebra fast path.
SecretKey solve_slwe(const std::vector<SlweSample>& samples, const AmplitudeSpec& spec, i64 q, int n,
                     Rng& rng);

}  // namespace qlab
