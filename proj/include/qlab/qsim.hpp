#pragma once

#include <map>
#include <optional>
#include <utility>

#include "qlab/rng.hpp"
#include "qlab/state.hpp"

namespace qlab {

// QFT_q on one cyclic register: amp(y) = (1/sqrt q) sum_x w_q^{xy} amp(x).
PureState qft(const PureState& state, int reg);
PureState qft_inverse(const PureState& state, int reg);

// <phi|psi>; shapes must match.
cplx overlap(const PureState& phi, const PureState& psi);

// sqrt(1 - (|<phi|psi>| / (||phi|| ||psi||))^2), valid for un-normalized inputs.
double trace_distance_pure(const PureState& phi, const PureState& psi);

// l2 distance between unit vectors after aligning global phase:
// min_theta || phi/|phi| - e^{i theta} psi/|psi| ||. Computed by direct
// subtraction so that tiny distances are not lost to cancellation.
double aligned_l2_distance(const PureState& phi, const PureState& psi);

struct RejectionResult {
    std::optional<PureState> state;  // engaged on acceptance
    double success_probability;      // analytic M
};

// Quantum rejection sampling with gamma: label index -> [0,1] on `reg`.
RejectionResult rejection_sample(const PureState& state, int reg, const std::vector<double>& gamma,
                                 Rng& rng);

struct MeasureResult {
    i64 outcome;       // basis index on the measured register
    PureState state;   // collapsed, renormalized
    double probability;
};

// Computational-basis measurement of one register (Born rule).
MeasureResult measure(const PureState& state, int reg, Rng& rng);

// Exact marginal distribution of one register.
std::vector<double> marginals(const PureState& state, int reg);

// Measurement in a supplied orthonormal basis; basis[d] is the amplitude row
// of |psi_d> over the register's computational labels.
MeasureResult measure_in_basis(const PureState& state, int reg,
                               const std::vector<std::vector<cplx>>& basis, Rng& rng);

// Exact outcome distribution of measure_in_basis.
std::vector<double> basis_outcome_distribution(const PureState& state, int reg,
                                               const std::vector<std::vector<cplx>>& basis);

// Relabel-and-phase unitary on one register: map[x] = (new index, unit phase).
// Labels outside the map must carry no amplitude мass (<= tol * norm).
PureState apply_relabel_phase(const PureState& state, int reg,
                              const std::map<i64, std::pair<i64, cplx>>& map, double tol = 1e-12);

// Equality up to global phase, tolerance on the aligned l2 distance.
bool equal_up_to_phase(const PureState& a, const PureState& b, double tol);

}  // namespace qlab
