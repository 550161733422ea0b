#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlab/amplitudes.hpp"
#include "qlab/gaussian.hpp"
#include "qlab/qsim.hpp"
#include "qlab/rng.hpp"
#include "qlab/zq.hpp"

namespace qlab {

struct ClweParams {
    int n;
    int m;
    int ell;
    Modulus q;      // must carry ell pairwise-coprime factors
    double r;
    double log_slack = 4.0;  // finite-scale stand-in for the omega(log n) factor
    bool strict_mode = false;

    void validate() const;
    i64 block_modulus(int block) const { return q.factors.at(block); }
    int block_size() const { return m / ell; }
};

// Orthonormal rows |psi_d> = (1/sqrt t) sum_x e^{-pi i (x-d)^2 / t} |x>.
std::vector<std::vector<cplx>> psi_basis(i64 t);

// Center finding on a one-register integer-grid state: split labels into
// (high = floor(x/t), low = x mod t), measure high computationally and low in
// the psi basis; returns d in Z_t.
i64 find_center(const PureState& state, i64 t, Rng& rng);

// Exact Born probability of reading d = c mod t from the complex Gaussian
// state with envelope rho_r centered at c.
double exact_center_prob(i64 t, double r, i64 c, double truncation);

// Exact outcome distribution over (d - c) mod t; index 0 is the correct
// residue. Shared by the fast per-coordinate sampler and the tests.
std::vector<double> center_outcome_distribution(i64 t, double r, i64 c_mod_t);

// Fast per-coordinate machinery for the oblivious pipeline at scale: exact
// Born sampling of the center-finding outcome and of the emitted error,
// without materializing the (large) per-coordinate state vector.
class BlockCenterSampler {
  public:
    BlockCenterSampler(double r, i64 t);

    i64 sample_outcome(i64 c, Rng& rng) const;  // d in Z_t, exact Born law
    i64 sample_error(Rng& rng) const;           // x with prob ~ rho_{r/sqrt2}(x)
    double correct_probability(i64 c) const;
    i64 t() const { return t_; }

  private:
    double r_;
    i64 t_;
    i64 hw_;
    std::vector<double> env_;      // rho_r(x), x = -hw..hw
    std::vector<double> prefix2_;  // prefix sums of env^2
    std::vector<double> cos_, sin_;  // w_t^j lookup
    DiscreteGaussianTable error_table_;
};

struct ApproxObservation {
    std::vector<i64> A;        // n x (m/ell), row-major
    int n;
    int cols;
    std::vector<i64> y_tilde;  // length cols, centered mod q_j
    i64 q_j;
};

// Algorithm B: partition into n x 2n groups, solve by Gaussian elimination
// (per-prime-power with CRT recombination), verify on the paired second-half
// group at the 0.9 threshold.
std::optional<std::vector<i64>> recover_block(const ApproxObservation& obs);

enum class ClweMode { SampledBranch, CoherentTiny };

struct SampledBranchResult {
    std::vector<i64> branch_s;    // witness; test/introspection only
    std::vector<i64> b;           // measured labels, centered mod q
    std::vector<i64> s_recovered; // empty on failure
    bool recovered_ok = false;
};

SampledBranchResult construct_clwe_sampled(const std::vector<i64>& A, const ClweParams& params,
                                           Rng& rng);

struct CoherentTinyResult {
    double trace_distance;   // output vs ideal |phi>
    bool recovery_usable;    // solve groups invertible for the drawn A
};

// Full coherent construction at tiny scale (n = 1): builds |phi_0>, runs the
// per-block center finding as a unitary, subtracts the recovered secret,
// uncomputes, and reports the trace distance to the ideal |phi>.
CoherentTinyResult construct_clwe_coherent_tiny(const std::vector<i64>& A, const ClweParams& params,
                                                Rng& rng);

struct ObliviousSample {
    int n;
    int m;
    i64 q;
    std::vector<i64> A;  // n x m row-major
    std::vector<i64> b;  // centered mod q
    std::string provenance_mode;
    std::uint64_t provenance_seed;
    double alpha = 0.0;       // error rate tag r/(sqrt2 q)
    double secret_width = 0;  // s_w tag for modulus switching (0 = uniform secret)
};

std::string oblivious_sample_to_json(const ObliviousSample& s);

// Witness-oblivious sampler: sampled-branch construction, per-block recovery,
// CRT, internal consistency check, then emission of (A, b). Retries a fresh
// branch on recovery failure (bounded).
ObliviousSample oblivious_sample(const std::vector<i64>& A, const ClweParams& params,
                                 std::uint64_t seed, int max_retries = 16);

// Test/harness entry point: same pipeline, also exposes the branch secret.
struct InstrumentedObliviousSample {
    ObliviousSample sample;
    std::vector<i64> branch_s;
    int retries;
};
InstrumentedObliviousSample oblivious_sample_instrumented(const std::vector<i64>& A,
                                                          const ClweParams& params,
                                                          std::uint64_t seed, int max_retries = 16);

// Modulus switching with deterministic rounding plus fresh smoothing noise;
// requires (alpha')^2 >= alpha^2 + (s_w sqrt n / q')^2 * omega_factor.
ObliviousSample modulus_switch(const ObliviousSample& sample, i64 q_prime, double alpha,
                               double alpha_prime, double omega_factor, Rng& rng);

// Parameter-side feasibility check of the switching condition.
bool modulus_switch_condition(int n, double s_w, i64 q_prime, double alpha, double alpha_prime,
                              double omega_factor);

}  // namespace qlab
