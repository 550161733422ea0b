#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qlab/amplitudes.hpp"
#include "qlab/lattice.hpp"
#include "qlab/qsim.hpp"
#include "qlab/rng.hpp"

namespace qlab {

struct EdcpParams {
    int n;
    int m;
    i64 q;
    double alpha;
    double beta;
    double gamma;
    bool strict_mode = false;
    double alpha_floor = 1.0;

    void validate() const;
};

struct EdcpHidden {
    std::vector<i64> v;  // the EDCP shift vector
    std::vector<i64> x;  // measured lattice offset
    double sigma;
    double c;
};

struct EdcpSample {
    std::vector<i64> y;  // measured vector in Z_q^m (centered)
    PureState state;     // registers (j in Z_q, v-register in Z_q^n flattened)
    EdcpHidden hidden;   // test introspection only
    bool regime_ok;      // lambda_1^inf(L_q(A)) >= q/4 held
};

// sigma = alpha beta q / sqrt(alpha^2 ||e||^2 + beta^2 q^2),
// c = -alpha^2 <x, e> / (alpha^2 ||e||^2 + beta^2 q^2).
std::pair<double, double> edcp_sigma_c(const EdcpParams& params, const std::vector<i64>& e,
                                       const std::vector<i64>& x);

struct LweWitness {
    std::vector<i64> s;
    std::vector<i64> e;
};

// Runs the LWE -> EDCP reduction on (A, b): builds the joint state, measures
// the third register, returns the residual over (j, v + j s). A is n x m
// row-major; the optional witness fills the hidden record.
EdcpSample lwe_to_edcp(const std::vector<i64>& A, const std::vector<i64>& b,
                       const EdcpParams& params, Rng& rng,
                       const std::optional<LweWitness>& witness = std::nullopt);

// The truncated x-ball used by lwe_to_edcp (radius from lambda_1 and the
// beta q envelope); exposed for the statistical harnesses.
std::vector<std::vector<i64>> edcp_x_support(const std::vector<i64>& A, const EdcpParams& params);

// QFT on the v-register, measure ahat, QFT on j; outputs a = -ahat and the
// phase state. The hidden record carries theta = c/q.
SlwePhaseSample edcp_to_slwe_phase(const EdcpSample& sample, const EdcpParams& params, Rng& rng);

// step = alpha^2 / (alpha^2 ||e||^2 + beta^2 q^2), sigma_c per the
// unknown-center theorem.
std::pair<double, double> center_distribution_params(const EdcpParams& params,
                                                     const std::vector<i64>& e);

// Pluggable phase solver: receives public views only (hidden-record firewall).
using SlwePhaseSolver = std::function<std::optional<SecretKey>(
    const std::vector<SlwePhaseView>&, const AmplitudeSpec& f_E)>;

// Enumerate E, generate ell phase samples per guess, call the solver, verify
// with the classical residual check. Throws when every E fails.
SecretKey guess_E_driver(const std::vector<i64>& A, const std::vector<i64>& b,
                         const EdcpParams& params, int ell, const SlwePhaseSolver& solver, Rng& rng);

// Classical residual verification used by the driver (Regev-style check).
bool verify_lwe_secret(const std::vector<i64>& A, const std::vector<i64>& b,
                       const std::vector<i64>& s_candidate, int n, int m, i64 q, double threshold);

struct RegevSampleRecord {
    std::vector<i64> a;  // in Z_q^n
    struct Entry {
        double probability;
        std::vector<i64> y;  // in Z_R^n
        PureState u_state;   // over the Z_qR/R grid register
    };
    std::vector<Entry> ensemble;
    double r, sigma, t, R;
    std::vector<double> x;        // the (snapped) CVP instance
    std::vector<double> x_prime;  // x - kappa_{L*}(x)
    LatticeBasis basis;
};

// Executes the sample-generation proof steps on truncated grids (dim <= 2).
RegevSampleRecord regev_generate_sample(const LatticeBasis& L, const std::vector<double>& x, i64 q,
                                        double alpha, double sigma, double r, i64 R, Rng& rng);

// Grid-refinement distance of a per-y simulated state against the continuum
// closed form rho_t(u) exp(2 pi i u phase_coef) placed at labels
// (label_shift + u) mod q; the state is embedded as an L2 step function of
// cell width 1/R and the formula is integrated per cell (midpoint rule with
// `oversample` points).
double regev_continuum_distance(const PureState& u_state, double t, double phase_coef,
                                i64 label_shift_mod_q, i64 q, i64 R, int oversample = 16);

// sigma_i = alpha q (1 + (sqrt2 - 1) i / (2m)), i = 0..2m.
std::vector<double> width_grid(double alpha, i64 q, int m);

struct TailBoundPoint {
    double sigma;
    std::vector<double> u;
    double tail;         // sum over L* \ {kappa(u)} of rho_{1/sigma}(x - u)
    double eps_add;
    double eps_mul;
    double margin_add;   // eps_add - tail
    double margin_mul;   // eps_mul * rho_{sqrt2/sigma}(kappa - u) - tail
    bool skipped;
};

struct TailBoundReport {
    std::vector<TailBoundPoint> points;
    bool all_pass;
};

// Numeric check of the additive and multiplicative Gaussian tail lemmas on a
// sigma/u grid. eps <= 0 selects the per-lemma proof quantities
// rho_{2/sigma}(L* \ 0) and rho_{2 sqrt2/sigma}(L* \ 0). Comparisons run in
// "small-sum space" (tail vs eps terms) so margins stay representable.
TailBoundReport verify_tail_bounds(const LatticeBasis& L, const std::vector<double>& sigmas,
                                   const std::vector<std::vector<double>>& us, double eps = -1.0);

}  // namespace qlab
