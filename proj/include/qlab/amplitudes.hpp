#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "qlab/dft.hpp"
#include "qlab/qsim.hpp"
#include "qlab/rng.hpp"
#include "qlab/state.hpp"

namespace qlab {

// Error-amplitude families. RealGaussian is rho_sigma; LinearPhaseGaussian
// multiplies by exp(2 pi i c e / q); ComplexGaussian is
// rho_r(e) * exp(-pi i e^2 / t); BoundedUniform is the indicator of |e| <= B.
struct RealGaussian {
    double sigma;
};
struct LinearPhaseGaussian {
    double sigma;
    double c;
    i64 q;
};
struct ComplexGaussian {
    double r;
    double t;
};
struct BoundedUniform {
    double B;
};
struct Tabulated {
    CosetGrid grid;
    std::vector<cplx> values;
};

using AmplitudeSpec =
    std::variant<RealGaussian, LinearPhaseGaussian, ComplexGaussian, BoundedUniform, Tabulated>;

cplx eval_amplitude(const AmplitudeSpec& spec, double e);

// CLI schema, e.g. {"variant":"complex_gaussian","r":1200,"t":5}. Variants:
// real_gaussian{sigma}, linear_phase_gaussian{sigma,c,q},
// complex_gaussian{r,t}, bounded_uniform{B},
// tabulated{offset,re[],im[]}.
AmplitudeSpec amplitude_spec_from_json(const std::string& json_text);

// Prior-work comparison preset: Gaussian with half phase,
// rho_r(x) sgn+(x), kept as a Tabulated amplitude.
Tabulated half_phase_gaussian_preset(double r);

// Integer support under the project truncation rule (1e-16 of peak for the
// Gaussian families; exactly |e| <= B for BoundedUniform).
CosetGrid support_of(const AmplitudeSpec& spec);

// l2-normalized table of the amplitude over its support.
AmplitudeTable normalized_table(const AmplitudeSpec& spec);

struct SecretKey {
    std::vector<i64> s;  // centered representatives in Z_q
};

SecretKey random_secret(int n, i64 q, Rng& rng);

struct SlweSample {
    std::vector<i64> a;  // in Z_q^n, centered
    PureState state;     // one cyclic Z_q register
};

// Hidden phase metadata; never visible to solver code paths, which accept
// only SlwePhaseView.
struct SlwePhaseHidden {
    std::vector<i64> y;
    double theta;
    double sigma_effective;
};

struct SlwePhaseSample {
    std::vector<i64> a;
    std::vector<i64> y;  // auxiliary vector (public)
    PureState state;
    SlwePhaseHidden hidden;
};

struct SlwePhaseView {
    const std::vector<i64>& a;
    const std::vector<i64>& y;
    const PureState& state;
};

inline SlwePhaseView public_view(const SlwePhaseSample& s) { return {s.a, s.y, s.state}; }

// a <- U(Z_q^n); state = normalized sum_e f(e) |<a,s> + e mod q>.
SlweSample gen_slwe(int n, i64 q, const AmplitudeSpec& spec, const SecretKey& s, Rng& rng);

// Same with the extra phase exp(2 pi i e theta); f supplied as a real
// amplitude spec, theta and y computed by the caller (the reductions own the
// distribution of theta).
SlwePhaseSample gen_slwe_phase(int n, i64 q, const AmplitudeSpec& f, const SecretKey& s,
                               std::vector<i64> y, double theta, Rng& rng);

// a <- U(Z_q^n); qubit (|0> + w_q^{<a,s>} |1>) / sqrt 2.
struct DcpQubit {
    std::vector<i64> a;
    PureState state;  // one cyclic Z_2 register
};
DcpQubit gen_dcp_qubit(int n, i64 q, const SecretKey& s, Rng& rng);

// |phi_c> = sum_x rho_r(x) e^{-pi i x^2/t} |x + c> on integers, truncated at
// halfwidth; throws when halfwidth < r sqrt(64/2pi).
PureState complex_gaussian_state(double r, double t, i64 c, i64 halfwidth);

// Normalized overlap magnitude |<phi_c1|phi_c2>| / (||..|| ||..||) for two
// complex-Gaussian states with the same (r, t), evaluated through the Poisson
// dual series. The direct sum cancels catastrophically for c1 != c2 mod t;
// every dual term is non-negative-magnitude so the evaluation is stable down
// to the underflow threshold.
double overlap_complex_gaussian(double r, double t, i64 c1, i64 c2);

}  // namespace qlab
