#include "qlab/amplitudes.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "json.hpp"
#include "qlab/gaussian.hpp"

namespace qlab {

namespace {
constexpr double kPi = std::numbers::pi;
}

cplx eval_amplitude(const AmplitudeSpec& spec, double e) {
    return std::visit(
        [&](const auto& v) -> cplx {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, RealGaussian>) {
                return rho(v.sigma, e);
            } else if constexpr (std::is_same_v<T, LinearPhaseGaussian>) {
                const double ang = 2.0 * kPi * v.c * e / static_cast<double>(v.q);
                return rho(v.sigma, e) * cplx(std::cos(ang), std::sin(ang));
            } else if constexpr (std::is_same_v<T, ComplexGaussian>) {
                const double ang = -kPi * e * e / v.t;
                return rho(v.r, e) * cplx(std::cos(ang), std::sin(ang));
            } else if constexpr (std::is_same_v<T, BoundedUniform>) {
                return std::abs(e) <= v.B ? cplx(1, 0) : cplx(0, 0);
            } else {
                const i64 idx = v.grid.index_near(e);
                if (!v.grid.contains_index(idx)) return 0;
                if (std::abs(v.grid.value(idx) - e) > 1e-9) return 0;
                return v.values[idx];
            }
        },
        spec);
}

CosetGrid support_of(const AmplitudeSpec& spec) {
    return std::visit(
        [&](const auto& v) -> CosetGrid {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, RealGaussian>) {
                return CosetGrid::integers_about(0, std::max<i64>(1, static_cast<i64>(
                                                        std::ceil(truncation_radius(v.sigma)))));
            } else if constexpr (std::is_same_v<T, LinearPhaseGaussian>) {
                return CosetGrid::integers_about(0, std::max<i64>(1, static_cast<i64>(
                                                        std::ceil(truncation_radius(v.sigma)))));
            } else if constexpr (std::is_same_v<T, ComplexGaussian>) {
                return CosetGrid::integers_about(0, std::max<i64>(1, static_cast<i64>(
                                                        std::ceil(truncation_radius(v.r)))));
            } else if constexpr (std::is_same_v<T, BoundedUniform>) {
                return CosetGrid::integers_about(0, static_cast<i64>(std::floor(v.B)));
            } else {
                return v.grid;
            }
        },
        spec);
}

AmplitudeTable normalized_table(const AmplitudeSpec& spec) {
    AmplitudeTable t;
    t.grid = support_of(spec);
    t.values.resize(t.grid.size());
    for (i64 i = 0; i < t.grid.size(); ++i) t.values[i] = eval_amplitude(spec, t.grid.value(i));
    t.l2_normalize();
    return t;
}

SecretKey random_secret(int n, i64 q, Rng& rng) {
    SecretKey s;
    s.s.resize(n);
    for (int i = 0; i < n; ++i) s.s[i] = centered_mod(static_cast<i64>(rng.below(q)), q);
    return s;
}

namespace {

std::vector<i64> random_a(int n, i64 q, Rng& rng) {
    std::vector<i64> a(n);
    for (int i = 0; i < n; ++i) a[i] = centered_mod(static_cast<i64>(rng.below(q)), q);
    return a;
}

i64 inner_mod(const std::vector<i64>& a, const std::vector<i64>& s, i64 q) {
    i64 acc = 0;
    for (size_t i = 0; i < a.size(); ++i) acc += a[i] * s[i];
    return ((acc % q) + q) % q;
}

PureState folded_state(const AmplitudeTable& table, i64 q, i64 shift, double theta) {
    std::vector<cplx> amp(q, cplx(0, 0));
    for (i64 i = 0; i < table.grid.size(); ++i) {
        const double e = table.grid.value(i);
        cplx v = table.values[i];
        if (theta != 0.0) {
            const double ang = 2.0 * kPi * e * theta;
            v *= cplx(std::cos(ang), std::sin(ang));
        }
        const i64 label = ((static_cast<i64>(std::llround(e)) + shift) % q + q) % q;
        amp[label] += v;
    }
    RegisterShape shape({Register::cyclic(q)});
    return PureState(shape, std::move(amp), table.truncation_loss).normalized();
}

}  // namespace

SlweSample gen_slwe(int n, i64 q, const AmplitudeSpec& spec, const SecretKey& s, Rng& rng) {
    auto a = random_a(n, q, rng);
    const auto table = normalized_table(spec);
    return SlweSample{a, folded_state(table, q, inner_mod(a, s.s, q), 0.0)};
}

SlwePhaseSample gen_slwe_phase(int n, i64 q, const AmplitudeSpec& f, const SecretKey& s,
                               std::vector<i64> y, double theta, Rng& rng) {
    if (!std::isfinite(theta)) throw std::invalid_argument("gen_slwe_phase: theta not finite");
    auto a = random_a(n, q, rng);
    const auto table = normalized_table(f);
    PureState state = folded_state(table, q, inner_mod(a, s.s, q), theta);
    double sigma_eff = 0.0;
    if (const auto* g = std::get_if<RealGaussian>(&f)) sigma_eff = g->sigma;
    return SlwePhaseSample{a, y, std::move(state), SlwePhaseHidden{y, theta, sigma_eff}};
}

DcpQubit gen_dcp_qubit(int n, i64 q, const SecretKey& s, Rng& rng) {
    auto a = random_a(n, q, rng);
    const double ang = 2.0 * kPi * static_cast<double>(inner_mod(a, s.s, q)) / static_cast<double>(q);
    std::vector<cplx> amp = {cplx(1, 0) / std::sqrt(2.0),
                             cplx(std::cos(ang), std::sin(ang)) / std::sqrt(2.0)};
    RegisterShape shape({Register::cyclic(2)});
    return DcpQubit{a, PureState(shape, std::move(amp))};
}

PureState complex_gaussian_state(double r, double t, i64 c, i64 halfwidth) {
    const double needed = r * std::sqrt(64.0 / (2.0 * kPi));
    if (static_cast<double>(halfwidth) < needed)
        throw std::invalid_argument("complex_gaussian_state: halfwidth below r*sqrt(64/2pi)");
    CosetGrid grid = CosetGrid::integers_about(c, halfwidth);
    std::vector<cplx> amp(grid.size());
    double mass_in = 0;
    for (i64 i = 0; i < grid.size(); ++i) {
        const double x = grid.value(i) - static_cast<double>(c);
        const double ang = -kPi * x * x / t;
        amp[i] = rho(r, x) * cplx(std::cos(ang), std::sin(ang));
        mass_in += std::norm(amp[i]);
    }
    // tail of rho_r^2 beyond the halfwidth, relative
    double tail = 0;
    for (i64 x = halfwidth + 1; x <= halfwidth + 64; ++x) tail += 2.0 * std::norm(rho(r, x));
    const double loss = tail / (mass_in + tail);
    RegisterShape shape({Register::from_grid(grid)});
    return PureState(shape, std::move(amp), loss).normalized();
}

AmplitudeSpec amplitude_spec_from_json(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    const std::string variant = j.at("variant").get<std::string>();
    if (variant == "real_gaussian") return RealGaussian{j.at("sigma").get<double>()};
    if (variant == "linear_phase_gaussian")
        return LinearPhaseGaussian{j.at("sigma").get<double>(), j.at("c").get<double>(),
                                   j.at("q").get<i64>()};
    if (variant == "complex_gaussian")
        return ComplexGaussian{j.at("r").get<double>(), j.at("t").get<double>()};
    if (variant == "bounded_uniform") return BoundedUniform{j.at("B").get<double>()};
    if (variant == "tabulated") {
        const auto re = j.at("re").get<std::vector<double>>();
        const auto im = j.at("im").get<std::vector<double>>();
        if (re.size() != im.size() || re.empty())
            throw std::invalid_argument("amplitude_spec_from_json: bad tabulated arrays");
        const i64 offset = j.value("offset", -static_cast<i64>(re.size()) / 2);
        Tabulated t;
        t.grid = CosetGrid{1.0, 0.0, offset, offset + static_cast<i64>(re.size()) - 1,
                           static_cast<double>(std::abs(offset) + re.size())};
        t.values.resize(re.size());
        for (size_t i = 0; i < re.size(); ++i) t.values[i] = cplx(re[i], im[i]);
        return t;
    }
    throw std::invalid_argument("amplitude_spec_from_json: unknown variant '" + variant + "'");
}

Tabulated half_phase_gaussian_preset(double r) {
    Tabulated t;
    const i64 hw = std::max<i64>(1, static_cast<i64>(std::ceil(truncation_radius(r))));
    t.grid = CosetGrid::integers_about(0, hw);
    t.values.resize(t.grid.size());
    for (i64 i = 0; i < t.grid.size(); ++i) {
        const double x = t.grid.value(i);
        t.values[i] = rho(r, x) * (x >= 0 ? 1.0 : -1.0);
    }
    return t;
}

double overlap_complex_gaussian(double r, double t, i64 c1, i64 c2) {
    // <phi_c1|phi_c2> = rho_{R}(D/2) * R * sum_k rho_{1/R}(k - D/t) e^{2 pi i k delta},
    // R = r/sqrt2, D = c2 - c1, delta = frac((c1+c2)/2) in {0, 1/2};
    // norms: ||phi_c||^2 = sum_x rho_R(x).
    const double R = r / std::sqrt(2.0);
    const double D = static_cast<double>(c2 - c1);
    const double delta = ((c1 + c2) % 2 == 0) ? 0.0 : 0.5;
    const double F = D / t;
    cplx acc = 0;
    const i64 k0 = round_half_up(F);
    for (i64 k = k0 - 8; k <= k0 + 8; ++k) {
        const double mag = rho(1.0 / R, static_cast<double>(k) - F);
        const double ang = 2.0 * kPi * static_cast<double>(k) * delta;
        acc += mag * cplx(std::cos(ang), std::sin(ang));
    }
    const double numerator = rho(R, D / 2.0) * R * std::abs(acc);
    double norm2 = 0;  // sum_x rho_R(x) over integers
    const i64 hw = static_cast<i64>(std::ceil(truncation_radius(R)));
    for (i64 x = -hw; x <= hw; ++x) norm2 += rho(R, static_cast<double>(x));
    return numerator / norm2;
}

}  // namespace qlab
