#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "qlab/zq.hpp"

namespace qlab {

// One-dimensional arithmetic grid {offset + k*step : kmin <= k <= kmax}.
// Factories encode the two conventions used throughout: closed symmetric
// truncation |value| <= halfwidth, and the half-open Z_{qR}/R domain
// (-q/2, q/2] with step 1/R.
struct CosetGrid {
    double step = 1.0;
    double offset = 0.0;
    i64 kmin = 0;
    i64 kmax = 0;
    double halfwidth = 0.0;

    static CosetGrid truncated(double step, double offset, double halfwidth) {
        if (step <= 0) throw std::invalid_argument("CosetGrid: step must be positive");
        if (halfwidth <= 0) throw std::invalid_argument("CosetGrid: halfwidth must be positive");
        CosetGrid g;
        g.step = step;
        g.offset = offset;
        g.halfwidth = halfwidth;
        g.kmin = static_cast<i64>(std::ceil((-halfwidth - offset) / step - 1e-12));
        g.kmax = static_cast<i64>(std::floor((halfwidth - offset) / step + 1e-12));
        if (g.kmin > g.kmax) throw std::invalid_argument("CosetGrid: empty support");
        return g;
    }

    // Integers centered at `center` with |x - center| <= halfwidth.
    static CosetGrid integers_about(i64 center, i64 halfwidth) {
        CosetGrid g;
        g.step = 1.0;
        g.offset = static_cast<double>(center);
        g.halfwidth = static_cast<double>(halfwidth) + std::abs(static_cast<double>(center));
        g.kmin = -halfwidth;
        g.kmax = halfwidth;
        return g;
    }

    // Z_{qR}/R: values k/R for k in (-qR/2, qR/2] cap Z.
    static CosetGrid fractional_mod(i64 q, i64 R) {
        CosetGrid g;
        g.step = 1.0 / static_cast<double>(R);
        g.offset = 0.0;
        g.halfwidth = static_cast<double>(q) / 2.0;
        const i64 qR = q * R;
        g.kmax = qR / 2;            // floor for odd qR
        g.kmin = g.kmax - (qR - 1);  // exactly qR points
        return g;
    }

    i64 size() const { return kmax - kmin + 1; }
    double value(i64 index) const { return offset + static_cast<double>(kmin + index) * step; }
    // Index of the grid point nearest `v`; caller checks range when needed.
    i64 index_near(double v) const {
        return round_half_up((v - offset) / step) - kmin;
    }
    bool contains_index(i64 index) const { return index >= 0 && index < size(); }
};

}  // namespace qlab
