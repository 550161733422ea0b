#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "qlab/grid.hpp"
#include "qlab/zq.hpp"

namespace qlab {

using cplx = std::complex<double>;

inline constexpr i64 kDimensionCap = i64(1) << 24;

// A register is either cyclic Z_q or a finite truncated grid.
struct Register {
    enum class Kind { Cyclic, Grid };
    Kind kind;
    i64 q = 0;       // valid for Cyclic
    CosetGrid grid;  // valid for Grid

    static Register cyclic(i64 q) {
        if (q < 1) throw std::invalid_argument("Register: q must be positive");
        Register r;
        r.kind = Kind::Cyclic;
        r.q = q;
        return r;
    }
    static Register from_grid(const CosetGrid& g) {
        Register r;
        r.kind = Kind::Grid;
        r.grid = g;
        r.q = 0;
        return r;
    }

    i64 size() const { return kind == Kind::Cyclic ? q : grid.size(); }
    // Numeric label of basis index i: cyclic registers label by 0..q-1,
    // grid registers by the grid point value.
    double label(i64 i) const {
        return kind == Kind::Cyclic ? static_cast<double>(i) : grid.value(i);
    }
};

struct RegisterShape {
    std::vector<Register> registers;

    RegisterShape() = default;
    explicit RegisterShape(std::vector<Register> regs) : registers(std::move(regs)) {
        if (total_dimension() > kDimensionCap)
            throw std::invalid_argument(
                "RegisterShape: dimension exceeds the 2^24 cap; reduce q, n, m, or the truncation radius");
    }

    i64 total_dimension() const {
        i64 d = 1;
        for (const auto& r : registers) {
            if (r.size() <= 0) throw std::invalid_argument("RegisterShape: empty register");
            if (d > kDimensionCap / r.size() + 1) return kDimensionCap + 1;
            d *= r.size();
        }
        return d;
    }
    int num_registers() const { return static_cast<int>(registers.size()); }
    // Row-major stride of register r (product of sizes after it).
    i64 stride(int r) const {
        i64 s = 1;
        for (int i = r + 1; i < num_registers(); ++i) s *= registers[i].size();
        return s;
    }
    i64 outer(int r) const {
        i64 s = 1;
        for (int i = 0; i < r; ++i) s *= registers[i].size();
        return s;
    }
    bool same_as(const RegisterShape& o) const;
};

// Dense pure state over a multi-register domain. Immutable by convention:
// operations return new states.
class PureState {
  public:
    PureState(RegisterShape shape, std::vector<cplx> amplitudes, double truncation_loss = 0.0);

    static PureState basis_state(const RegisterShape& shape, const std::vector<i64>& indices);

    const RegisterShape& shape() const { return shape_; }
    const std::vector<cplx>& amplitudes() const { return amp_; }
    std::vector<cplx>& mutable_amplitudes() { return amp_; }
    double truncation_loss() const { return loss_; }
    i64 dimension() const { return static_cast<i64>(amp_.size()); }

    double norm() const;
    PureState normalized() const;

    // Flat index <-> per-register indices.
    std::vector<i64> unflatten(i64 flat) const;
    i64 flatten(const std::vector<i64>& indices) const;

  private:
    RegisterShape shape_;
    std::vector<cplx> amp_;
    double loss_;
};

// Probability-weighted mixture of pure states, as produced by measurements.
struct Ensemble {
    struct Entry {
        double probability;
        PureState state;
    };
    std::vector<Entry> entries;

    void validate(double tol = 1e-10) const;
};

}  // namespace qlab
