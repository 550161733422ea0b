#include "qlab/state.hpp"

#include <cmath>
#include <stdexcept>

#include "qlab/kernels.hpp"

namespace qlab {

bool RegisterShape::same_as(const RegisterShape& o) const {
    if (registers.size() != o.registers.size()) return false;
    for (size_t i = 0; i < registers.size(); ++i) {
        const auto& a = registers[i];
        const auto& b = o.registers[i];
        if (a.kind != b.kind || a.size() != b.size()) return false;
        if (a.kind == Register::Kind::Grid) {
            if (std::abs(a.grid.step - b.grid.step) > 1e-12 ||
                std::abs(a.grid.offset - b.grid.offset) > 1e-9 || a.grid.kmin != b.grid.kmin)
                return false;
        }
    }
    return true;
}

PureState::PureState(RegisterShape shape, std::vector<cplx> amplitudes, double truncation_loss)
    : shape_(std::move(shape)), amp_(std::move(amplitudes)), loss_(truncation_loss) {
    if (static_cast<i64>(amp_.size()) != shape_.total_dimension())
        throw std::invalid_argument("PureState: amplitude length != total dimension");
    if (loss_ < 0 || loss_ >= 0.5) throw std::invalid_argument("PureState: truncation loss out of range");
    if (norm() <= 0) throw std::invalid_argument("PureState: zero state");
}

PureState PureState::basis_state(const RegisterShape& shape, const std::vector<i64>& indices) {
    std::vector<cplx> amp(shape.total_dimension(), cplx(0, 0));
    PureState tmp(shape, std::vector<cplx>(shape.total_dimension(), cplx(1, 0)));
    amp[tmp.flatten(indices)] = 1.0;
    return PureState(shape, std::move(amp));
}

double PureState::norm() const {
    return std::sqrt(kernels::norm_squared(amp_.data(), static_cast<i64>(amp_.size())));
}

PureState PureState::normalized() const {
    const double n = norm();
    std::vector<cplx> out(amp_);
    for (auto& v : out) v /= n;
    return PureState(shape_, std::move(out), loss_);
}

std::vector<i64> PureState::unflatten(i64 flat) const {
    const int nr = shape_.num_registers();
    std::vector<i64> idx(nr);
    for (int r = nr - 1; r >= 0; --r) {
        const i64 sz = shape_.registers[r].size();
        idx[r] = flat % sz;
        flat /= sz;
    }
    return idx;
}

i64 PureState::flatten(const std::vector<i64>& indices) const {
    if (static_cast<int>(indices.size()) != shape_.num_registers())
        throw std::invalid_argument("flatten: index count mismatch");
    i64 flat = 0;
    for (int r = 0; r < shape_.num_registers(); ++r) {
        const i64 sz = shape_.registers[r].size();
        if (indices[r] < 0 || indices[r] >= sz) throw std::invalid_argument("flatten: index out of range");
        flat = flat * sz + indices[r];
    }
    return flat;
}

void Ensemble::validate(double tol) const {
    double total = 0;
    for (const auto& e : entries) {
        if (e.probability < 0) throw std::invalid_argument("Ensemble: negative probability");
        total += e.probability;
    }
    if (std::abs(total - 1.0) > tol) throw std::invalid_argument("Ensemble: probabilities do not sum to 1");
}

}  // namespace qlab
