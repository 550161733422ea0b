#include "qlab/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qlab {

void write_amplitude_csv(const std::string& path, const AmplitudeTable& table) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_amplitude_csv: cannot open " + path);
    out << "index,re,im\n";
    out.precision(17);
    for (i64 i = 0; i < table.grid.size(); ++i) {
        out << static_cast<i64>(std::llround(table.grid.value(i))) << "," << table.values[i].real()
            << "," << table.values[i].imag() << "\n";
    }
}

AmplitudeTable read_amplitude_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_amplitude_csv: cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::pair<i64, cplx>> entries;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        std::getline(ss, tok, ',');
        const i64 idx = std::stoll(tok);
        std::getline(ss, tok, ',');
        const double re = std::stod(tok);
        std::getline(ss, tok, ',');
        const double im = std::stod(tok);
        entries.emplace_back(idx, cplx(re, im));
    }
    if (entries.empty()) throw std::runtime_error("read_amplitude_csv: no data in " + path);
    AmplitudeTable t;
    const i64 lo = entries.front().first, hi = entries.back().first;
    t.grid = CosetGrid{1.0, 0.0, lo, hi, static_cast<double>(std::max(std::abs(lo), std::abs(hi)))};
    t.values.assign(hi - lo + 1, cplx(0, 0));
    for (auto& [idx, v] : entries) t.values[idx - lo] = v;
    return t;
}

void write_state_csv(const std::string& path, const PureState& state) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_state_csv: cannot open " + path);
    const int nr = state.shape().num_registers();
    for (int r = 0; r < nr; ++r) out << "label" << r << ",";
    out << "re,im\n";
    out.precision(17);
    for (i64 flat = 0; flat < state.dimension(); ++flat) {
        const auto idx = state.unflatten(flat);
        for (int r = 0; r < nr; ++r) out << state.shape().registers[r].label(idx[r]) << ",";
        out << state.amplitudes()[flat].real() << "," << state.amplitudes()[flat].imag() << "\n";
    }
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    out << header << "\n";
    out.precision(17);
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

}  // namespace qlab
