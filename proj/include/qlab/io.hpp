#pragma once

#include <string>
#include <vector>

#include "qlab/dft.hpp"
#include "qlab/state.hpp"

namespace qlab {

// Amplitude tables serialize as CSV with header `index,re,im`; index is the
// integer grid label.
void write_amplitude_csv(const std::string& path, const AmplitudeTable& table);
AmplitudeTable read_amplitude_csv(const std::string& path);

// Debug dump of a state: `labels...,re,im` (not a stability-guaranteed format).
void write_state_csv(const std::string& path, const PureState& state);

// Generic CSV writer: header row then numeric rows.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace qlab
