#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace qlab {

struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 1;
    nlohmann::json params = nlohmann::json::object();
    std::string out_dir = ".";
    bool strict_mode = false;
    bool emit_hidden = false;
    int jobs = 0;  // 0 = library default
};

struct ResultRecord {
    std::string experiment;
    std::uint64_t seed;
    nlohmann::json params;
    std::map<std::string, double> metrics;
    std::map<std::string, bool> pass;

    bool all_pass() const {
        for (const auto& [k, v] : pass)
            if (!v) return false;
        return true;
    }
    nlohmann::json to_json() const;
};

struct ExperimentInfo {
    std::string name;
    std::string criteria;  // acceptance criterion ids
    std::string params_help;
};

const std::vector<ExperimentInfo>& list_experiments();

// Dispatch to a registered experiment; writes result.json and the
// experiment's CSVs under config.out_dir.
ResultRecord run_experiment(const ExperimentConfig& config);

}  // namespace qlab
