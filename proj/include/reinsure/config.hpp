#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reinsure/filter.hpp"
#include "reinsure/model.hpp"
#include "reinsure/premium.hpp"
#include "reinsure/simulator.hpp"
#include "reinsure/value_solver.hpp"

namespace reinsure {

struct EvaluationConfig {
    std::size_t paths = 10000;
    std::uint64_t seed = 1;
    // Constant retentions to compare against; +inf stands for the cap I.
    std::vector<double> baselines = {0.0, kInf, 0.25, 0.5, 0.75};
    int diagnostic_intervals = 20;
    ArrivalMethod arrivals = ArrivalMethod::PerSojourn;
};

struct ScenarioConfig {
    ModelSpec model;
    MarketParams market;
    Contract contract;
    PremiumSpec premium;
    SolverConfig solver;
    EvaluationConfig evaluation;
    std::vector<double> sweep_thetas = {0.05, 0.1, 0.2, 0.4};
    std::vector<Observation> events;
    std::string output_dir = "out";
};

// Parses and validates a JSON scenario. Unknown keys, type mismatches and
// invalid values raise ConfigError naming the key path (or line:column for
// syntax errors).
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

}  // namespace reinsure
