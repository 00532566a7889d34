#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "reinsure/premium.hpp"
#include "reinsure/simulator.hpp"
#include "reinsure/strategy.hpp"
#include "reinsure/value_solver.hpp"

namespace reinsure {

struct UtilityEstimate {
    std::string strategy;
    double mean = 0.0;       // E[1 - e^{-eta X_T}]
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

struct MonteCarloOptions {
    ArrivalMethod arrivals = ArrivalMethod::PerSojourn;
    double max_step_fraction = 1.0 / 128.0;
};

// All strategies are run on the same simulated claim paths.
std::vector<UtilityEstimate> mc_expected_utility(const ModelSpec& model, const std::vector<Strategy>& strategies,
                                                 const PremiumModel& premia, const MarketParams& mkt,
                                                 std::size_t n_paths, std::uint64_t seed,
                                                 const MonteCarloOptions& options = {});
UtilityEstimate mc_expected_utility(const ModelSpec& model, const Strategy& strategy, const PremiumModel& premia,
                                    const MarketParams& mkt, std::size_t n_paths, std::uint64_t seed,
                                    const MonteCarloOptions& options = {});

// sqrt(se_a^2 + se_b^2)
double combined_std_error(const UtilityEstimate& a, const UtilityEstimate& b);

struct DriftInterval {
    double t0;
    double t1;
    double mean;
    double std_error;
};

struct SnellDiagnostics {
    std::string strategy;
    std::vector<double> times;
    std::vector<double> mean_j;
    std::vector<DriftInterval> drift;
    double max_j_squared = 0.0;
    std::size_t n_paths = 0;
    std::string caveat;
};

// J_t = exp(-eta e^{RT} Xbar_t) v(t, pi_t) along simulated paths; per-interval
// drift estimates E[J_{t_{k+1}} - J_{t_k}].
SnellDiagnostics bellman_diagnostic(const ModelSpec& model, const Strategy& strategy, const ValueTable& value,
                                    const PremiumModel& premia, const MarketParams& mkt, std::size_t n_paths,
                                    int intervals, std::uint64_t seed, const MonteCarloOptions& options = {});

struct InformationReport {
    bool preconditions_met = false;
    std::vector<std::string> precondition_failures;
    double max_violation = 0.0;  // max over grid of u*(t, pi) - u^f(t)
    double min_jump_margin = 0.0;  // min over grid of v(t, W(pi)) - v(t, pi)
    std::vector<double> times;
    std::vector<double> full_info;       // u^f(t_k)
    std::vector<double> max_partial;     // max_pi u*(t_k, pi)
    Solution solution;
};

InformationReport compare_information(const ModelSpec& model, const Contract& contract, const PremiumSpec& spec,
                                      const MarketParams& mkt, const SolverConfig& config);

struct SweepResult {
    std::vector<double> thetas;
    std::vector<PolicyTable> policies;
    bool guaranteed = false;  // proportional contract with expected-value premia
    bool monotone = true;
    double max_decrease = 0.0;  // max over grid of u*(theta_j) - u*(theta_{j+1})
};

SweepResult theta_sweep(const ModelSpec& model, const Contract& contract, const PremiumSpec& spec,
                        const MarketParams& mkt, const std::vector<double>& thetas, const SolverConfig& config,
                        double slack = 1e-9);

void write_sweep_csv(std::ostream& os, const SweepResult& sweep, int time_stride = 1);
void write_drift_csv(std::ostream& os, const SnellDiagnostics& diag);

}  // namespace reinsure
