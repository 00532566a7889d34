#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "reinsure/filter.hpp"
#include "reinsure/model.hpp"
#include "reinsure/premium.hpp"

namespace reinsure {

struct ChainPoint {
    double time;
    int state;
};

struct ClaimEvent {
    double time;
    double size;
    int state;
};

struct ClaimPath {
    std::uint64_t seed = 0;
    std::uint64_t id = 0;
    double horizon = 0.0;
    std::vector<ChainPoint> chain;
    std::vector<ClaimEvent> events;

    int state_at(double t) const;
    std::vector<Observation> observations() const;
};

enum class ArrivalMethod { PerSojourn, Thinning };

// Stream tags: one for the chain, one for arrivals and sizes.
inline constexpr std::uint64_t kChainTag = 1;
inline constexpr std::uint64_t kClaimTag = 2;

std::vector<ChainPoint> simulate_chain(const ModelSpec& model, double horizon, std::uint64_t seed,
                                       std::uint64_t path_id = 0);
std::vector<ClaimEvent> simulate_claims(const ModelSpec& model, const std::vector<ChainPoint>& chain, double horizon,
                                        std::uint64_t seed, std::uint64_t path_id = 0,
                                        ArrivalMethod method = ArrivalMethod::PerSojourn);
ClaimPath simulate_path(const ModelSpec& model, double horizon, std::uint64_t seed, std::uint64_t path_id = 0,
                        ArrivalMethod method = ArrivalMethod::PerSojourn);

// Retention as a function of time and the filter's left limit.
using RetentionFn = std::function<double(double t, const Eigen::VectorXd& pi)>;

struct WealthSample {
    std::vector<double> times;
    std::vector<double> wealth;      // X_t
    std::vector<double> discounted;  // e^{-Rt} X_t, accumulated separately
    std::vector<Eigen::VectorXd> filter;  // pi_t at the recorded times
};

struct WealthOptions {
    std::vector<double> record_times;  // defaults to {T}
    // Largest Simpson sub-interval for the premium integral, as a fraction of T.
    double max_step_fraction = 1.0 / 128.0;
};

WealthSample wealth_path(const ClaimPath& path, const RetentionFn& strategy, const PremiumModel& premia,
                         const FilterFlow& flow, const MarketParams& mkt, const WealthOptions& options = {});

void write_paths_csv(std::ostream& os, const std::vector<ClaimPath>& paths);
void write_wealth_csv(std::ostream& os, const std::vector<std::pair<std::uint64_t, WealthSample>>& samples);

}  // namespace reinsure
