#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

#include "reinsure/model.hpp"

namespace reinsure {

struct FilterState {
    Eigen::VectorXd pi;
    double t = 0.0;
};

struct JumpRecord {
    double time;
    Eigen::VectorXd before;  // left limit
    double size;
    Eigen::VectorXd after;
};

struct FilterSample {
    double time;
    Eigen::VectorXd pi;
    bool is_jump;
};

struct FilterTrajectory {
    std::vector<FilterSample> samples;
    std::vector<JumpRecord> jumps;
};

// Observed claim: arrival time and size.
struct Observation {
    double time;
    double size;
};

// Precomputed pieces of the filter for one model: the sub-generator
// Q^T - diag(lambda) and the claim-size likelihoods.
class FilterFlow {
public:
    explicit FilterFlow(const ModelSpec& model);

    const ModelSpec& model() const noexcept { return model_; }
    Eigen::Index size() const noexcept { return a_.rows(); }

    // Column-form propagator exp((Q^T - diag lambda) dt), valid for dt with
    // max(lambda) dt <= 20.
    Eigen::MatrixXd step_matrix(double dt) const;

    Eigen::VectorXd propagate(const Eigen::VectorXd& pi, double dt) const;
    Eigen::VectorXd jump(const Eigen::VectorXd& pi, double z) const;
    // Shared-law update; does not look at the claim size.
    Eigen::VectorXd jump_shared(const Eigen::VectorXd& pi) const;

private:
    ModelSpec model_;
    Eigen::MatrixXd a_;
    Eigen::VectorXd lambda_;
    bool shared_;
};

FilterState propagate(const FilterState& state, double dt, const ModelSpec& model);
FilterState jump_update(const FilterState& state, double z, const ModelSpec& model);
Eigen::VectorXd ks_rhs(const Eigen::VectorXd& pi, const ModelSpec& model);
// Classical RK4 on the between-jump drift with `steps` equal steps.
Eigen::VectorXd rk4_propagate(const Eigen::VectorXd& pi, double dt, const ModelSpec& model, int steps);

FilterTrajectory run_filter(const std::vector<Observation>& events, const ModelSpec& model,
                            const std::vector<double>& sample_grid);

// Clamp round-off negatives and renormalize; NumericalError if the mass vanished.
void normalize_in_place(Eigen::VectorXd& pi);

void write_filter_csv(std::ostream& os, const FilterTrajectory& traj);

}  // namespace reinsure
