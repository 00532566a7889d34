#include <algorithm>
#include <cmath>
#include <ostream>

#include <unsupported/Eigen/MatrixFunctions>

#include "reinsure/errors.hpp"
#include "reinsure/filter.hpp"
#include "reinsure/io.hpp"

namespace reinsure {

namespace {
constexpr double kMaxExponent = 20.0;
}

void normalize_in_place(Eigen::VectorXd& pi) {
    for (auto& p : pi)
        if (p < 0.0) p = 0.0;
    const double s = pi.sum();
    if (!(s > 0.0) || !std::isfinite(s)) throw NumericalError("filter mass underflowed; sub-step the propagation");
    pi /= s;
}

FilterFlow::FilterFlow(const ModelSpec& model)
    : model_(model), lambda_(model.intensity_vector()), shared_(model.shared_claims()) {
    a_ = model.generator.transpose();
    a_.diagonal() -= lambda_;
}

Eigen::MatrixXd FilterFlow::step_matrix(double dt) const {
    if (dt < 0.0) throw DomainError("negative time step");
    return (a_ * dt).exp();
}

Eigen::VectorXd FilterFlow::propagate(const Eigen::VectorXd& pi, double dt) const {
    if (dt < 0.0) throw DomainError("negative time step");
    if (dt == 0.0) return pi;
    const int n = std::max(1, static_cast<int>(std::ceil(lambda_.maxCoeff() * dt / kMaxExponent)));
    const Eigen::MatrixXd e = step_matrix(dt / n);
    Eigen::VectorXd rho = pi;
    for (int k = 0; k < n; ++k) {
        rho = e * rho;
        normalize_in_place(rho);
    }
    return rho;
}

Eigen::VectorXd FilterFlow::jump_shared(const Eigen::VectorXd& pi) const {
    Eigen::VectorXd out = lambda_.cwiseProduct(pi);
    const double s = out.sum();
    if (!(s > 0.0)) throw DegenerateObservation("claim impossible under the current filter");
    return out / s;
}

Eigen::VectorXd FilterFlow::jump(const Eigen::VectorXd& pi, double z) const {
    if (!(z > 0.0)) throw DomainError("claim size must be > 0");
    if (shared_) return jump_shared(pi);
    Eigen::VectorXd out(pi.size());
    for (Eigen::Index i = 0; i < pi.size(); ++i)
        out[i] = pi[i] > 0.0 ? lambda_[i] * model_.claims[static_cast<std::size_t>(i)].likelihood(z) * pi[i] : 0.0;
    const double s = out.sum();
    if (!(s > 0.0)) throw DegenerateObservation("claim size has zero likelihood under every state");
    return out / s;
}

FilterState propagate(const FilterState& state, double dt, const ModelSpec& model) {
    return {FilterFlow(model).propagate(state.pi, dt), state.t + dt};
}

FilterState jump_update(const FilterState& state, double z, const ModelSpec& model) {
    return {FilterFlow(model).jump(state.pi, z), state.t};
}

Eigen::VectorXd ks_rhs(const Eigen::VectorXd& pi, const ModelSpec& model) {
    const Eigen::VectorXd lambda = model.intensity_vector();
    const double mean_rate = lambda.dot(pi);
    return model.generator.transpose() * pi - lambda.cwiseProduct(pi) + pi * mean_rate;
}

Eigen::VectorXd rk4_propagate(const Eigen::VectorXd& pi, double dt, const ModelSpec& model, int steps) {
    Eigen::VectorXd x = pi;
    if (dt == 0.0) return x;
    const double h = dt / steps;
    for (int s = 0; s < steps; ++s) {
        const Eigen::VectorXd k1 = ks_rhs(x, model);
        const Eigen::VectorXd k2 = ks_rhs(x + 0.5 * h * k1, model);
        const Eigen::VectorXd k3 = ks_rhs(x + 0.5 * h * k2, model);
        const Eigen::VectorXd k4 = ks_rhs(x + h * k3, model);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

FilterTrajectory run_filter(const std::vector<Observation>& events, const ModelSpec& model,
                            const std::vector<double>& sample_grid) {
    const FilterFlow flow(model);
    FilterTrajectory traj;
    Eigen::VectorXd pi = model.initial_distribution;
    double now = 0.0;
    std::size_t g = 0;
    const auto sample_until = [&](double limit, bool inclusive) {
        while (g < sample_grid.size() && (sample_grid[g] < limit || (inclusive && sample_grid[g] == limit))) {
            pi = flow.propagate(pi, sample_grid[g] - now);
            now = sample_grid[g];
            traj.samples.push_back({now, pi, false});
            ++g;
        }
    };
    double last = -1.0;
    for (const auto& ev : events) {
        if (!(ev.time > last) || ev.time < 0.0) throw DomainError("claim times must be strictly increasing and >= 0");
        last = ev.time;
        sample_until(ev.time, false);
        pi = flow.propagate(pi, ev.time - now);
        now = ev.time;
        JumpRecord rec{now, pi, ev.size, flow.jump(pi, ev.size)};
        pi = rec.after;
        traj.samples.push_back({now, pi, true});
        traj.jumps.push_back(std::move(rec));
    }
    sample_until(kInf, false);
    return traj;
}

void write_filter_csv(std::ostream& os, const FilterTrajectory& traj) {
    const Eigen::Index m = traj.samples.empty() ? 0 : traj.samples.front().pi.size();
    os << "time";
    for (Eigen::Index i = 0; i < m; ++i) os << ",pi_" << (i + 1);
    os << ",is_jump\n";
    for (const auto& s : traj.samples) {
        os << fmt_num(s.time);
        for (Eigen::Index i = 0; i < m; ++i) os << ',' << fmt_num(s.pi[i]);
        os << ',' << (s.is_jump ? 1 : 0) << '\n';
    }
}

}  // namespace reinsure
