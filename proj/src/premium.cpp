#include <algorithm>
#include <cmath>

#include "reinsure/errors.hpp"
#include "reinsure/premium.hpp"

namespace reinsure {

std::string to_string(Principle p) { return p == Principle::ExpectedValue ? "expected_value" : "variance"; }

Principle principle_from_string(const std::string& s) {
    if (s == "expected_value" || s == "ev") return Principle::ExpectedValue;
    if (s == "variance" || s == "var") return Principle::Variance;
    throw ConfigError("premium", "unknown premium principle '" + s + "'");
}

namespace {

double state_insurer_rate(const ClaimDistribution& d, Principle p, double theta_i) {
    return p == Principle::ExpectedValue ? (1.0 + theta_i) * d.mean() : d.mean() + theta_i * d.second_moment();
}

double state_reinsurer_rate(const ContractMoments& m, Principle p, double theta) {
    return p == Principle::ExpectedValue ? (1.0 + theta) * m.mean_ceded : m.mean_ceded + theta * m.second_ceded;
}

double state_reinsurer_slope(const ContractMoments& m, Principle p, double theta) {
    return p == Principle::ExpectedValue ? -(1.0 + theta) * m.mean_marginal
                                         : -(m.mean_marginal + 2.0 * theta * m.ceded_marginal);
}

void check_pi(const Eigen::VectorXd& pi, const ModelSpec& model) {
    if (pi.size() != static_cast<Eigen::Index>(model.num_states())) throw DomainError("filter has the wrong dimension");
}

}  // namespace

double insurer_premium(const Eigen::VectorXd& pi, const ModelSpec& model, Principle principle, double theta_i) {
    check_pi(pi, model);
    double c = 0.0;
    for (std::size_t i = 0; i < model.num_states(); ++i)
        c += pi[static_cast<Eigen::Index>(i)] * model.intensities[i] *
             state_insurer_rate(model.claims[i], principle, theta_i);
    return c;
}

double reinsurance_premium(const Eigen::VectorXd& pi, const ModelSpec& model, Principle principle, double theta,
                           const Contract& contract, double u) {
    check_pi(pi, model);
    double q = 0.0;
    for (std::size_t i = 0; i < model.num_states(); ++i)
        q += pi[static_cast<Eigen::Index>(i)] * model.intensities[i] *
             state_reinsurer_rate(contract_moments(model.claims[i], 0.0, contract, u), principle, theta);
    return q;
}

PremiumModel::PremiumModel(const ModelSpec& model, const MarketParams& mkt, PremiumSpec spec, Contract contract)
    : model_(model),
      spec_(spec),
      contract_(std::move(contract)),
      theta_(mkt.theta),
      theta_i_(mkt.theta_i),
      lambda_(model.intensity_vector()),
      search_top_(premium_check_u_max(model, mkt)) {
    c_rates_.resize(lambda_.size());
    for (Eigen::Index i = 0; i < lambda_.size(); ++i)
        c_rates_[i] = lambda_[i] * state_insurer_rate(model_.claims[static_cast<std::size_t>(i)], spec_.insurer, theta_i_);
    for (const auto& d : model_.claims) {
        mean_.push_back(d.mean());
        second_.push_back(d.second_moment());
    }
}

double PremiumModel::state_rate(std::size_t i, double u) const {
    if (contract_.is_proportional()) {
        const double r = 1.0 - u;
        return spec_.reinsurer == Principle::ExpectedValue ? (1.0 + theta_) * r * mean_[i]
                                                            : r * mean_[i] + theta_ * r * r * second_[i];
    }
    return state_reinsurer_rate(contract_moments(model_.claims[i], 0.0, contract_, u), spec_.reinsurer, theta_);
}

double PremiumModel::state_slope(std::size_t i, double u) const {
    if (contract_.is_proportional()) {
        return spec_.reinsurer == Principle::ExpectedValue ? -(1.0 + theta_) * mean_[i]
                                                            : -(mean_[i] + 2.0 * theta_ * (1.0 - u) * second_[i]);
    }
    return state_reinsurer_slope(contract_moments(model_.claims[i], 0.0, contract_, u), spec_.reinsurer, theta_);
}

void PremiumModel::set_custom_rule(CustomRule rule, double fd_step) {
    custom_ = std::move(rule);
    fd_step_ = fd_step;
}

double PremiumModel::insurer(const Eigen::VectorXd& pi) const { return c_rates_.dot(pi); }

Eigen::VectorXd PremiumModel::reinsurer_rates(double u) const {
    Eigen::VectorXd out(lambda_.size());
    for (Eigen::Index i = 0; i < lambda_.size(); ++i) out[i] = lambda_[i] * state_rate(static_cast<std::size_t>(i), u);
    return out;
}

Eigen::VectorXd PremiumModel::reinsurer_rate_derivatives(double u) const {
    Eigen::VectorXd out(lambda_.size());
    for (Eigen::Index i = 0; i < lambda_.size(); ++i) out[i] = lambda_[i] * state_slope(static_cast<std::size_t>(i), u);
    return out;
}

double PremiumModel::reinsurer(double t, const Eigen::VectorXd& pi, double u) const {
    if (!(u >= 0.0 && u <= contract_.cap())) throw DomainError("retention outside [0, I]");
    if (custom_) return custom_(t, pi, u);
    double q = 0.0;
    for (Eigen::Index i = 0; i < pi.size(); ++i)
        if (pi[i] != 0.0) q += pi[i] * lambda_[i] * state_rate(static_cast<std::size_t>(i), u);
    return q;
}

double PremiumModel::reinsurer_du(double t, const Eigen::VectorXd& pi, double u) const {
    if (!(u >= 0.0 && u <= contract_.cap())) throw DomainError("retention outside [0, I]");
    if (custom_) {
        const double lo = std::max(0.0, u - fd_step_);
        const double hi = std::min(contract_.cap(), u + fd_step_);
        return (custom_(t, pi, hi) - custom_(t, pi, lo)) / (hi - lo);
    }
    double d = 0.0;
    for (Eigen::Index i = 0; i < pi.size(); ++i)
        if (pi[i] != 0.0) d += pi[i] * lambda_[i] * state_slope(static_cast<std::size_t>(i), u);
    return d;
}

double premium_check_u_max(const ModelSpec& model, const MarketParams& mkt) {
    double u = std::log1p(mkt.theta) / mkt.eta;
    for (const auto& d : model.claims) u = std::max(u, d.quantile(0.999));
    return u;
}

PremiumReport validate_premium_contract(const PremiumModel& premia, const std::vector<Eigen::VectorXd>& pis,
                                        int u_grid, double t) {
    PremiumReport report;
    const double cap = premia.contract().cap();
    const double grid_top = std::isinf(cap) ? premia.search_top() : cap;
    const auto fail = [&](const char* check, const Eigen::VectorXd& pi, double u, double value) {
        report.pass = false;
        report.violations.push_back({check, pi, u, value});
    };
    for (const auto& pi : pis) {
        const double c = premia.insurer(pi);
        std::vector<double> us(static_cast<std::size_t>(u_grid));
        for (int k = 0; k < u_grid; ++k) us[static_cast<std::size_t>(k)] = grid_top * k / (u_grid - 1);
        double prev_q = 0.0, prev_slope = 0.0;
        for (int k = 0; k < u_grid; ++k) {
            const double u = us[static_cast<std::size_t>(k)];
            const double q = premia.reinsurer(t, pi, u);
            const double slope = std::abs(premia.reinsurer_du(t, pi, u));
            if (k > 0) {
                ++report.checks;
                if (q > prev_q) fail("monotone", pi, u, q - prev_q);
                const double du = u - us[static_cast<std::size_t>(k - 1)];
                const double bound = std::max(slope, prev_slope) * du * (1.0 + 1e-6) + 1e-12;
                ++report.checks;
                if (std::abs(q - prev_q) > bound) fail("continuity", pi, u, std::abs(q - prev_q) - bound);
            }
            prev_q = q;
            prev_slope = slope;
        }
        const double q_null = premia.reinsurer(t, pi, cap);
        ++report.checks;
        if (q_null != 0.0) fail("null_is_free", pi, cap, q_null);
        const double q_full = premia.reinsurer(t, pi, 0.0);
        ++report.checks;
        if (!(q_full > c)) fail("full_exceeds_insurer", pi, 0.0, q_full - c);
    }
    return report;
}

}  // namespace reinsure
