#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "reinsure/model.hpp"

namespace reinsure {

enum class Principle { ExpectedValue, Variance };

std::string to_string(Principle p);
Principle principle_from_string(const std::string& s);

// Insurer and reinsurer premium principles. Loadings come from MarketParams.
struct PremiumSpec {
    Principle insurer = Principle::ExpectedValue;
    Principle reinsurer = Principle::ExpectedValue;
};

double insurer_premium(const Eigen::VectorXd& pi, const ModelSpec& model, Principle principle, double theta_i);
double reinsurance_premium(const Eigen::VectorXd& pi, const ModelSpec& model, Principle principle, double theta,
                           const Contract& contract, double u);

// Premium rates for one (model, market, principles, contract). Per-state claim
// moments are cached; the reinsurance rate is evaluated through closed forms.
class PremiumModel {
public:
    using CustomRule = std::function<double(double t, const Eigen::VectorXd& pi, double u)>;

    PremiumModel(const ModelSpec& model, const MarketParams& mkt, PremiumSpec spec, Contract contract);

    // Replace the reinsurance rate by an arbitrary rule q(t, pi, u).
    void set_custom_rule(CustomRule rule, double fd_step = 1e-6);
    bool has_custom_rule() const noexcept { return static_cast<bool>(custom_); }

    const Contract& contract() const noexcept { return contract_; }
    const PremiumSpec& spec() const noexcept { return spec_; }
    double theta() const noexcept { return theta_; }
    double theta_i() const noexcept { return theta_i_; }
    // Finite end of the retention range to scan when I is infinite.
    double search_top() const noexcept { return search_top_; }

    double insurer(const Eigen::VectorXd& pi) const;
    double reinsurer(double t, const Eigen::VectorXd& pi, double u) const;
    // d q / d u.
    double reinsurer_du(double t, const Eigen::VectorXd& pi, double u) const;

    // Per-state rates lambda_i * q_i(u), lambda_i * dq_i/du and lambda_i * c_i.
    Eigen::VectorXd reinsurer_rates(double u) const;
    Eigen::VectorXd reinsurer_rate_derivatives(double u) const;
    const Eigen::VectorXd& insurer_rates() const noexcept { return c_rates_; }

    // q_i(u) and dq_i/du for one state, without the intensity factor.
    double state_rate(std::size_t i, double u) const;
    double state_slope(std::size_t i, double u) const;

private:
    ModelSpec model_;
    PremiumSpec spec_;
    Contract contract_;
    double theta_;
    double theta_i_;
    Eigen::VectorXd lambda_;
    Eigen::VectorXd c_rates_;
    std::vector<double> mean_;
    std::vector<double> second_;
    double search_top_;
    CustomRule custom_;
    double fd_step_ = 1e-6;
};

struct PremiumViolation {
    std::string check;  // "monotone", "continuity", "null_is_free", "full_exceeds_insurer"
    Eigen::VectorXd pi;
    double u;
    double value;
};

struct PremiumReport {
    bool pass = true;
    std::size_t checks = 0;
    std::vector<PremiumViolation> violations;
};

// Sampled checks of the reinsurance-premium contract: q non-increasing in u on
// a uniform grid, bounded finite differences, q(I) = 0 and q(0) > c.
PremiumReport validate_premium_contract(const PremiumModel& premia, const std::vector<Eigen::VectorXd>& pis,
                                        int u_grid = 200, double t = 0.0);

// max(claim 0.999-quantile, ln(1 + theta) / eta).
double premium_check_u_max(const ModelSpec& model, const MarketParams& mkt);

}  // namespace reinsure
