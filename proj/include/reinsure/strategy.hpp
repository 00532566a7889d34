#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "reinsure/value_solver.hpp"

namespace reinsure {

struct FeedbackStrategy {
    std::shared_ptr<const PolicyTable> policy;
};
struct ClosedFormExcessEV {
    std::shared_ptr<const ValueTable> value;
    std::shared_ptr<const Driver> driver;
};
struct ClosedFormPropEV {
    std::shared_ptr<const ValueTable> value;
    std::shared_ptr<const Driver> driver;
};
struct ClosedFormPropVar {
    std::shared_ptr<const ValueTable> value;
    std::shared_ptr<const Driver> driver;
};
// u^{*,f}(t) tabulated on a uniform grid, linear in between.
struct FullInfoDeterministic {
    std::vector<double> times;
    std::vector<double> retention;
};
struct ConstantStrategy {
    double u;
};

class Strategy {
public:
    using Kind = std::variant<FeedbackStrategy, ClosedFormExcessEV, ClosedFormPropEV, ClosedFormPropVar,
                              FullInfoDeterministic, ConstantStrategy>;

    Strategy(Kind kind, double horizon, double cap, std::string name);

    static Strategy feedback(std::shared_ptr<const PolicyTable> policy, double horizon, double cap);
    static Strategy closed_form_excess_ev(std::shared_ptr<const ValueTable> value, std::shared_ptr<const Driver> driver);
    static Strategy closed_form_prop_ev(std::shared_ptr<const ValueTable> value, std::shared_ptr<const Driver> driver);
    static Strategy closed_form_prop_var(std::shared_ptr<const ValueTable> value, std::shared_ptr<const Driver> driver);
    static Strategy full_information(const ModelSpec& model, std::size_t state, const Contract& contract,
                                     const PremiumSpec& spec, const MarketParams& mkt, int grid = 1000);
    static Strategy constant(double u, double horizon, double cap);

    const Kind& kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    double horizon() const noexcept { return horizon_; }
    double cap() const noexcept { return cap_; }

    double evaluate(double t, const Eigen::VectorXd& pi) const;

private:
    Kind kind_;
    double horizon_;
    double cap_;
    std::string name_;
};

double evaluate(const Strategy& strategy, double t, const Eigen::VectorXd& pi);

// Ratio v(t, W(pi)) / v(t, pi) for a shared claim law.
double jump_ratio(const ValueTable& value, const Driver& driver, double t, const Eigen::VectorXd& pi);

double u_star_excess_ev(double t, const Eigen::VectorXd& pi, const ValueTable& value, const Driver& driver);
double u_star_prop_ev(double t, const Eigen::VectorXd& pi, const ValueTable& value, const Driver& driver);
double u_star_prop_var(double t, const Eigen::VectorXd& pi, const ValueTable& value, const Driver& driver);

// Safety-loading thresholds (B, D) of the proportional expected-value case.
struct LoadingThresholds {
    double lower;  // theta <= lower: full reinsurance
    double upper;  // theta >= upper: no reinsurance
};
LoadingThresholds loading_thresholds(double t, const Eigen::VectorXd& pi, const ValueTable& value, const Driver& driver);

// Times the proportional expected-value root was clamped to a boundary because
// the bracket did not straddle zero.
std::size_t bracket_collapses();

}  // namespace reinsure
