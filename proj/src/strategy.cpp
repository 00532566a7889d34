#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>

#include "reinsure/errors.hpp"
#include "reinsure/strategy.hpp"

namespace reinsure {

namespace {

std::atomic<std::size_t> g_collapses{0};

constexpr double kRootTol = 1e-10;

template <class F>
double bisect_increasing(F&& f, double lo, double hi) {
    while (hi - lo > kRootTol) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

void require_shared(const Driver& driver, const char* what) {
    if (!driver.shared()) throw DomainError(std::string(what) + " needs a claim law shared by all states");
}

JumpSample sample_at(double t, const Eigen::VectorXd& pi, const ValueTable& value, const Driver& driver) {
    return driver.sample(pi, [&](const Eigen::VectorXd& p) { return value.at(t, p); });
}

}  // namespace

std::size_t bracket_collapses() { return g_collapses.load(); }

Strategy::Strategy(Kind kind, double horizon, double cap, std::string name)
    : kind_(std::move(kind)), horizon_(horizon), cap_(cap), name_(std::move(name)) {}

Strategy Strategy::feedback(std::shared_ptr<const PolicyTable> policy, double horizon, double cap) {
    return Strategy(FeedbackStrategy{std::move(policy)}, horizon, cap, "feedback");
}

Strategy Strategy::closed_form_excess_ev(std::shared_ptr<const ValueTable> value, std::shared_ptr<const Driver> driver) {
    const double t = driver->market().horizon_t;
    return Strategy(ClosedFormExcessEV{std::move(value), std::move(driver)}, t, kInf, "closed_form_excess_ev");
}

Strategy Strategy::closed_form_prop_ev(std::shared_ptr<const ValueTable> value, std::shared_ptr<const Driver> driver) {
    const double t = driver->market().horizon_t;
    return Strategy(ClosedFormPropEV{std::move(value), std::move(driver)}, t, 1.0, "closed_form_prop_ev");
}

Strategy Strategy::closed_form_prop_var(std::shared_ptr<const ValueTable> value, std::shared_ptr<const Driver> driver) {
    const double t = driver->market().horizon_t;
    return Strategy(ClosedFormPropVar{std::move(value), std::move(driver)}, t, 1.0, "closed_form_prop_var");
}

Strategy Strategy::full_information(const ModelSpec& model, std::size_t state, const Contract& contract,
                                    const PremiumSpec& spec, const MarketParams& mkt, int grid) {
    FullInfoDeterministic f;
    for (int k = 0; k <= grid; ++k) {
        const double t = mkt.horizon_t * k / grid;
        f.times.push_back(t);
        f.retention.push_back(full_info_retention(model, state, contract, spec, mkt, t));
    }
    return Strategy(std::move(f), mkt.horizon_t, contract.cap(), "full_information");
}

Strategy Strategy::constant(double u, double horizon, double cap) {
    if (!(u >= 0.0 && u <= cap)) throw DomainError("constant retention outside [0, I]");
    return Strategy(ConstantStrategy{u}, horizon, cap, "constant_" + std::to_string(u));
}

double Strategy::evaluate(double t, const Eigen::VectorXd& pi) const {
    if (!(t >= 0.0 && t <= horizon_ * (1.0 + 1e-12))) throw DomainError("time outside [0, T]");
    const double u = std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FeedbackStrategy>) {
                return s.policy->at(t, pi);
            } else if constexpr (std::is_same_v<T, ClosedFormExcessEV>) {
                return u_star_excess_ev(t, pi, *s.value, *s.driver);
            } else if constexpr (std::is_same_v<T, ClosedFormPropEV>) {
                return u_star_prop_ev(t, pi, *s.value, *s.driver);
            } else if constexpr (std::is_same_v<T, ClosedFormPropVar>) {
                return u_star_prop_var(t, pi, *s.value, *s.driver);
            } else if constexpr (std::is_same_v<T, FullInfoDeterministic>) {
                const std::size_t n = s.times.size();
                if (n == 1) return s.retention.front();
                const double pos = std::clamp(t / s.times.back() * static_cast<double>(n - 1), 0.0,
                                              static_cast<double>(n - 1));
                const auto k = std::min(static_cast<std::size_t>(pos), n - 2);
                const double w = pos - static_cast<double>(k);
                return w == 0.0 ? s.retention[k] : (1.0 - w) * s.retention[k] + w * s.retention[k + 1];
            } else {
                return s.u;
            }
        },
        kind_);
    return std::clamp(u, 0.0, cap_);
}

double evaluate(const Strategy& strategy, double t, const Eigen::VectorXd& pi) { return strategy.evaluate(t, pi); }

double jump_ratio(const ValueTable& value, const Driver& driver, double t, const Eigen::VectorXd& pi) {
    require_shared(driver, "jump ratio");
    return value.at(t, driver.flow().jump_shared(pi)) / value.at(t, pi);
}

double u_star_excess_ev(double t, const Eigen::VectorXd& pi, const ValueTable& value, const Driver& driver) {
    require_shared(driver, "excess-of-loss closed form");
    const double kappa = driver.market().risk_factor(t);
    const double r = jump_ratio(value, driver, t, pi);
    return std::max(0.0, std::log((1.0 + driver.market().theta) / r) / kappa);
}

LoadingThresholds loading_thresholds(double t, const Eigen::VectorXd& pi, const ValueTable& value, const Driver& driver) {
    const double kappa = driver.market().risk_factor(t);
    if (driver.shared()) {
        const ClaimDistribution& d = driver.model().claims.front();
        const double r = jump_ratio(value, driver, t, pi);
        return {r - 1.0, r * mgf_derivative(d, kappa) / d.mean() - 1.0};
    }
    const JumpSample s = sample_at(t, pi, value, driver);
    double den = 0.0, lower = 0.0, upper = 0.0;
    for (std::size_t j = 0; j < s.weights.size(); ++j) {
        const double z = driver.nodes()[j];
        const double wz = s.weights[j] * z;
        den += wz;
        lower += wz * s.v_nodes[j] / s.v;
        upper += wz * s.v_nodes[j] / s.v * std::exp(kappa * z);
    }
    return {lower / den - 1.0, upper / den - 1.0};
}

double u_star_prop_ev(double t, const Eigen::VectorXd& pi, const ValueTable& value, const Driver& driver) {
    const double theta = driver.market().theta;
    const double kappa = driver.market().risk_factor(t);
    const LoadingThresholds th = loading_thresholds(t, pi, value, driver);
    if (theta <= th.lower) return 0.0;
    if (theta >= th.upper) return 1.0;
    double gap0, gap1;
    std::function<double(double)> gap;
    if (driver.shared()) {
        const ClaimDistribution& d = driver.model().claims.front();
        const double r = jump_ratio(value, driver, t, pi);
        const double target = (1.0 + theta) * d.mean();
        gap = [&d, r, kappa, target](double u) { return r * mgf_derivative(d, kappa * u) - target; };
    } else {
        const JumpSample s = sample_at(t, pi, value, driver);
        double den = 0.0;
        for (std::size_t j = 0; j < s.weights.size(); ++j) den += s.weights[j] * driver.nodes()[j];
        const double target = (1.0 + theta) * den;
        gap = [s, target, kappa, &driver](double u) {
            double g = 0.0;
            for (std::size_t j = 0; j < s.weights.size(); ++j) {
                const double z = driver.nodes()[j];
                g += s.weights[j] * z * s.v_nodes[j] / s.v * std::exp(kappa * u * z);
            }
            return g - target;
        };
    }
    gap0 = gap(0.0);
    gap1 = gap(1.0);
    if (gap0 >= 0.0 || gap1 <= 0.0) {
        ++g_collapses;
        return gap0 >= 0.0 ? 0.0 : 1.0;
    }
    return bisect_increasing(gap, 0.0, 1.0);
}

double u_star_prop_var(double t, const Eigen::VectorXd& pi, const ValueTable& value, const Driver& driver) {
    require_shared(driver, "variance-principle closed form");
    const ClaimDistribution& d = driver.model().claims.front();
    const double theta = driver.market().theta;
    const double kappa = driver.market().risk_factor(t);
    const double r = jump_ratio(value, driver, t, pi);
    const double ez = d.mean(), ez2 = d.second_moment();
    if (2.0 * theta * ez2 <= (r - 1.0) * ez) return 0.0;
    // r E[Z e^{kappa u Z}] (increasing) against E[Z] + 2 theta (1 - u) E[Z^2] (decreasing).
    const auto gap = [&](double u) { return r * mgf_derivative(d, kappa * u) - (ez + 2.0 * theta * (1.0 - u) * ez2); };
    if (gap(1.0) <= 0.0) return 1.0;
    return bisect_increasing(gap, 0.0, 1.0);
}

}  // namespace reinsure
