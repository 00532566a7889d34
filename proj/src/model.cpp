#include <algorithm>
#include <cmath>
#include <string>

#include "reinsure/errors.hpp"
#include "reinsure/model.hpp"

namespace reinsure {

void MarketParams::validate() const {
    if (!(eta > 0.0)) throw ConfigError("market.eta", "risk aversion must be > 0");
    if (!(horizon_t > 0.0)) throw ConfigError("market.horizon", "horizon must be > 0");
    if (!(rate_r >= 0.0)) throw ConfigError("market.rate", "interest rate must be >= 0");
    if (!std::isfinite(initial_wealth)) throw ConfigError("market.initial_wealth", "must be finite");
    if (!(theta_i > 0.0)) throw ConfigError("market.theta_i", "insurer loading must be > 0");
    if (!(theta > theta_i)) throw ConfigError("market.theta", "reinsurer loading must exceed the insurer loading");
}

double MarketParams::risk_factor(double t) const { return eta * std::exp(rate_r * (horizon_t - t)); }

double ModelSpec::max_intensity() const { return *std::max_element(intensities.begin(), intensities.end()); }

Eigen::VectorXd ModelSpec::intensity_vector() const {
    return Eigen::Map<const Eigen::VectorXd>(intensities.data(), static_cast<Eigen::Index>(intensities.size()));
}

bool ModelSpec::shared_claims() const {
    return std::all_of(claims.begin(), claims.end(), [this](const ClaimDistribution& d) { return d == claims.front(); });
}

bool ModelSpec::intensities_sorted() const { return std::is_sorted(intensities.begin(), intensities.end()); }

bool ModelSpec::homogeneous_claim_types() const {
    const bool atomic = claims.front().is_atomic();
    return std::all_of(claims.begin(), claims.end(), [atomic](const ClaimDistribution& d) { return d.is_atomic() == atomic; });
}

void ModelSpec::validate() const {
    const auto m = static_cast<Eigen::Index>(intensities.size());
    if (m < 1) throw ConfigError("model.intensities", "at least one state required");
    if (generator.rows() != m || generator.cols() != m)
        throw ConfigError("model.generator", "generator must be " + std::to_string(m) + "x" + std::to_string(m));
    const double scale = 1.0 + generator.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j)
            if (i != j && !(generator(i, j) >= 0.0))
                throw ConfigError("model.generator", "off-diagonal rates must be >= 0");
        if (std::abs(generator.row(i).sum()) > 1e-12 * scale)
            throw ConfigError("model.generator", "row " + std::to_string(i) + " does not sum to zero");
    }
    for (double l : intensities)
        if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("model.intensities", "intensities must be finite and > 0");
    if (claims.size() != intensities.size())
        throw ConfigError("model.claims", "one claim law per state required");
    if (!homogeneous_claim_types())
        throw ConfigError("model.claims", "cannot mix discrete and continuous claim laws across states");
    if (initial_distribution.size() != m)
        throw ConfigError("model.initial_distribution", "length must equal the number of states");
    if ((initial_distribution.array() < 0.0).any() || std::abs(initial_distribution.sum() - 1.0) > 1e-12)
        throw ConfigError("model.initial_distribution", "must be a probability vector");
}

ModelSpec ModelSpec::single_state(double lambda, ClaimDistribution dist) {
    ModelSpec spec;
    spec.generator = Eigen::MatrixXd::Zero(1, 1);
    spec.intensities = {lambda};
    spec.claims = {std::move(dist)};
    spec.initial_distribution = Eigen::VectorXd::Ones(1);
    return spec;
}

AdmissibilityReport check_admissibility(const ModelSpec& model, const MarketParams& mkt) {
    AdmissibilityReport report;
    report.binding_constant = 2.0 * mkt.eta * std::exp(mkt.rate_r * mkt.horizon_t);
    report.pass = true;
    for (const auto& dist : model.claims) {
        StateAdmissibility s;
        s.abscissa = dist.mgf_abscissa();
        s.pass = report.binding_constant < s.abscissa;
        s.mgf_value = s.pass ? mgf(dist, report.binding_constant) : kInf;
        report.pass = report.pass && s.pass;
        report.states.push_back(s);
    }
    return report;
}

}  // namespace reinsure
