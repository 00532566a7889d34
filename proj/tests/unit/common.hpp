#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "reinsure/model.hpp"

namespace fixtures {

inline reinsure::ModelSpec two_state(double l1 = 1.0, double l2 = 2.0, double zeta = 5.0) {
    reinsure::ModelSpec m;
    m.generator.resize(2, 2);
    m.generator << -1.0, 1.0, 1.0, -1.0;
    m.intensities = {l1, l2};
    m.claims = {reinsure::ClaimDistribution::exponential(zeta), reinsure::ClaimDistribution::exponential(zeta)};
    m.initial_distribution = Eigen::Vector2d(0.5, 0.5);
    return m;
}

inline reinsure::MarketParams market(double theta = 0.3, double theta_i = 0.1, double rate = 0.0) {
    reinsure::MarketParams mkt;
    mkt.theta = theta;
    mkt.theta_i = theta_i;
    mkt.rate_r = rate;
    return mkt;
}

// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

}  // namespace fixtures
