#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "reinsure/errors.hpp"
#include "reinsure/io.hpp"
#include "reinsure/parallel.hpp"
#include "reinsure/value_solver.hpp"

namespace reinsure {

std::string to_string(BoundaryTag tag) {
    switch (tag) {
        case BoundaryTag::AtZero: return "AT_ZERO";
        case BoundaryTag::Interior: return "INTERIOR";
        case BoundaryTag::AtCap: return "AT_I";
    }
    return "INTERIOR";
}

BoundaryTag tag_from_string(const std::string& s) {
    if (s == "AT_ZERO") return BoundaryTag::AtZero;
    if (s == "AT_I") return BoundaryTag::AtCap;
    if (s == "INTERIOR") return BoundaryTag::Interior;
    throw ConfigError("tag", "unknown boundary tag '" + s + "'");
}

void SolverConfig::validate() const {
    if (time_steps < 1) throw ConfigError("solver.time_steps", "must be >= 1");
    if (resolution < 2) throw ConfigError("solver.resolution", "must be >= 2");
    if (!(root_tol > 0.0)) throw ConfigError("solver.root_tol", "must be > 0");
    if (quadrature_panels < 1) throw ConfigError("solver.quadrature_panels", "must be >= 1");
    if (!(terminal_value > 0.0)) throw ConfigError("solver.terminal_value", "must be > 0");
}

// ---------------------------------------------------------------------------

namespace {

std::size_t slice_index(const std::vector<double>& times, double t, double& frac) {
    const std::size_t n = times.size();
    if (n == 1) {
        frac = 0.0;
        return 0;
    }
    const double t0 = times.front(), t1 = times.back();
    if (t < t0 - 1e-12 * (1.0 + std::abs(t0)) || t > t1 + 1e-12 * (1.0 + std::abs(t1)))
        throw DomainError("time outside the table grid");
    const double h = (t1 - t0) / static_cast<double>(n - 1);
    double pos = (t - t0) / h;
    pos = std::clamp(pos, 0.0, static_cast<double>(n - 1));
    auto k = static_cast<std::size_t>(std::floor(pos));
    if (k >= n - 1) k = n - 2;
    frac = pos - static_cast<double>(k);
    if (frac < 1e-12) frac = 0.0;
    if (frac > 1.0 - 1e-12) {
        frac = 0.0;
        ++k;
    }
    return k;
}

}  // namespace

double GridTable::at_slice(std::size_t k, const Eigen::VectorXd& pi) const {
    return lattice->stencil(pi).apply(slices[k]);
}

double GridTable::at(double t, const Eigen::VectorXd& pi) const {
    double frac = 0.0;
    const std::size_t k = slice_index(times, t, frac);
    const Stencil st = lattice->stencil(pi);
    const double a = st.apply(slices[k]);
    if (frac == 0.0) return a;
    const double b = st.apply(slices[k + 1]);
    return (1.0 - frac) * a + frac * b;
}

// ---------------------------------------------------------------------------

Driver::Driver(const ModelSpec& model, const Contract& contract, std::shared_ptr<const PremiumModel> premia,
               const MarketParams& mkt, const SolverConfig& config)
    : flow_(model),
      contract_(contract),
      premia_(std::move(premia)),
      mkt_(mkt),
      config_(config),
      lambda_(model.intensity_vector()),
      shared_(model.shared_claims()) {
    search_top_ = std::log1p(mkt.theta) / mkt.eta;
    search_limit_ = 0.0;
    for (const auto& d : model.claims) {
        search_top_ = std::max(search_top_, d.quantile(config.search_quantile));
        search_limit_ = std::max(search_limit_, d.is_atomic() ? d.support_max() : d.quantile(1.0 - 1e-12));
    }
    search_limit_ = std::max(search_limit_, search_top_);

    if (shared_) return;
    if (model.claims.front().is_atomic()) {
        for (const auto& d : model.claims)
            for (const auto& a : d.atoms()) nodes_.push_back(a.size);
        std::sort(nodes_.begin(), nodes_.end());
        nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
        nodes_.erase(std::remove_if(nodes_.begin(), nodes_.end(), [](double z) { return !(z > 0.0); }), nodes_.end());
        node_omega_.assign(nodes_.size(), 1.0);
        return;
    }
    const double kappa_max = mkt.risk_factor(0.0);
    double z_max = 0.0;
    for (const auto& d : model.claims) z_max = std::max(z_max, d.truncation_point(kappa_max));
    using gauss = boost::math::quadrature::gauss<double, 8>;
    const auto& abscissa = gauss::abscissa();
    const auto& weight = gauss::weights();
    const int panels = config.quadrature_panels;
    const double width = z_max / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * width;
        const double half = 0.5 * width;
        for (std::size_t k = 0; k < abscissa.size(); ++k) {
            const double signs[2] = {1.0, -1.0};
            for (double sgn : signs) {
                if (abscissa[k] == 0.0 && sgn < 0.0) continue;
                nodes_.push_back(mid + sgn * half * abscissa[k]);
                node_omega_.push_back(half * weight[k]);
            }
        }
    }
}

std::vector<double> Driver::node_weights(const Eigen::VectorXd& pi) const {
    std::vector<double> w(nodes_.size(), 0.0);
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < pi.size(); ++i)
            if (pi[i] > 0.0) s += pi[i] * lambda_[i] * model().claims[static_cast<std::size_t>(i)].likelihood(nodes_[j]);
        w[j] = s * node_omega_[j];
    }
    return w;
}

double Driver::premium(const JumpSample& s, double t, double u) const {
    if (shared_ && !premia_->has_custom_rule()) return s.lambda_bar * premia_->state_rate(0, u);
    return premia_->reinsurer(t, s.pi, u);
}

double Driver::exp_integral(const JumpSample& s, double kappa, double u, bool marginal) const {
    if (shared_) {
        if (std::isinf(u) && marginal) return 0.0;
        const ContractMoments m = contract_moments(model().claims.front(), kappa, contract_, u);
        return s.lambda_bar * s.v_jump * (marginal ? m.exp_marginal : m.exp_retained);
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        if (s.weights[j] <= 0.0) continue;
        const double z = nodes_[j];
        const double g = std::isinf(u) ? z : contract_.g(z, u);
        double f = std::exp(kappa * g);
        if (marginal) f *= std::isinf(u) ? 0.0 : contract_.dg_du(z, u);
        acc += s.weights[j] * s.v_nodes[j] * f;
    }
    return acc;
}

double Driver::jump_term(const JumpSample& s, double kappa, double u) const { return exp_integral(s, kappa, u, false); }

double Driver::h(const JumpSample& s, double t, double u) const {
    const double kappa = mkt_.risk_factor(t);
    double full;
    if (shared_) {
        full = s.lambda_bar * s.v_jump * mgf(model().claims.front(), kappa);
    } else {
        full = 0.0;
        for (std::size_t j = 0; j < nodes_.size(); ++j)
            if (s.weights[j] > 0.0) full += s.weights[j] * s.v_nodes[j] * std::exp(kappa * nodes_[j]);
    }
    return -s.v * kappa * premium(s, t, u) + full - exp_integral(s, kappa, u, false);
}

double Driver::dh_du(const JumpSample& s, double t, double u) const {
    const double kappa = mkt_.risk_factor(t);
    double slope;
    if (shared_ && !premia_->has_custom_rule())
        slope = s.lambda_bar * premia_->state_slope(0, u);
    else
        slope = premia_->reinsurer_du(t, s.pi, u);
    return -s.v * kappa * slope - kappa * exp_integral(s, kappa, u, true);
}

OptimizeResult Driver::optimize(const JumpSample& s, double t) const {
    if (!(s.lambda_bar > 0.0)) throw DomainError("filter gives zero claim intensity");
    const double d0 = dh_du(s, t, 0.0);
    if (d0 <= 0.0) return {0.0, BoundaryTag::AtZero};
    const double cap = contract_.cap();
    double hi;
    if (std::isfinite(cap)) {
        hi = cap;
        if (dh_du(s, t, hi) >= 0.0) return {cap, BoundaryTag::AtCap};
    } else {
        hi = search_top_;
        while (dh_du(s, t, hi) >= 0.0) {
            if (hi >= search_limit_) return {kInf, BoundaryTag::AtCap};
            hi = std::min(2.0 * hi, search_limit_);
        }
    }
    double lo = 0.0;
    while (hi - lo > config_.root_tol) {
        const double mid = 0.5 * (lo + hi);
        if (dh_du(s, t, mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return {0.5 * (lo + hi), BoundaryTag::Interior};
}

void check_concavity(const Driver& driver) {
    const bool premium_ok = !driver.premia().has_custom_rule();
    const bool contract_ok = driver.contract().is_proportional() ||
                             (driver.contract().is_custom() && std::get<CustomContract>(driver.contract().kind()).convex_in_u);
    if (premium_ok && contract_ok) return;
    const auto& model = driver.model();
    const double top = std::isfinite(driver.contract().cap()) ? driver.contract().cap() : driver.search_top();
    const auto v_one = [](const Eigen::VectorXd&) { return 1.0; };
    const int grid = 64;
    if (premium_ok && driver.contract().is_excess_of_loss()) {
        // z ^ u is concave in u, so only a single sign change of dh/du is required.
        std::vector<Eigen::VectorXd> probes{model.initial_distribution};
        for (std::size_t i = 0; i < model.num_states(); ++i) probes.push_back(Eigen::VectorXd::Unit(static_cast<Eigen::Index>(model.num_states()), static_cast<Eigen::Index>(i)));
        for (const auto& pi : probes) {
            const JumpSample s = driver.sample(pi, v_one);
            bool negative = false;
            for (int k = 0; k <= grid; ++k) {
                const double d = driver.dh_du(s, 0.0, top * k / grid);
                if (d < 0.0) negative = true;
                else if (negative && d > 1e-12) throw NonConcaveError("driver derivative changes sign more than once");
            }
        }
        return;
    }
    const JumpSample s = driver.sample(model.initial_distribution, v_one);
    double prev = driver.dh_du(s, 0.0, 0.0);
    for (int k = 1; k <= grid; ++k) {
        const double d = driver.dh_du(s, 0.0, top * k / grid);
        if (d > prev + 1e-12 * (1.0 + std::abs(prev)))
            throw NonConcaveError("driver derivative is not monotone in the retention");
        prev = d;
    }
}

double hamiltonian_h(double t, const Eigen::VectorXd& pi, double u, const std::function<double(const Eigen::VectorXd&)>& v,
                     const Driver& driver) {
    if (!(u >= 0.0 && u <= driver.contract().cap())) throw DomainError("retention outside [0, I]");
    const double out = driver.h(driver.sample(pi, v), t, u);
    if (!std::isfinite(out)) throw NumericalError("driver overflowed; check admissibility");
    return out;
}

OptimizeResult optimize_u(double t, const Eigen::VectorXd& pi, const std::function<double(const Eigen::VectorXd&)>& v,
                          const Driver& driver) {
    return driver.optimize(driver.sample(pi, v), t);
}

// ---------------------------------------------------------------------------

Solution solve_backward(const ModelSpec& model, const Contract& contract, std::shared_ptr<const PremiumModel> premia,
                        const MarketParams& mkt, const SolverConfig& config) {
    model.validate();
    mkt.validate();
    config.validate();
    const AdmissibilityReport adm = check_admissibility(model, mkt);
    if (!adm.pass) throw DomainError("claim laws lack the exponential moment required for admissibility");

    const int steps = config.time_steps;
    const double dt = mkt.horizon_t / steps;
    if (dt * model.max_intensity() > config.stability_limit)
        throw StabilityError("time step too coarse: dt * max(lambda) = " + fmt_num(dt * model.max_intensity()));

    const Driver driver(model, contract, premia, mkt, config);
    check_concavity(driver);
    const auto lattice = std::make_shared<const SimplexLattice>(static_cast<int>(model.num_states()), config.resolution - 1);
    const std::size_t np = lattice->size();

    // Interpolation stencils are time-invariant: precompute them once.
    const Eigen::MatrixXd step = driver.flow().step_matrix(dt);
    std::vector<Stencil> flow_st(np), jump_st(np);
    std::vector<std::vector<double>> weights(np);
    std::vector<std::vector<Stencil>> node_st(np);
    std::vector<double> lambda_bar(np), c_rate(np);
    const Eigen::VectorXd lambda = model.intensity_vector();
    for (std::size_t p = 0; p < np; ++p) {
        const Eigen::VectorXd& pi = lattice->point(p);
        Eigen::VectorXd moved = step * pi;
        normalize_in_place(moved);
        flow_st[p] = lattice->stencil(moved);
        lambda_bar[p] = lambda.dot(pi);
        c_rate[p] = premia->insurer(pi);
        if (driver.shared()) {
            jump_st[p] = lattice->stencil(driver.flow().jump_shared(pi));
        } else {
            weights[p] = driver.node_weights(pi);
            node_st[p].resize(driver.nodes().size());
            for (std::size_t j = 0; j < driver.nodes().size(); ++j)
                if (weights[p][j] > 0.0) node_st[p][j] = lattice->stencil(driver.flow().jump(pi, driver.nodes()[j]));
        }
    }

    Solution sol;
    auto& value = sol.value;
    auto& policy = sol.policy;
    value.lattice = policy.lattice = lattice;
    value.times.resize(static_cast<std::size_t>(steps) + 1);
    for (int k = 0; k <= steps; ++k) value.times[static_cast<std::size_t>(k)] = k * dt;
    value.times.back() = mkt.horizon_t;
    policy.times = value.times;
    policy.cap = contract.cap();
    value.slices.assign(static_cast<std::size_t>(steps) + 1, std::vector<double>(np, 0.0));
    policy.slices.assign(static_cast<std::size_t>(steps) + 1, std::vector<double>(np, 0.0));
    policy.tags.assign(static_cast<std::size_t>(steps) + 1, std::vector<BoundaryTag>(np, BoundaryTag::Interior));
    value.slices.back().assign(np, config.terminal_value);

    const auto local = [&](std::size_t p, const std::vector<double>& next) {
        JumpSample s;
        s.pi = lattice->point(p);
        s.v = next[p];
        s.lambda_bar = lambda_bar[p];
        if (driver.shared()) {
            s.v_jump = jump_st[p].apply(next);
        } else {
            s.weights = weights[p];
            s.v_nodes.assign(s.weights.size(), 0.0);
            for (std::size_t j = 0; j < s.weights.size(); ++j)
                if (s.weights[j] > 0.0) s.v_nodes[j] = node_st[p][j].apply(next);
        }
        return s;
    };

    {
        const auto& terminal = value.slices.back();
        const double t = mkt.horizon_t;
        parallel_for(np, [&](std::size_t p) {
            const OptimizeResult r = driver.optimize(local(p, terminal), t);
            policy.slices.back()[p] = r.u;
            policy.tags.back()[p] = r.tag;
        });
    }

    for (int k = steps - 1; k >= 0; --k) {
        const auto ks = static_cast<std::size_t>(k);
        const auto& next = value.slices[ks + 1];
        auto& cur = value.slices[ks];
        const double t = value.times[ks];
        const double kappa = mkt.risk_factor(t);
        parallel_for(np, [&](std::size_t p) {
            const JumpSample s = local(p, next);
            const OptimizeResult r = driver.optimize(s, t);
            const double q = driver.premium(s, t, r.u);
            const double jump = driver.jump_term(s, kappa, r.u);
            const double carry = flow_st[p].apply(next);
            const double v = std::exp(-kappa * (c_rate[p] - q) * dt) * ((1.0 - lambda_bar[p] * dt) * carry + dt * jump);
            if (!(v > 0.0) || !std::isfinite(v)) throw NumericalError("value function lost positivity or overflowed");
            cur[p] = v;
            policy.slices[ks][p] = r.u;
            policy.tags[ks][p] = r.tag;
        });
    }
    return sol;
}

Solution solve_backward(const ModelSpec& model, const Contract& contract, const PremiumSpec& spec,
                        const MarketParams& mkt, const SolverConfig& config) {
    return solve_backward(model, contract, std::make_shared<const PremiumModel>(model, mkt, spec, contract), mkt, config);
}

// ---------------------------------------------------------------------------

namespace {

// Quadrature-route pieces of min_u {kappa q^u + lambda \int e^{kappa g} F}.
struct OracleObjective {
    const ClaimDistribution& dist;
    const Contract& contract;
    Principle principle;
    double theta;
    double lambda;

    double value(double kappa, double u) const {
        const double ceded = dist.integrate([&](double z) { return z - contract.g(z, u); }, 0.0, breaks(u));
        double q = (1.0 + theta) * ceded;
        if (principle == Principle::Variance) {
            const double second = dist.integrate(
                [&](double z) {
                    const double c = z - contract.g(z, u);
                    return c * c;
                },
                0.0, breaks(u));
            q = ceded + theta * second;
        }
        const double e = dist.integrate([&](double z) { return std::exp(kappa * contract.g(z, u)); }, tilt(kappa, u), breaks(u));
        return kappa * lambda * q + lambda * e;
    }

    double derivative(double kappa, double u) const {
        const double marg = dist.integrate([&](double z) { return contract.dg_du(z, u); }, 0.0, breaks(u));
        double dq = -(1.0 + theta) * marg;
        if (principle == Principle::Variance) {
            const double cm = dist.integrate([&](double z) { return (z - contract.g(z, u)) * contract.dg_du(z, u); }, 0.0,
                                             breaks(u));
            dq = -(marg + 2.0 * theta * cm);
        }
        const double e = dist.integrate(
            [&](double z) { return contract.dg_du(z, u) * std::exp(kappa * contract.g(z, u)); }, tilt(kappa, u),
            breaks(u));
        return kappa * lambda * dq + kappa * lambda * e;
    }

    std::vector<double> breaks(double u) const {
        if (contract.is_excess_of_loss() && std::isfinite(u)) return {u};
        return {};
    }
    double tilt(double kappa, double u) const {
        if (contract.is_proportional()) return kappa * u;
        if (contract.is_excess_of_loss()) return std::isinf(u) ? kappa : 0.0;
        return kappa;
    }
};

}  // namespace

SingleStateSolution single_state_oracle(const ModelSpec& model, const Contract& contract, const PremiumSpec& spec,
                                        const MarketParams& mkt, int steps, double terminal) {
    if (model.num_states() != 1) throw DomainError("single-state oracle needs exactly one state");
    const ClaimDistribution& dist = model.claims.front();
    const double lambda = model.intensities.front();
    const OracleObjective obj{dist, contract, spec.reinsurer, mkt.theta, lambda};
    const double c = insurer_premium(Eigen::VectorXd::Ones(1), model, spec.insurer, mkt.theta_i);

    double top = contract.cap();
    if (std::isinf(top)) {
        top = std::max(std::log1p(mkt.theta) / mkt.eta, dist.quantile(0.999));
        while (obj.derivative(mkt.risk_factor(0.0), top) < 0.0 && top < dist.quantile(1.0 - 1e-12)) top *= 2.0;
    }
    // Minimizer of the bracket in the ODE: the objective is convex in u.
    const auto argmin = [&](double kappa) {
        if (obj.derivative(kappa, 0.0) >= 0.0) return 0.0;
        if (obj.derivative(kappa, top) <= 0.0) return top;
        double lo = 0.0, hi = top;
        while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            (obj.derivative(kappa, mid) < 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    std::map<double, std::pair<double, double>> cache;  // t -> (growth rate, u*)
    const auto growth = [&](double t) {
        auto it = cache.find(t);
        if (it != cache.end()) return it->second;
        const double kappa = mkt.risk_factor(t);
        const double u = argmin(kappa);
        const double g = kappa * c + lambda - obj.value(kappa, u);
        return cache[t] = {g, u};
    };

    SingleStateSolution out;
    const double h = mkt.horizon_t / steps;
    out.times.resize(static_cast<std::size_t>(steps) + 1);
    out.value.resize(out.times.size());
    out.retention.resize(out.times.size());
    for (int k = 0; k <= steps; ++k) out.times[static_cast<std::size_t>(k)] = k * h;
    out.times.back() = mkt.horizon_t;
    double v = terminal;
    out.value.back() = v;
    out.retention.back() = growth(mkt.horizon_t).second;
    // Backward in time: dv/ds = -v G(T - s) in reversed time s.
    for (int k = steps; k > 0; --k) {
        const double t1 = out.times[static_cast<std::size_t>(k)];
        const double t0 = out.times[static_cast<std::size_t>(k - 1)];
        const double tm = 0.5 * (t0 + t1);
        const double step = t1 - t0;
        const auto f = [&](double t, double x) { return -x * growth(t).first; };
        const double k1 = f(t1, v);
        const double k2 = f(tm, v + 0.5 * step * k1);
        const double k3 = f(tm, v + 0.5 * step * k2);
        const double k4 = f(t0, v + step * k3);
        v += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.value[static_cast<std::size_t>(k - 1)] = v;
        out.retention[static_cast<std::size_t>(k - 1)] = growth(t0).second;
    }
    return out;
}

// ---------------------------------------------------------------------------

double full_info_retention(const ModelSpec& model, std::size_t state, const Contract& contract, const PremiumSpec& spec,
                           const MarketParams& mkt, double t, double tol) {
    if (state >= model.num_states()) throw DomainError("state index out of range");
    const ClaimDistribution& dist = model.claims[state];
    const double kappa = mkt.risk_factor(t);
    const auto bisect = [&](auto&& increasing, double lo, double hi) {
        // Root of an increasing function on [lo, hi].
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            (increasing(mid) < 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    if (contract.is_excess_of_loss() && spec.reinsurer == Principle::ExpectedValue) return std::log1p(mkt.theta) / kappa;
    if (contract.is_proportional() && spec.reinsurer == Principle::ExpectedValue) {
        const double target = (1.0 + mkt.theta) * dist.mean();
        const auto gap = [&](double u) { return mgf_derivative(dist, kappa * u) - target; };
        if (gap(1.0) <= 0.0) return 1.0;
        return bisect(gap, 0.0, 1.0);
    }
    if (contract.is_proportional() && spec.reinsurer == Principle::Variance) {
        const auto gap = [&](double u) {
            return mgf_derivative(dist, kappa * u) - (dist.mean() + 2.0 * mkt.theta * (1.0 - u) * dist.second_moment());
        };
        if (gap(1.0) <= 0.0) return 1.0;
        if (gap(0.0) >= 0.0) return 0.0;
        return bisect(gap, 0.0, 1.0);
    }
    ModelSpec single = ModelSpec::single_state(model.intensities[state], dist);
    auto premia = std::make_shared<const PremiumModel>(single, mkt, spec, contract);
    SolverConfig cfg;
    cfg.root_tol = tol;
    const Driver driver(single, contract, premia, mkt, cfg);
    const auto one = [](const Eigen::VectorXd&) { return 1.0; };
    return driver.optimize(driver.sample(single.initial_distribution, one), t).u;
}

// ---------------------------------------------------------------------------

void write_solution_csv(std::ostream& os, const Solution& sol, int time_stride) {
    const auto& lat = *sol.value.lattice;
    const int m = lat.dimension();
    os << "t";
    for (int i = 0; i < m; ++i) os << ",pi_" << (i + 1);
    os << ",v,u_star,tag\n";
    const std::size_t nt = sol.value.times.size();
    for (std::size_t k = 0; k < nt; ++k) {
        if (k % static_cast<std::size_t>(time_stride) != 0 && k + 1 != nt) continue;
        for (std::size_t p = 0; p < lat.size(); ++p) {
            os << fmt_num(sol.value.times[k]);
            for (int i = 0; i < m; ++i) os << ',' << fmt_num(lat.point(p)[i]);
            os << ',' << fmt_num(sol.value.slices[k][p]) << ',' << fmt_num(sol.policy.slices[k][p]) << ','
               << to_string(sol.policy.tags[k][p]) << '\n';
        }
    }
}

Solution read_solution_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("value.csv", "empty file");
    int m = 0;
    {
        std::stringstream hs(line);
        std::string col;
        while (std::getline(hs, col, ','))
            if (col.rfind("pi_", 0) == 0) ++m;
    }
    if (m < 1) throw ConfigError("value.csv", "missing pi columns");
    struct Row {
        double t;
        Eigen::VectorXd pi;
        double v, u;
        BoundaryTag tag;
    };
    std::vector<Row> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != static_cast<std::size_t>(m + 4))
            throw ConfigError("value.csv:" + std::to_string(lineno), "wrong number of columns");
        Row r;
        r.t = std::stod(cells[0]);
        r.pi.resize(m);
        for (int i = 0; i < m; ++i) r.pi[i] = std::stod(cells[static_cast<std::size_t>(i + 1)]);
        r.v = std::stod(cells[static_cast<std::size_t>(m + 1)]);
        r.u = std::stod(cells[static_cast<std::size_t>(m + 2)]);
        r.tag = tag_from_string(cells[static_cast<std::size_t>(m + 3)]);
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw ConfigError("value.csv", "no rows");
    std::vector<double> times;
    for (const auto& r : rows)
        if (times.empty() || r.t != times.back()) times.push_back(r.t);
    const std::size_t np = rows.size() / times.size();
    int n = 1;
    while (SimplexLattice(m, n).size() < np) ++n;
    auto lattice = std::make_shared<const SimplexLattice>(m, n);
    if (lattice->size() != np) throw ConfigError("value.csv", "row count does not match a simplex lattice");

    Solution sol;
    sol.value.lattice = sol.policy.lattice = lattice;
    sol.value.times = sol.policy.times = times;
    sol.value.slices.assign(times.size(), std::vector<double>(np, 0.0));
    sol.policy.slices.assign(times.size(), std::vector<double>(np, 0.0));
    sol.policy.tags.assign(times.size(), std::vector<BoundaryTag>(np, BoundaryTag::Interior));
    sol.policy.cap = kInf;
    std::size_t k = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r > 0 && rows[r].t != rows[r - 1].t) ++k;
        std::vector<int> counts(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) counts[static_cast<std::size_t>(i)] = static_cast<int>(std::lround(rows[r].pi[i] * n));
        const int idx = lattice->index_of_counts(counts);
        if (idx < 0) throw ConfigError("value.csv", "row is not a lattice point");
        sol.value.slices[k][static_cast<std::size_t>(idx)] = rows[r].v;
        sol.policy.slices[k][static_cast<std::size_t>(idx)] = rows[r].u;
        sol.policy.tags[k][static_cast<std::size_t>(idx)] = rows[r].tag;
    }
    return sol;
}

}  // namespace reinsure
