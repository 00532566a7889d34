#include <algorithm>
#include <cmath>
#include <ostream>

#include "reinsure/errors.hpp"
#include "reinsure/evaluation.hpp"
#include "reinsure/io.hpp"
#include "reinsure/parallel.hpp"

namespace reinsure {

namespace {

struct MeanSe {
    double mean;
    double se;
};

MeanSe mean_and_se(const std::vector<double>& xs) {
    const auto n = static_cast<double>(xs.size());
    const double mean = pairwise_sum(xs) / n;
    std::vector<double> dev(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = (xs[i] - mean) * (xs[i] - mean);
    const double var = xs.size() > 1 ? pairwise_sum(dev) / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

RetentionFn as_retention(const Strategy& s) {
    return [&s](double t, const Eigen::VectorXd& pi) { return s.evaluate(t, pi); };
}

}  // namespace

std::vector<UtilityEstimate> mc_expected_utility(const ModelSpec& model, const std::vector<Strategy>& strategies,
                                                 const PremiumModel& premia, const MarketParams& mkt,
                                                 std::size_t n_paths, std::uint64_t seed,
                                                 const MonteCarloOptions& options) {
    if (n_paths == 0) throw DomainError("need at least one path");
    const FilterFlow flow(model);
    const std::size_t ns = strategies.size();
    std::vector<std::vector<double>> utility(ns, std::vector<double>(n_paths));
    std::vector<RetentionFn> fns;
    for (const auto& s : strategies) fns.push_back(as_retention(s));
    WealthOptions wopt;
    wopt.max_step_fraction = options.max_step_fraction;
    parallel_for(n_paths, [&](std::size_t k) {
        const ClaimPath path = simulate_path(model, mkt.horizon_t, seed, k, options.arrivals);
        for (std::size_t s = 0; s < ns; ++s) {
            const WealthSample w = wealth_path(path, fns[s], premia, flow, mkt, wopt);
            utility[s][k] = -std::expm1(-mkt.eta * w.wealth.back());
        }
    });
    std::vector<UtilityEstimate> out;
    for (std::size_t s = 0; s < ns; ++s) {
        const MeanSe ms = mean_and_se(utility[s]);
        out.push_back({strategies[s].name(), ms.mean, ms.se, n_paths, seed});
    }
    return out;
}

UtilityEstimate mc_expected_utility(const ModelSpec& model, const Strategy& strategy, const PremiumModel& premia,
                                    const MarketParams& mkt, std::size_t n_paths, std::uint64_t seed,
                                    const MonteCarloOptions& options) {
    return mc_expected_utility(model, std::vector<Strategy>{strategy}, premia, mkt, n_paths, seed, options).front();
}

double combined_std_error(const UtilityEstimate& a, const UtilityEstimate& b) {
    return std::hypot(a.std_error, b.std_error);
}

SnellDiagnostics bellman_diagnostic(const ModelSpec& model, const Strategy& strategy, const ValueTable& value,
                                    const PremiumModel& premia, const MarketParams& mkt, std::size_t n_paths,
                                    int intervals, std::uint64_t seed, const MonteCarloOptions& options) {
    if (intervals < 1) throw DomainError("need at least one interval");
    const FilterFlow flow(model);
    WealthOptions wopt;
    wopt.max_step_fraction = options.max_step_fraction;
    for (int k = 0; k <= intervals; ++k) wopt.record_times.push_back(mkt.horizon_t * k / intervals);
    wopt.record_times.back() = mkt.horizon_t;
    const double scale = mkt.eta * std::exp(mkt.rate_r * mkt.horizon_t);
    const auto nk = static_cast<std::size_t>(intervals) + 1;
    std::vector<std::vector<double>> j(nk, std::vector<double>(n_paths));
    const RetentionFn fn = as_retention(strategy);
    parallel_for(n_paths, [&](std::size_t p) {
        const ClaimPath path = simulate_path(model, mkt.horizon_t, seed, p, options.arrivals);
        const WealthSample w = wealth_path(path, fn, premia, flow, mkt, wopt);
        for (std::size_t k = 0; k < nk; ++k)
            j[k][p] = std::exp(-scale * w.discounted[k]) * value.at(w.times[k], w.filter[k]);
    });
    SnellDiagnostics d;
    d.strategy = strategy.name();
    d.times = wopt.record_times;
    d.n_paths = n_paths;
    d.caveat = "continuation value taken from the dynamic-programming table; drift includes its discretization error";
    for (std::size_t k = 0; k < nk; ++k) {
        d.mean_j.push_back(pairwise_sum(j[k]) / static_cast<double>(n_paths));
        for (double x : j[k]) d.max_j_squared = std::max(d.max_j_squared, x * x);
    }
    std::vector<double> inc(n_paths);
    for (std::size_t k = 0; k + 1 < nk; ++k) {
        for (std::size_t p = 0; p < n_paths; ++p) inc[p] = j[k + 1][p] - j[k][p];
        const MeanSe ms = mean_and_se(inc);
        d.drift.push_back({d.times[k], d.times[k + 1], ms.mean, ms.se});
    }
    return d;
}

InformationReport compare_information(const ModelSpec& model, const Contract& contract, const PremiumSpec& spec,
                                      const MarketParams& mkt, const SolverConfig& config) {
    InformationReport rep;
    if (!model.shared_claims()) rep.precondition_failures.push_back("claim-size law differs across states");
    if (!model.intensities_sorted()) rep.precondition_failures.push_back("intensities are not non-decreasing in the state index");
    rep.preconditions_met = rep.precondition_failures.empty();
    rep.solution = solve_backward(model, contract, spec, mkt, config);
    const auto& value = rep.solution.value;
    const auto& policy = rep.solution.policy;
    const auto& lat = *value.lattice;
    const FilterFlow flow(model);
    std::vector<Stencil> jump_st(lat.size());
    if (model.shared_claims())
        for (std::size_t p = 0; p < lat.size(); ++p) jump_st[p] = lat.stencil(flow.jump_shared(lat.point(p)));

    rep.max_violation = -kInf;
    rep.min_jump_margin = kInf;
    rep.times = value.times;
    for (std::size_t k = 0; k < value.times.size(); ++k) {
        const double t = value.times[k];
        double uf = kInf;
        for (std::size_t i = 0; i < model.num_states(); ++i)
            uf = std::min(uf, full_info_retention(model, i, contract, spec, mkt, t));
        rep.full_info.push_back(uf);
        double worst = -kInf;
        for (std::size_t p = 0; p < lat.size(); ++p) {
            worst = std::max(worst, policy.slices[k][p]);
            if (model.shared_claims())
                rep.min_jump_margin = std::min(rep.min_jump_margin, jump_st[p].apply(value.slices[k]) - value.slices[k][p]);
        }
        rep.max_partial.push_back(worst);
        rep.max_violation = std::max(rep.max_violation, worst - uf);
    }
    return rep;
}

SweepResult theta_sweep(const ModelSpec& model, const Contract& contract, const PremiumSpec& spec,
                        const MarketParams& mkt, const std::vector<double>& thetas, const SolverConfig& config,
                        double slack) {
    SweepResult out;
    out.thetas = thetas;
    std::sort(out.thetas.begin(), out.thetas.end());
    out.guaranteed = contract.is_proportional() && spec.reinsurer == Principle::ExpectedValue;
    for (double theta : out.thetas) {
        MarketParams m = mkt;
        m.theta = theta;
        out.policies.push_back(solve_backward(model, contract, spec, m, config).policy);
    }
    for (std::size_t j = 0; j + 1 < out.policies.size(); ++j) {
        const auto& a = out.policies[j].slices;
        const auto& b = out.policies[j + 1].slices;
        for (std::size_t k = 0; k < a.size(); ++k)
            for (std::size_t p = 0; p < a[k].size(); ++p) out.max_decrease = std::max(out.max_decrease, a[k][p] - b[k][p]);
    }
    out.monotone = out.max_decrease <= slack;
    return out;
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep, int time_stride) {
    if (sweep.policies.empty()) return;
    const auto& first = sweep.policies.front();
    const auto& lat = *first.lattice;
    os << "t";
    for (int i = 0; i < lat.dimension(); ++i) os << ",pi_" << (i + 1);
    for (double th : sweep.thetas) os << ",u_theta_" << fmt_num(th);
    os << '\n';
    const std::size_t nt = first.times.size();
    for (std::size_t k = 0; k < nt; ++k) {
        if (k % static_cast<std::size_t>(time_stride) != 0 && k + 1 != nt) continue;
        for (std::size_t p = 0; p < lat.size(); ++p) {
            os << fmt_num(first.times[k]);
            for (int i = 0; i < lat.dimension(); ++i) os << ',' << fmt_num(lat.point(p)[i]);
            for (const auto& pol : sweep.policies) os << ',' << fmt_num(pol.slices[k][p]);
            os << '\n';
        }
    }
}

void write_drift_csv(std::ostream& os, const SnellDiagnostics& diag) {
    os << "t0,t1,drift,std_error\n";
    for (const auto& d : diag.drift)
        os << fmt_num(d.t0) << ',' << fmt_num(d.t1) << ',' << fmt_num(d.mean) << ',' << fmt_num(d.std_error) << '\n';
}

}  // namespace reinsure
