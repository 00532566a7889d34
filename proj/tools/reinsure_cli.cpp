#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "reinsure/config.hpp"
#include "reinsure/errors.hpp"
#include "reinsure/evaluation.hpp"
#include "reinsure/io.hpp"
#include "reinsure/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace reinsure;

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailed = 1;
constexpr int kConfigError = 2;

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> paths;
    std::optional<int> dt;
    std::optional<int> resolution;
    bool diagnostics = false;
};

// JSON with every double at 17 significant digits; non-finite values become strings.
void emit(std::ostream& os, const json& j, int indent = 0) {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) { os << "{}"; return; }
        os << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ",\n";
            first = false;
            os << pad << json(it.key()).dump() << ": ";
            emit(os, it.value(), indent + 2);
        }
        os << '\n' << close << '}';
        return;
    }
    case json::value_t::array: {
        if (j.empty()) { os << "[]"; return; }
        os << "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) os << ",\n";
            os << pad;
            emit(os, j[i], indent + 2);
        }
        os << '\n' << close << ']';
        return;
    }
    case json::value_t::number_float: {
        const double x = j.get<double>();
        if (std::isfinite(x)) os << fmt_num(x);
        else os << '"' << fmt_num(x) << '"';
        return;
    }
    default:
        os << j.dump();
    }
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream os(p);
    emit(os, j);
    os << '\n';
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    return os;
}

json vec_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

class Runner {
public:
    Runner(ScenarioConfig cfg, const Flags& f) : cfg_(std::move(cfg)) {
        if (f.seed) cfg_.evaluation.seed = *f.seed;
        if (f.paths) cfg_.evaluation.paths = *f.paths;
        if (f.dt) cfg_.solver.time_steps = *f.dt;
        if (f.resolution) cfg_.solver.resolution = *f.resolution;
        if (f.out) cfg_.output_dir = *f.out;
        diagnostics_ = f.diagnostics;
        try {
            cfg_.solver.validate();
        } catch (const std::exception& e) {
            throw ConfigError("solver", e.what());
        }
        if (cfg_.evaluation.paths == 0) throw ConfigError("evaluation.paths", "must be positive");
        out_ = cfg_.output_dir;
        fs::create_directories(out_);
    }

    int simulate() {
        const auto& m = cfg_.model;
        std::vector<ClaimPath> paths(cfg_.evaluation.paths);
        for (std::size_t k = 0; k < paths.size(); ++k)
            paths[k] = simulate_path(m, cfg_.market.horizon_t, cfg_.evaluation.seed, k, cfg_.evaluation.arrivals);
        auto os = open_out(out_ / "paths.csv");
        write_paths_csv(os, paths);
        std::cerr << "wrote " << paths.size() << " paths to " << (out_ / "paths.csv").string() << '\n';
        return kOk;
    }

    int filter() {
        std::vector<Observation> events = cfg_.events;
        if (events.empty()) {
            const ClaimPath path = simulate_path(cfg_.model, cfg_.market.horizon_t, cfg_.evaluation.seed, 0,
                                                 cfg_.evaluation.arrivals);
            events = path.observations();
        }
        std::vector<double> grid;
        const int n = cfg_.solver.time_steps;
        for (int k = 0; k <= n; ++k) grid.push_back(cfg_.market.horizon_t * k / n);
        const FilterTrajectory traj = run_filter(events, cfg_.model, grid);
        auto os = open_out(out_ / "filter.csv");
        write_filter_csv(os, traj);
        std::cerr << "filtered " << events.size() << " claims\n";
        return kOk;
    }

    int solve() {
        const Solution& sol = solution(false);
        auto os = open_out(out_ / "value.csv");
        write_solution_csv(os, sol);
        const Eigen::VectorXd& p0 = cfg_.model.initial_distribution;
        json j;
        j["time_steps"] = cfg_.solver.time_steps;
        j["resolution"] = cfg_.solver.resolution;
        j["initial_filter"] = vec_json(p0);
        j["value_at_start"] = sol.value.at(0.0, p0);
        j["retention_at_start"] = sol.policy.at(0.0, p0);
        write_json(out_ / "solve.json", j);
        std::cerr << "v(0, pi_0) = " << fmt_num(sol.value.at(0.0, p0)) << '\n';
        return kOk;
    }

    int evaluate() {
        const Solution& sol = solution(true);
        const auto& mkt = cfg_.market;
        const double cap = cfg_.contract.cap();
        auto policy = std::make_shared<const PolicyTable>(sol.policy);
        std::vector<Strategy> strategies{Strategy::feedback(policy, mkt.horizon_t, cap)};
        for (double b : cfg_.evaluation.baselines) {
            const double u = std::isinf(b) ? cap : b;
            if (u > cap) throw ConfigError("evaluation.baselines", "retention above the contract cap");
            strategies.push_back(Strategy::constant(u, mkt.horizon_t, cap));
        }
        const PremiumModel premia(cfg_.model, mkt, cfg_.premium, cfg_.contract);
        MonteCarloOptions opts;
        opts.arrivals = cfg_.evaluation.arrivals;
        const auto est = mc_expected_utility(cfg_.model, strategies, premia, mkt, cfg_.evaluation.paths,
                                             cfg_.evaluation.seed, opts);
        json j;
        j["n_paths"] = cfg_.evaluation.paths;
        j["seed"] = cfg_.evaluation.seed;
        j["estimates"] = json::array();
        for (const auto& e : est)
            j["estimates"].push_back({{"strategy", e.strategy}, {"mean", e.mean}, {"std_error", e.std_error}});
        bool pass = true;
        j["comparisons"] = json::array();
        for (std::size_t s = 1; s < est.size(); ++s) {
            const double se = combined_std_error(est[0], est[s]);
            const double margin = est[0].mean - est[s].mean + 2.0 * se;
            const bool ok = margin >= 0.0;
            pass = pass && ok;
            j["comparisons"].push_back(
                {{"baseline", est[s].strategy}, {"difference", est[0].mean - est[s].mean}, {"combined_std_error", se}, {"pass", ok}});
        }
        j["pass"] = pass;
        if (diagnostics_) {
            auto value = std::make_shared<const ValueTable>(sol.value);
            j["diagnostics"] = json::array();
            for (const auto& s : strategies) {
                const SnellDiagnostics d = bellman_diagnostic(cfg_.model, s, *value, premia, mkt, cfg_.evaluation.paths,
                                                              cfg_.evaluation.diagnostic_intervals,
                                                              cfg_.evaluation.seed, opts);
                auto os = open_out(out_ / ("drift_" + s.name() + ".csv"));
                write_drift_csv(os, d);
                double worst = kInf;
                for (const auto& iv : d.drift) worst = std::min(worst, iv.mean / iv.std_error);
                j["diagnostics"].push_back({{"strategy", s.name()}, {"min_drift_z", worst}, {"caveat", d.caveat}});
            }
        }
        write_json(out_ / "evaluation.json", j);
        for (const auto& e : est) std::cerr << e.strategy << ' ' << fmt_num(e.mean) << " +- " << fmt_num(e.std_error) << '\n';
        return pass ? kOk : kValidationFailed;
    }

    int compare() {
        const InformationReport rep = compare_information(cfg_.model, cfg_.contract, cfg_.premium, cfg_.market, cfg_.solver);
        json j;
        j["preconditions_met"] = rep.preconditions_met;
        j["precondition_failures"] = rep.precondition_failures;
        j["max_violation"] = rep.max_violation;
        j["min_jump_margin"] = rep.min_jump_margin;
        const bool pass = rep.preconditions_met && rep.max_violation <= 1e-6 && rep.min_jump_margin >= -1e-8;
        j["pass"] = pass;
        write_json(out_ / "comparison.json", j);
        auto os = open_out(out_ / "comparison.csv");
        os << "t,u_full_information,max_u_partial\n";
        for (std::size_t k = 0; k < rep.times.size(); ++k)
            os << fmt_num(rep.times[k]) << ',' << fmt_num(rep.full_info[k]) << ',' << fmt_num(rep.max_partial[k]) << '\n';
        std::cerr << "max violation " << fmt_num(rep.max_violation) << ", min jump margin " << fmt_num(rep.min_jump_margin)
                  << '\n';
        return pass ? kOk : kValidationFailed;
    }

    int sweep() {
        for (double th : cfg_.sweep_thetas) {
            MarketParams m = cfg_.market;
            m.theta = th;
            try {
                m.validate();
            } catch (const std::exception& e) {
                throw ConfigError("sweep.thetas", e.what());
            }
        }
        const SweepResult res = theta_sweep(cfg_.model, cfg_.contract, cfg_.premium, cfg_.market, cfg_.sweep_thetas,
                                            cfg_.solver);
        auto os = open_out(out_ / "sweep.csv");
        write_sweep_csv(os, res);
        json j;
        j["thetas"] = res.thetas;
        j["guaranteed"] = res.guaranteed;
        j["monotone"] = res.monotone;
        j["max_decrease"] = res.max_decrease;
        write_json(out_ / "sweep.json", j);
        std::cerr << "monotone " << (res.monotone ? "yes" : "no") << ", max decrease " << fmt_num(res.max_decrease) << '\n';
        return (res.guaranteed && !res.monotone) ? kValidationFailed : kOk;
    }

    int validate() {
        const AdmissibilityReport adm = check_admissibility(cfg_.model, cfg_.market);
        const PremiumModel premia(cfg_.model, cfg_.market, cfg_.premium, cfg_.contract);
        std::vector<Eigen::VectorXd> pis{cfg_.model.initial_distribution};
        Stream rng(cfg_.evaluation.seed, 0, 3);
        const auto m = static_cast<Eigen::Index>(cfg_.model.num_states());
        for (int k = 0; k < 50; ++k) {
            Eigen::VectorXd p(m);
            for (Eigen::Index i = 0; i < m; ++i) p[i] = -std::log(rng.uniform());
            pis.push_back(p / p.sum());
        }
        const PremiumReport prem = validate_premium_contract(premia, pis);
        json j;
        j["admissibility"] = {{"pass", adm.pass}, {"binding_constant", adm.binding_constant}, {"states", json::array()}};
        for (const auto& s : adm.states)
            j["admissibility"]["states"].push_back({{"pass", s.pass}, {"abscissa", s.abscissa}, {"mgf_value", s.mgf_value}});
        j["premium_contract"] = {{"pass", prem.pass}, {"checks", prem.checks}, {"violations", json::array()}};
        for (const auto& v : prem.violations)
            j["premium_contract"]["violations"].push_back(
                {{"check", v.check}, {"pi", vec_json(v.pi)}, {"u", v.u}, {"value", v.value}});
        const bool pass = adm.pass && prem.pass;
        j["pass"] = pass;
        write_json(out_ / "validation.json", j);
        std::cout << (pass ? "pass" : "fail") << '\n';
        return pass ? kOk : kValidationFailed;
    }

private:
    const Solution& solution(bool reuse) {
        if (sol_) return *sol_;
        const fs::path cached = out_ / "value.csv";
        if (reuse && fs::exists(cached)) {
            std::ifstream is(cached);
            sol_ = read_solution_csv(is);
            sol_->policy.cap = cfg_.contract.cap();
            std::cerr << "reusing " << cached.string() << '\n';
        } else {
            sol_ = solve_backward(cfg_.model, cfg_.contract, cfg_.premium, cfg_.market, cfg_.solver);
        }
        return *sol_;
    }

    ScenarioConfig cfg_;
    fs::path out_;
    bool diagnostics_ = false;
    std::optional<Solution> sol_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal reinsurance under a hidden Markov environment"};
    app.require_subcommand(1);
    Flags f;
    auto add_common = [&f](CLI::App* sub) {
        sub->add_option("--config", f.config, "scenario JSON")->required();
        sub->add_option("--seed", f.seed, "random seed");
        sub->add_option("--out", f.out, "output directory");
        sub->add_option("--paths", f.paths, "Monte Carlo paths");
        sub->add_option("--dt", f.dt, "backward time steps");
        sub->add_option("--resolution", f.resolution, "lattice points per simplex edge");
    };
    const std::vector<std::pair<std::string, std::string>> commands{
        {"simulate", "simulate claim paths"},
        {"filter", "run the filter on given or simulated claims"},
        {"solve", "backward induction for value and policy"},
        {"evaluate", "Monte Carlo utility of the policy against constant retentions"},
        {"compare", "partial against full information"},
        {"sweep", "policies across reinsurer loadings"},
        {"validate", "admissibility and premium checks"},
    };
    for (const auto& [name, desc] : commands) {
        auto* sub = app.add_subcommand(name, desc);
        add_common(sub);
        if (name == "evaluate") sub->add_flag("--diagnostics", f.diagnostics, "also write drift diagnostics");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        Runner r(load_scenario(f.config), f);
        const auto t0 = std::chrono::steady_clock::now();
        int rc = kOk;
        if (cmd == "simulate") rc = r.simulate();
        else if (cmd == "filter") rc = r.filter();
        else if (cmd == "solve") rc = r.solve();
        else if (cmd == "evaluate") rc = r.evaluate();
        else if (cmd == "compare") rc = r.compare();
        else if (cmd == "sweep") rc = r.sweep();
        else rc = r.validate();
        std::cerr << cmd << " finished in "
                  << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s\n";
        return rc;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidationFailed;
    }
}
