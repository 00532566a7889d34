#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "reinsure/config.hpp"
#include "reinsure/errors.hpp"

namespace reinsure {

namespace {

using json = nlohmann::json;

void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError(path.empty() ? k : path + "." + k, "unknown key");
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    return j.get<double>();
}

double number_or(const json& obj, const std::string& path, const char* key, double fallback) {
    return obj.contains(key) ? get_number(obj.at(key), join(path, key)) : fallback;
}

long long integer_or(const json& obj, const std::string& path, const char* key, long long fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
    return v.get<long long>();
}

std::string string_or(const json& obj, const std::string& path, const char* key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
    return v.get<std::string>();
}

const json& require(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw ConfigError(join(path, key), "missing required key");
    return obj.at(key);
}

std::vector<double> number_list(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

ClaimDistribution parse_claims(const json& j, const std::string& path) {
    const std::string type = string_or(j, path, "type", "");
    try {
        if (type == "exponential") {
            allow_keys(j, path, {"type", "zeta"});
            return ClaimDistribution::exponential(get_number(require(j, path, "zeta"), join(path, "zeta")));
        }
        if (type == "gamma") {
            allow_keys(j, path, {"type", "alpha", "zeta"});
            return ClaimDistribution::gamma(get_number(require(j, path, "alpha"), join(path, "alpha")),
                                            get_number(require(j, path, "zeta"), join(path, "zeta")));
        }
        if (type == "truncated_normal") {
            allow_keys(j, path, {"type", "mu", "sigma"});
            return ClaimDistribution::truncated_normal(get_number(require(j, path, "mu"), join(path, "mu")),
                                                       get_number(require(j, path, "sigma"), join(path, "sigma")));
        }
        if (type == "point_mass") {
            allow_keys(j, path, {"type", "size"});
            return ClaimDistribution::point_mass(get_number(require(j, path, "size"), join(path, "size")));
        }
        if (type == "discrete") {
            allow_keys(j, path, {"type", "atoms"});
            const json& atoms = require(j, path, "atoms");
            if (!atoms.is_array()) throw ConfigError(join(path, "atoms"), "expected an array");
            std::vector<Atom> out;
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                const std::string ap = join(path, "atoms") + "[" + std::to_string(i) + "]";
                allow_keys(atoms[i], ap, {"size", "prob"});
                out.push_back({get_number(require(atoms[i], ap, "size"), join(ap, "size")),
                               get_number(require(atoms[i], ap, "prob"), join(ap, "prob"))});
            }
            return ClaimDistribution::discrete(std::move(out));
        }
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
    throw ConfigError(join(path, "type"), "unknown claim law '" + type + "'");
}

ModelSpec parse_model(const json& j) {
    const std::string path = "model";
    allow_keys(j, path, {"generator", "intensities", "claims", "initial_distribution", "initial_state"});
    ModelSpec m;
    m.intensities = number_list(require(j, path, "intensities"), "model.intensities");
    const auto n = static_cast<Eigen::Index>(m.intensities.size());
    if (j.contains("generator")) {
        const json& g = j.at("generator");
        if (!g.is_array() || static_cast<Eigen::Index>(g.size()) != n)
            throw ConfigError("model.generator", "expected " + std::to_string(n) + " rows");
        m.generator.resize(n, n);
        for (Eigen::Index r = 0; r < n; ++r) {
            const auto row = number_list(g[static_cast<std::size_t>(r)], "model.generator[" + std::to_string(r) + "]");
            if (static_cast<Eigen::Index>(row.size()) != n)
                throw ConfigError("model.generator[" + std::to_string(r) + "]", "expected " + std::to_string(n) + " entries");
            for (Eigen::Index c = 0; c < n; ++c) m.generator(r, c) = row[static_cast<std::size_t>(c)];
        }
    } else if (n == 1) {
        m.generator = Eigen::MatrixXd::Zero(1, 1);
    } else {
        throw ConfigError("model.generator", "missing required key");
    }
    const json& claims = require(j, path, "claims");
    if (claims.is_array()) {
        for (std::size_t i = 0; i < claims.size(); ++i)
            m.claims.push_back(parse_claims(claims[i], "model.claims[" + std::to_string(i) + "]"));
    } else {
        const ClaimDistribution shared = parse_claims(claims, "model.claims");
        m.claims.assign(m.intensities.size(), shared);
    }
    if (j.contains("initial_distribution") && j.contains("initial_state"))
        throw ConfigError("model", "give either initial_distribution or initial_state, not both");
    if (j.contains("initial_distribution")) {
        const auto d = number_list(j.at("initial_distribution"), "model.initial_distribution");
        m.initial_distribution = Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
    } else if (j.contains("initial_state")) {
        const long long s = integer_or(j, path, "initial_state", 1);
        if (s < 1 || s > n) throw ConfigError("model.initial_state", "must be in 1.." + std::to_string(n));
        m.initial_distribution = Eigen::VectorXd::Zero(n);
        m.initial_distribution[static_cast<Eigen::Index>(s - 1)] = 1.0;
    } else {
        m.initial_distribution = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    }
    m.validate();
    return m;
}

std::string line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(line_col(text, e.byte == 0 ? 0 : e.byte - 1), "JSON syntax error");
    }
    allow_keys(root, "", {"model", "market", "contract", "premium", "solver", "evaluation", "sweep", "events", "output"});
    ScenarioConfig cfg;
    cfg.model = parse_model(require(root, "", "model"));

    if (root.contains("market")) {
        const json& j = root.at("market");
        allow_keys(j, "market", {"eta", "rate", "horizon", "initial_wealth", "theta", "theta_i"});
        auto& m = cfg.market;
        m.eta = number_or(j, "market", "eta", m.eta);
        m.rate_r = number_or(j, "market", "rate", m.rate_r);
        m.horizon_t = number_or(j, "market", "horizon", m.horizon_t);
        m.initial_wealth = number_or(j, "market", "initial_wealth", m.initial_wealth);
        m.theta = number_or(j, "market", "theta", m.theta);
        m.theta_i = number_or(j, "market", "theta_i", m.theta_i);
    }
    cfg.market.validate();

    if (root.contains("contract")) {
        const json& j = root.at("contract");
        allow_keys(j, "contract", {"type"});
        const std::string type = string_or(j, "contract", "type", "proportional");
        if (type == "proportional")
            cfg.contract = Contract::proportional();
        else if (type == "excess_of_loss")
            cfg.contract = Contract::excess_of_loss();
        else
            throw ConfigError("contract.type", "unknown contract '" + type + "'");
    }

    if (root.contains("premium")) {
        const json& j = root.at("premium");
        allow_keys(j, "premium", {"insurer", "reinsurer"});
        try {
            cfg.premium.insurer = principle_from_string(string_or(j, "premium", "insurer", "expected_value"));
            cfg.premium.reinsurer = principle_from_string(string_or(j, "premium", "reinsurer", "expected_value"));
        } catch (const ConfigError& e) {
            throw ConfigError("premium", e.what());
        }
    }

    if (root.contains("solver")) {
        const json& j = root.at("solver");
        allow_keys(j, "solver", {"time_steps", "resolution", "root_tol", "quadrature_panels"});
        auto& s = cfg.solver;
        s.time_steps = static_cast<int>(integer_or(j, "solver", "time_steps", s.time_steps));
        s.resolution = static_cast<int>(integer_or(j, "solver", "resolution", s.resolution));
        s.root_tol = number_or(j, "solver", "root_tol", s.root_tol);
        s.quadrature_panels = static_cast<int>(integer_or(j, "solver", "quadrature_panels", s.quadrature_panels));
    }
    cfg.solver.validate();

    if (root.contains("evaluation")) {
        const json& j = root.at("evaluation");
        allow_keys(j, "evaluation", {"paths", "seed", "baselines", "diagnostic_intervals", "arrivals"});
        auto& e = cfg.evaluation;
        const long long paths = integer_or(j, "evaluation", "paths", static_cast<long long>(e.paths));
        if (paths < 1) throw ConfigError("evaluation.paths", "must be >= 1");
        e.paths = static_cast<std::size_t>(paths);
        if (j.contains("seed")) {
            if (!j.at("seed").is_number_integer() || j.at("seed").get<long long>() < 0)
                throw ConfigError("evaluation.seed", "expected a non-negative integer");
            e.seed = j.at("seed").get<std::uint64_t>();
        }
        if (j.contains("baselines")) {
            const json& b = j.at("baselines");
            if (!b.is_array()) throw ConfigError("evaluation.baselines", "expected an array");
            e.baselines.clear();
            for (std::size_t i = 0; i < b.size(); ++i) {
                const std::string bp = "evaluation.baselines[" + std::to_string(i) + "]";
                if (b[i].is_string() && b[i].get<std::string>() == "I")
                    e.baselines.push_back(kInf);
                else
                    e.baselines.push_back(get_number(b[i], bp));
            }
        }
        e.diagnostic_intervals = static_cast<int>(integer_or(j, "evaluation", "diagnostic_intervals", e.diagnostic_intervals));
        if (e.diagnostic_intervals < 1) throw ConfigError("evaluation.diagnostic_intervals", "must be >= 1");
        const std::string arr = string_or(j, "evaluation", "arrivals", "per_sojourn");
        if (arr == "per_sojourn")
            e.arrivals = ArrivalMethod::PerSojourn;
        else if (arr == "thinning")
            e.arrivals = ArrivalMethod::Thinning;
        else
            throw ConfigError("evaluation.arrivals", "expected 'per_sojourn' or 'thinning'");
    }

    if (root.contains("sweep")) {
        const json& j = root.at("sweep");
        allow_keys(j, "sweep", {"thetas"});
        if (j.contains("thetas")) cfg.sweep_thetas = number_list(j.at("thetas"), "sweep.thetas");
    }

    if (root.contains("events")) {
        const json& ev = root.at("events");
        if (!ev.is_array()) throw ConfigError("events", "expected an array");
        for (std::size_t i = 0; i < ev.size(); ++i) {
            const std::string ep = "events[" + std::to_string(i) + "]";
            allow_keys(ev[i], ep, {"time", "size"});
            cfg.events.push_back({get_number(require(ev[i], ep, "time"), join(ep, "time")),
                                  get_number(require(ev[i], ep, "size"), join(ep, "size"))});
        }
    }

    if (root.contains("output")) {
        const json& j = root.at("output");
        allow_keys(j, "output", {"dir"});
        cfg.output_dir = string_or(j, "output", "dir", cfg.output_dir);
    }
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open configuration file");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_scenario(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.where(), std::string(e.what()).substr(e.where().empty() ? 0 : e.where().size() + 2));
    }
}

}  // namespace reinsure
