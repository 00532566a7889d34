#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "reinsure/config.hpp"
#include "reinsure/errors.hpp"
#include "reinsure/evaluation.hpp"

namespace py = pybind11;
using namespace reinsure;

namespace {

Solution solve(const ModelSpec& model, const Contract& contract, const PremiumSpec& spec, const MarketParams& mkt,
               int time_steps, int resolution) {
    SolverConfig cfg;
    cfg.time_steps = time_steps;
    cfg.resolution = resolution;
    py::gil_scoped_release release;
    return solve_backward(model, contract, spec, mkt, cfg);
}

}  // namespace

PYBIND11_MODULE(_reinsure, m) {
    m.doc() = "Optimal reinsurance with a hidden Markov environment";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<StabilityError>(m, "StabilityError", PyExc_RuntimeError);
    py::register_exception<DegenerateObservation>(m, "DegenerateObservation", PyExc_ValueError);

    py::class_<MarketParams>(m, "MarketParams")
        .def(py::init([](double eta, double rate, double horizon, double initial_wealth, double theta, double theta_i) {
                 MarketParams p{eta, rate, horizon, initial_wealth, theta, theta_i};
                 p.validate();
                 return p;
             }),
             py::arg("eta") = 1.0, py::arg("rate") = 0.0, py::arg("horizon") = 1.0, py::arg("initial_wealth") = 0.0,
             py::arg("theta") = 0.3, py::arg("theta_i") = 0.1)
        .def_readwrite("eta", &MarketParams::eta)
        .def_readwrite("rate", &MarketParams::rate_r)
        .def_readwrite("horizon", &MarketParams::horizon_t)
        .def_readwrite("initial_wealth", &MarketParams::initial_wealth)
        .def_readwrite("theta", &MarketParams::theta)
        .def_readwrite("theta_i", &MarketParams::theta_i)
        .def("risk_factor", &MarketParams::risk_factor);

    py::class_<ClaimDistribution>(m, "ClaimDistribution")
        .def_static("exponential", &ClaimDistribution::exponential, py::arg("zeta"))
        .def_static("gamma", &ClaimDistribution::gamma, py::arg("alpha"), py::arg("zeta"))
        .def_static("truncated_normal", &ClaimDistribution::truncated_normal, py::arg("mu"), py::arg("sigma"))
        .def_static("point_mass", &ClaimDistribution::point_mass, py::arg("size"))
        .def_static("discrete",
                    [](const std::vector<std::pair<double, double>>& atoms) {
                        std::vector<Atom> a;
                        for (const auto& [z, p] : atoms) a.push_back({z, p});
                        return ClaimDistribution::discrete(std::move(a));
                    },
                    py::arg("atoms"))
        .def("mean", &ClaimDistribution::mean)
        .def("second_moment", &ClaimDistribution::second_moment)
        .def("__repr__", &ClaimDistribution::describe);

    m.def("mgf", &mgf, py::arg("dist"), py::arg("k"));

    py::class_<Contract>(m, "Contract")
        .def_static("proportional", &Contract::proportional)
        .def_static("excess_of_loss", &Contract::excess_of_loss)
        .def_property_readonly("cap", &Contract::cap)
        .def_property_readonly("name", &Contract::name);
    m.def("retained", &retained, py::arg("contract"), py::arg("z"), py::arg("u"));
    m.def("exp_moment", &exp_moment, py::arg("dist"), py::arg("a"), py::arg("contract"), py::arg("u"));

    py::enum_<Principle>(m, "Principle")
        .value("EXPECTED_VALUE", Principle::ExpectedValue)
        .value("VARIANCE", Principle::Variance);
    py::class_<PremiumSpec>(m, "PremiumSpec")
        .def(py::init([](Principle insurer, Principle reinsurer) { return PremiumSpec{insurer, reinsurer}; }),
             py::arg("insurer") = Principle::ExpectedValue, py::arg("reinsurer") = Principle::ExpectedValue)
        .def_readwrite("insurer", &PremiumSpec::insurer)
        .def_readwrite("reinsurer", &PremiumSpec::reinsurer);

    py::class_<ModelSpec>(m, "ModelSpec")
        .def(py::init([](Eigen::MatrixXd generator, std::vector<double> intensities, std::vector<ClaimDistribution> claims,
                         Eigen::VectorXd initial) {
                 ModelSpec s{std::move(generator), std::move(intensities), std::move(claims), std::move(initial)};
                 s.validate();
                 return s;
             }),
             py::arg("generator"), py::arg("intensities"), py::arg("claims"), py::arg("initial_distribution"))
        .def_static("single_state", &ModelSpec::single_state, py::arg("intensity"), py::arg("claims"))
        .def_readonly("generator", &ModelSpec::generator)
        .def_readonly("intensities", &ModelSpec::intensities)
        .def_readonly("initial_distribution", &ModelSpec::initial_distribution)
        .def_property_readonly("num_states", &ModelSpec::num_states);

    m.def("load_scenario", [](const std::string& path) {
        const ScenarioConfig c = load_scenario(path);
        py::dict d;
        d["model"] = c.model;
        d["market"] = c.market;
        d["contract"] = c.contract;
        d["premium"] = c.premium;
        d["time_steps"] = c.solver.time_steps;
        d["resolution"] = c.solver.resolution;
        d["paths"] = c.evaluation.paths;
        d["seed"] = c.evaluation.seed;
        return d;
    });

    m.def("propagate", [](const Eigen::VectorXd& pi, double dt, const ModelSpec& model) {
        return propagate({pi, 0.0}, dt, model).pi;
    }, py::arg("pi"), py::arg("dt"), py::arg("model"));
    m.def("jump_update", [](const Eigen::VectorXd& pi, double z, const ModelSpec& model) {
        return jump_update({pi, 0.0}, z, model).pi;
    }, py::arg("pi"), py::arg("z"), py::arg("model"));
    m.def("ks_rhs", &ks_rhs, py::arg("pi"), py::arg("model"));

    m.def("insurer_premium", &insurer_premium, py::arg("pi"), py::arg("model"), py::arg("principle"), py::arg("theta_i"));
    m.def("reinsurance_premium", &reinsurance_premium, py::arg("pi"), py::arg("model"), py::arg("principle"),
          py::arg("theta"), py::arg("contract"), py::arg("u"));

    py::class_<Solution>(m, "Solution")
        .def_property_readonly("times", [](const Solution& s) { return s.value.times; })
        .def_property_readonly("points", [](const Solution& s) { return s.value.lattice->points(); })
        .def_property_readonly("value", [](const Solution& s) { return s.value.slices; })
        .def_property_readonly("policy", [](const Solution& s) { return s.policy.slices; })
        .def("value_at", [](const Solution& s, double t, const Eigen::VectorXd& pi) { return s.value.at(t, pi); })
        .def("policy_at", [](const Solution& s, double t, const Eigen::VectorXd& pi) { return s.policy.at(t, pi); });

    m.def("solve", &solve, py::arg("model"), py::arg("contract"), py::arg("premium"), py::arg("market"),
          py::arg("time_steps") = 500, py::arg("resolution") = 201);
    m.def("full_info_retention",
          [](const ModelSpec& model, std::size_t state, const Contract& c, const PremiumSpec& spec, const MarketParams& mkt,
             double t) { return full_info_retention(model, state, c, spec, mkt, t); },
          py::arg("model"), py::arg("state"), py::arg("contract"), py::arg("premium"), py::arg("market"), py::arg("t"));

    m.def("expected_utility",
          [](const ModelSpec& model, const Solution& sol, const Contract& c, const PremiumSpec& spec, const MarketParams& mkt,
             const std::vector<double>& constants, std::size_t n_paths, std::uint64_t seed) {
              const PremiumModel pm(model, mkt, spec, c);
              std::vector<Strategy> ss{
                  Strategy::feedback(std::make_shared<const PolicyTable>(sol.policy), mkt.horizon_t, c.cap())};
              for (double u : constants) ss.push_back(Strategy::constant(u, mkt.horizon_t, c.cap()));
              std::vector<UtilityEstimate> est;
              {
                  py::gil_scoped_release release;
                  est = mc_expected_utility(model, ss, pm, mkt, n_paths, seed);
              }
              py::list out;
              for (const auto& e : est) out.append(py::make_tuple(e.strategy, e.mean, e.std_error));
              return out;
          },
          py::arg("model"), py::arg("solution"), py::arg("contract"), py::arg("premium"), py::arg("market"),
          py::arg("constants"), py::arg("n_paths"), py::arg("seed"));
}
