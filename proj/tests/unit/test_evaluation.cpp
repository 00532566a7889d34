#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "common.hpp"
#include "reinsure/evaluation.hpp"
#include "reinsure/parallel.hpp"

using namespace reinsure;

namespace {

SolverConfig grid(int steps, int res) {
    SolverConfig c;
    c.time_steps = steps;
    c.resolution = res;
    return c;
}

}  // namespace

TEST_CASE("utility of no reinsurance under point-mass claims") {
    const auto m = ModelSpec::single_state(1.2, ClaimDistribution::point_mass(1.0));
    auto mkt = fixtures::market();
    mkt.initial_wealth = 0.5;
    mkt.eta = 0.7;
    const PremiumModel pm(m, mkt, {}, Contract::proportional());
    const auto est = mc_expected_utility(m, Strategy::constant(1.0, 1.0, 1.0), pm, mkt, 40000, 3);
    const double c = 1.1 * 1.2;
    const double expected = 1.0 - std::exp(-0.7 * (0.5 + c)) * std::exp(1.2 * std::expm1(0.7));
    CHECK(std::abs(est.mean - expected) < 3.0 * est.std_error);
}

TEST_CASE("no claims gives a deterministic utility") {
    const auto m = ModelSpec::single_state(1e-12, ClaimDistribution::exponential(3.0));
    auto mkt = fixtures::market();
    mkt.initial_wealth = 1.0;
    const PremiumModel pm(m, mkt, {}, Contract::proportional());
    const auto est = mc_expected_utility(m, Strategy::constant(0.5, 1.0, 1.0), pm, mkt, 500, 3);
    CHECK(est.std_error < 1e-15);
    CHECK(est.mean == doctest::Approx(-std::expm1(-1.0)).epsilon(1e-10));
}

TEST_CASE("estimates do not depend on the worker count") {
    const auto m = fixtures::two_state();
    const auto mkt = fixtures::market();
    const PremiumModel pm(m, mkt, {}, Contract::proportional());
    const auto s = Strategy::constant(0.6, 1.0, 1.0);
    setenv("REINSURE_THREADS", "1", 1);
    const auto a = mc_expected_utility(m, s, pm, mkt, 3000, 21);
    unsetenv("REINSURE_THREADS");
    const auto b = mc_expected_utility(m, s, pm, mkt, 3000, 21);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    std::vector<double> xs{1e16, 1.0, -1e16, 1.0};
    CHECK(pairwise_sum(xs) == pairwise_sum(std::vector<double>(xs)));
}

TEST_CASE("single-state policy is a martingale in the diagnostic") {
    const auto m = ModelSpec::single_state(1.0, ClaimDistribution::exponential(5.0));
    const auto mkt = fixtures::market();
    const auto sol = solve_backward(m, Contract::proportional(), PremiumSpec{}, mkt, grid(500, 2));
    const PremiumModel pm(m, mkt, {}, Contract::proportional());
    const auto s = Strategy::feedback(std::make_shared<const PolicyTable>(sol.policy), 1.0, 1.0);
    const auto d = bellman_diagnostic(m, s, sol.value, pm, mkt, 20000, 5, 13);
    for (const auto& iv : d.drift) CHECK(std::abs(iv.mean) <= 3.0 * iv.std_error + 1e-12);
    const auto oracle = single_state_oracle(m, Contract::proportional(), PremiumSpec{}, mkt, 500);
    CHECK(d.mean_j.front() == doctest::Approx(oracle.value.front()).epsilon(1e-3));
    CHECK(std::isfinite(d.max_j_squared));
    const auto d2 = bellman_diagnostic(m, s, sol.value, pm, mkt, 40000, 5, 13);
    CHECK(d2.max_j_squared >= d.max_j_squared);
    CHECK(d2.max_j_squared < 4.0 * d.max_j_squared);
    std::ostringstream os;
    write_drift_csv(os, d);
    CHECK(os.str().rfind("t0,t1,drift,std_error\n", 0) == 0);
}

TEST_CASE("information comparison degenerates for one state") {
    const auto m = ModelSpec::single_state(1.0, ClaimDistribution::exponential(5.0));
    const auto rep = compare_information(m, Contract::proportional(), {}, fixtures::market(), grid(200, 2));
    CHECK(rep.preconditions_met);
    CHECK(rep.max_violation <= 1e-6);
}

TEST_CASE("information comparison flags reversed intensities") {
    const auto m = fixtures::two_state(2.0, 1.0);
    const auto rep = compare_information(m, Contract::proportional(), {}, fixtures::market(), grid(50, 11));
    CHECK_FALSE(rep.preconditions_met);
    CHECK_FALSE(rep.precondition_failures.empty());
}

TEST_CASE("information comparison on the two-state model") {
    const auto m = fixtures::two_state();
    const auto rep = compare_information(m, Contract::proportional(), {}, fixtures::market(), grid(100, 21));
    CHECK(rep.preconditions_met);
    CHECK(rep.max_violation <= 1e-6);
    CHECK(rep.min_jump_margin >= -1e-8);
}

TEST_CASE("loading sweep") {
    const auto m = fixtures::two_state();
    const auto mkt = fixtures::market(0.3, 0.04);
    const auto res = theta_sweep(m, Contract::proportional(), {}, mkt, {0.4, 0.05, 0.2, 0.1}, grid(100, 21));
    CHECK(res.guaranteed);
    CHECK(res.monotone);
    CHECK(res.thetas.front() == 0.05);
    // above the upper threshold everywhere: the column is all ones
    const auto high = theta_sweep(m, Contract::proportional(), {}, mkt, {3.0}, grid(100, 21));
    for (const auto& s : high.policies.front().slices)
        for (double u : s) CHECK(u == 1.0);
    std::ostringstream os;
    write_sweep_csv(os, res);
    CHECK(os.str().rfind("t,pi_1,pi_2,u_theta_0.050000000000000003,", 0) == 0);
}

TEST_CASE("feedback policy is not beaten by constants") {
    const auto m = fixtures::two_state();
    const auto mkt = fixtures::market();
    const auto sol = solve_backward(m, Contract::proportional(), PremiumSpec{}, mkt, grid(200, 41));
    const PremiumModel pm(m, mkt, {}, Contract::proportional());
    std::vector<Strategy> ss{Strategy::feedback(std::make_shared<const PolicyTable>(sol.policy), 1.0, 1.0)};
    for (double u : {0.0, 1.0, 0.25, 0.5, 0.75}) ss.push_back(Strategy::constant(u, 1.0, 1.0));
    const auto est = mc_expected_utility(m, ss, pm, mkt, 20000, 5);
    for (std::size_t i = 1; i < est.size(); ++i)
        CHECK(est[0].mean >= est[i].mean - 2.0 * combined_std_error(est[0], est[i]));
}
