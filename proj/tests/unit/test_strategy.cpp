#include <doctest.h>

#include "common.hpp"
#include "reinsure/strategy.hpp"

using namespace reinsure;

namespace {

// v(t, pi) = f(pi) on a two-slice table over [0, 1].
ValueTable table(int dim, int res, const std::function<double(const Eigen::VectorXd&)>& f) {
    ValueTable v;
    v.times = {0.0, 1.0};
    v.lattice = std::make_shared<const SimplexLattice>(dim, res);
    std::vector<double> s;
    for (const auto& p : v.lattice->points()) s.push_back(f(p));
    v.slices = {s, s};
    return v;
}

std::shared_ptr<const Driver> driver(const ModelSpec& m, const Contract& c, const MarketParams& mkt, PremiumSpec spec = {}) {
    return std::make_shared<const Driver>(m, c, std::make_shared<const PremiumModel>(m, mkt, spec, c), mkt);
}

SolverConfig grid(int steps, int res) {
    SolverConfig c;
    c.time_steps = steps;
    c.resolution = res;
    return c;
}

}  // namespace

TEST_CASE("constant and feedback strategies") {
    CHECK(Strategy::constant(0.4, 1.0, 1.0).evaluate(0.3, Eigen::Vector2d(0.2, 0.8)) == 0.4);
    const auto m = fixtures::two_state();
    const auto sol = solve_backward(m, Contract::proportional(), PremiumSpec{}, fixtures::market(), grid(40, 11));
    auto pol = std::make_shared<const PolicyTable>(sol.policy);
    const auto s = Strategy::feedback(pol, 1.0, 1.0);
    for (std::size_t k = 0; k < pol->times.size(); k += 5)
        for (std::size_t p = 0; p < pol->lattice->size(); ++p)
            CHECK(s.evaluate(pol->times[k], pol->lattice->point(p)) == pol->slices[k][p]);
    CHECK_THROWS(s.evaluate(1.5, m.initial_distribution));
}

TEST_CASE("full-information excess-of-loss strategy at the horizon") {
    const auto m = fixtures::two_state();
    const auto mkt = fixtures::market(0.3, 0.1, 0.04);
    const auto s = Strategy::full_information(m, 1, Contract::excess_of_loss(), {}, mkt, 50);
    CHECK(s.evaluate(1.0, m.initial_distribution) == doctest::Approx(std::log(1.3)).epsilon(1e-12));
    CHECK(s.evaluate(0.0, m.initial_distribution) == doctest::Approx(std::exp(-0.04) * std::log(1.3)).epsilon(1e-12));
}

TEST_CASE("excess-of-loss closed form") {
    const auto mkt = fixtures::market(0.3, 0.1, 0.02);
    const auto m1 = ModelSpec::single_state(1.0, ClaimDistribution::exponential(5.0));
    const auto d1 = driver(m1, Contract::excess_of_loss(), mkt);
    const auto flat = table(1, 1, [](const Eigen::VectorXd&) { return 0.8; });
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    CHECK(u_star_excess_ev(0.5, one, flat, *d1) ==
          doctest::Approx(full_info_retention(m1, 0, Contract::excess_of_loss(), {}, mkt, 0.5)).epsilon(1e-12));

    const auto m = fixtures::two_state();
    const auto d = driver(m, Contract::excess_of_loss(), mkt);
    const auto rising = table(2, 20, [](const Eigen::VectorXd& p) { return 1.0 + 0.1 * p[1]; });
    const double uf = full_info_retention(m, 0, Contract::excess_of_loss(), {}, mkt, 0.5);
    for (const auto& p : rising.lattice->points()) CHECK(u_star_excess_ev(0.5, p, rising, *d) <= uf + 1e-12);
    const auto steep = table(2, 20, [](const Eigen::VectorXd& p) { return std::exp(4.0 * p[1]); });
    CHECK(u_star_excess_ev(0.5, Eigen::Vector2d(0.5, 0.5), steep, *d) == 0.0);
}

TEST_CASE("proportional expected-value closed form") {
    const auto mkt = fixtures::market(0.3, 0.1, 0.03);
    const auto m1 = ModelSpec::single_state(1.0, ClaimDistribution::point_mass(1.0));
    const auto d1 = driver(m1, Contract::proportional(), mkt);
    const auto flat = table(1, 1, [](const Eigen::VectorXd&) { return 1.0; });
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    for (double t : {0.0, 0.5, 1.0})
        CHECK(u_star_prop_ev(t, one, flat, *d1) ==
              doctest::Approx(std::min(1.0, std::exp(-0.03 * (1.0 - t)) * std::log(1.3))).epsilon(1e-9));

    const auto m = fixtures::two_state();
    const auto v = table(2, 20, [](const Eigen::VectorXd& p) { return 1.0 + 0.08 * p[1]; });
    const Eigen::VectorXd pi = Eigen::Vector2d(0.6, 0.4);
    double prev = -1.0;
    for (double th : {0.12, 0.2, 0.3, 0.5, 0.8}) {
        const auto d = driver(m, Contract::proportional(), fixtures::market(th, 0.1));
        const double u = u_star_prop_ev(0.2, pi, v, *d);
        CHECK(u >= prev - 1e-9);
        prev = u;
    }
    const auto d = driver(m, Contract::proportional(), fixtures::market(0.3, 0.1));
    const auto th = loading_thresholds(0.2, pi, v, *d);
    CHECK(th.lower < th.upper);
    const auto below = driver(m, Contract::proportional(), fixtures::market(0.5 * th.lower, 0.1 * th.lower));
    CHECK(u_star_prop_ev(0.2, pi, v, *below) == 0.0);
    const auto above = driver(m, Contract::proportional(), fixtures::market(th.upper + 0.1, 0.1));
    CHECK(u_star_prop_ev(0.2, pi, v, *above) == 1.0);
}

TEST_CASE("thresholds agree with the solver's boundary choice") {
    const auto m = fixtures::two_state();
    const auto v = table(2, 20, [](const Eigen::VectorXd& p) { return 1.0 + 0.08 * p[1]; });
    const auto vf = [&](const Eigen::VectorXd& p) { return v.at(0.2, p); };
    const Eigen::VectorXd pi = Eigen::Vector2d(0.6, 0.4);
    const auto d = driver(m, Contract::proportional(), fixtures::market());
    const auto th = loading_thresholds(0.2, pi, v, *d);
    const auto below = driver(m, Contract::proportional(), fixtures::market(0.5 * th.lower, 0.1 * th.lower));
    CHECK(optimize_u(0.2, pi, vf, *below).tag == BoundaryTag::AtZero);
    const auto above = driver(m, Contract::proportional(), fixtures::market(th.upper + 0.1, 0.1));
    CHECK(optimize_u(0.2, pi, vf, *above).tag == BoundaryTag::AtCap);
}

TEST_CASE("proportional variance closed form") {
    const auto m1 = ModelSpec::single_state(1.0, ClaimDistribution::exponential(5.0));
    const auto flat = table(1, 1, [](const Eigen::VectorXd&) { return 1.0; });
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    for (double th : {0.15, 0.5, 2.0, 50.0}) {
        const auto d = driver(m1, Contract::proportional(), fixtures::market(th, 0.1), {Principle::Variance, Principle::Variance});
        const double u = u_star_prop_var(0.0, one, flat, *d);
        CHECK(u >= 0.0);
        CHECK(u <= 1.0);
    }
    // point mass c: r e^{kappa u c} = 1 + 2 theta c (1 - u)
    const double c = 0.8, theta = 0.3, kappa = 1.0;
    const auto m = fixtures::two_state();
    auto mp = m;
    mp.claims = {ClaimDistribution::point_mass(c), ClaimDistribution::point_mass(c)};
    const auto v = table(2, 20, [](const Eigen::VectorXd& p) { return 1.0 + 0.05 * p[1]; });
    const auto d = driver(mp, Contract::proportional(), fixtures::market(theta, 0.1), {Principle::Variance, Principle::Variance});
    const Eigen::VectorXd pi = Eigen::Vector2d(0.5, 0.5);
    const double r = jump_ratio(v, *d, 1.0, pi);
    const double u = u_star_prop_var(1.0, pi, v, *d);
    CHECK(u > 0.0);
    CHECK(r * std::exp(kappa * u * c) == doctest::Approx(1.0 + 2.0 * theta * c * (1.0 - u)).epsilon(1e-9));

    const auto steep = table(2, 20, [](const Eigen::VectorXd& p) { return std::exp(4.0 * p[1]); });
    CHECK(u_star_prop_var(1.0, pi, steep, *d) == 0.0);
}

TEST_CASE("closed forms agree with the solver policy") {
    const auto m = fixtures::two_state();
    const auto mkt = fixtures::market();
    struct Case {
        Contract c;
        PremiumSpec spec;
        int kind;
    };
    const std::vector<Case> cases{{Contract::proportional(), {}, 0},
                                  {Contract::proportional(), {Principle::Variance, Principle::Variance}, 1},
                                  {Contract::excess_of_loss(), {}, 2}};
    for (const auto& cs : cases) {
        const auto cfg = grid(200, 41);
        const auto pm = std::make_shared<const PremiumModel>(m, mkt, cs.spec, cs.c);
        const auto sol = solve_backward(m, cs.c, pm, mkt, cfg);
        const auto d = std::make_shared<const Driver>(m, cs.c, pm, mkt, cfg);
        const auto value = std::make_shared<const ValueTable>(sol.value);
        const Strategy s = cs.kind == 0   ? Strategy::closed_form_prop_ev(value, d)
                           : cs.kind == 1 ? Strategy::closed_form_prop_var(value, d)
                                          : Strategy::closed_form_excess_ev(value, d);
        double worst = 0.0;
        for (std::size_t k = 0; k + 1 < sol.policy.times.size(); k += 10)
            for (std::size_t p = 0; p < sol.policy.lattice->size(); ++p)
                worst = std::max(worst, std::abs(s.evaluate(sol.policy.times[k], sol.policy.lattice->point(p)) -
                                                 sol.policy.slices[k][p]));
        CHECK(worst <= 2e-2);
    }
}
