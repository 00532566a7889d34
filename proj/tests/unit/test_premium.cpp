#include <doctest.h>

#include <random>

#include "common.hpp"
#include "reinsure/premium.hpp"

using namespace reinsure;

namespace {

Eigen::VectorXd one() { return Eigen::VectorXd::Ones(1); }

std::vector<Eigen::VectorXd> random_filters(int m, int n, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::exponential_distribution<double> e(1.0);
    std::vector<Eigen::VectorXd> out;
    for (int k = 0; k < n; ++k) {
        Eigen::VectorXd p(m);
        for (int i = 0; i < m; ++i) p[i] = e(gen);
        out.push_back(p / p.sum());
    }
    return out;
}

}  // namespace

TEST_CASE("insurer premium hand values") {
    const auto m1 = ModelSpec::single_state(2.0, ClaimDistribution::point_mass(1.0));
    CHECK(insurer_premium(one(), m1, Principle::ExpectedValue, 0.1) == doctest::Approx(2.2).epsilon(1e-15));
    const auto m2 = ModelSpec::single_state(1.0, ClaimDistribution::exponential(1.0));
    CHECK(insurer_premium(one(), m2, Principle::Variance, 0.1) == doctest::Approx(1.2).epsilon(1e-15));
    auto m3 = fixtures::two_state(1.0, 3.0);
    m3.claims = {ClaimDistribution::point_mass(1.0), ClaimDistribution::point_mass(1.0)};
    CHECK(insurer_premium(Eigen::Vector2d(0.5, 0.5), m3, Principle::ExpectedValue, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("reinsurance premium hand values") {
    const auto m = ModelSpec::single_state(2.0, ClaimDistribution::point_mass(1.0));
    CHECK(reinsurance_premium(one(), m, Principle::ExpectedValue, 0.2, Contract::proportional(), 0.5) ==
          doctest::Approx(1.2).epsilon(1e-15));
    for (auto p : {Principle::ExpectedValue, Principle::Variance}) {
        CHECK(reinsurance_premium(one(), m, p, 0.2, Contract::proportional(), 1.0) == 0.0);
        CHECK(reinsurance_premium(one(), m, p, 0.2, Contract::excess_of_loss(), kInf) == 0.0);
        CHECK(reinsurance_premium(one(), m, p, 0.2, Contract::proportional(), 0.0) > insurer_premium(one(), m, p, 0.1));
    }
    const auto e = ModelSpec::single_state(1.5, ClaimDistribution::exponential(2.0));
    // ceded part (Z - u)^+ of an exponential: mean e^{-2u}/2, second moment e^{-2u}/2
    const double u = 0.3, s = std::exp(-2.0 * u);
    CHECK(reinsurance_premium(one(), e, Principle::ExpectedValue, 0.25, Contract::excess_of_loss(), u) ==
          doctest::Approx(1.25 * 1.5 * s / 2.0).epsilon(1e-12));
    CHECK(reinsurance_premium(one(), e, Principle::Variance, 0.25, Contract::excess_of_loss(), u) ==
          doctest::Approx(1.5 * (s / 2.0 + 0.25 * s / 2.0)).epsilon(1e-12));
}

TEST_CASE("premia are affine in the filter") {
    auto m = fixtures::two_state(1.0, 3.0);
    m.claims = {ClaimDistribution::exponential(4.0), ClaimDistribution::gamma(2.0, 3.0)};
    const Eigen::VectorXd a = Eigen::Vector2d(0.9, 0.1), b = Eigen::Vector2d(0.2, 0.8);
    for (auto p : {Principle::ExpectedValue, Principle::Variance}) {
        CHECK(std::abs(insurer_premium(0.5 * (a + b), m, p, 0.1) -
                       0.5 * (insurer_premium(a, m, p, 0.1) + insurer_premium(b, m, p, 0.1))) < 1e-12);
        for (const auto& c : {Contract::proportional(), Contract::excess_of_loss()}) {
            const double mid = reinsurance_premium(0.5 * (a + b), m, p, 0.3, c, 0.4);
            const double avg = 0.5 * (reinsurance_premium(a, m, p, 0.3, c, 0.4) + reinsurance_premium(b, m, p, 0.3, c, 0.4));
            CHECK(std::abs(mid - avg) < 1e-12);
        }
    }
}

TEST_CASE("premium model agrees with the free functions") {
    const auto m = fixtures::two_state();
    const auto mkt = fixtures::market();
    for (auto p : {Principle::ExpectedValue, Principle::Variance}) {
        for (const auto& c : {Contract::proportional(), Contract::excess_of_loss()}) {
            const PremiumModel pm(m, mkt, {p, p}, c);
            for (const auto& pi : random_filters(2, 5, 1)) {
                CHECK(pm.insurer(pi) == doctest::Approx(insurer_premium(pi, m, p, 0.1)).epsilon(1e-13));
                CHECK(pm.reinsurer(0.0, pi, 0.37) == doctest::Approx(reinsurance_premium(pi, m, p, 0.3, c, 0.37)).epsilon(1e-12));
                const double h = 1e-6;
                const double fd = (pm.reinsurer(0.0, pi, 0.37 + h) - pm.reinsurer(0.0, pi, 0.37 - h)) / (2 * h);
                CHECK(pm.reinsurer_du(0.0, pi, 0.37) == doctest::Approx(fd).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("premium contract holds for both principles and contracts") {
    const auto m = fixtures::two_state();
    const auto mkt = fixtures::market();
    const auto pis = random_filters(2, 50, 7);
    for (auto p : {Principle::ExpectedValue, Principle::Variance}) {
        for (const auto& c : {Contract::proportional(), Contract::excess_of_loss()}) {
            const PremiumModel pm(m, mkt, {p, p}, c);
            const auto rep = validate_premium_contract(pm, pis);
            CHECK(rep.pass);
            CHECK(rep.violations.empty());
            CHECK(rep.checks > 0);
        }
    }
}

TEST_CASE("swapped loadings break the full-reinsurance check") {
    const auto m = fixtures::two_state();
    MarketParams mkt;
    mkt.theta = 0.05;
    mkt.theta_i = 0.1;
    const PremiumModel pm(m, mkt, {}, Contract::proportional());
    const auto rep = validate_premium_contract(pm, random_filters(2, 5, 2));
    CHECK_FALSE(rep.pass);
    bool saw = false;
    for (const auto& v : rep.violations) saw = saw || v.check == "full_exceeds_insurer";
    CHECK(saw);
}

TEST_CASE("principle names round-trip") {
    CHECK(principle_from_string(to_string(Principle::Variance)) == Principle::Variance);
    CHECK(principle_from_string("ev") == Principle::ExpectedValue);
}
