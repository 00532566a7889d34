#include <doctest.h>

#include <random>

#include "common.hpp"
#include "reinsure/errors.hpp"

using namespace reinsure;
using fixtures::simpson;

TEST_CASE("mgf of exponential law agrees with direct integration") {
    const auto d = ClaimDistribution::exponential(3.0);
    CHECK(mgf(d, 1.0) == doctest::Approx(1.5).epsilon(1e-14));
    const double direct = simpson([](double z) { return std::exp(z) * 3.0 * std::exp(-3.0 * z); }, 0.0, 40.0);
    CHECK(mgf(d, 1.0) == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("mgf at zero is one for every law") {
    const std::vector<ClaimDistribution> laws{ClaimDistribution::exponential(2.0), ClaimDistribution::gamma(2.5, 4.0),
                                              ClaimDistribution::truncated_normal(1.0, 0.5),
                                              ClaimDistribution::discrete({{1.0, 0.3}, {4.0, 0.7}})};
    for (const auto& d : laws) {
        CHECK(mgf(d, 0.0) == 1.0);
        double prev = mgf(d, 0.0);
        for (double k = 0.1; k < 1.5; k += 0.1) {
            const double cur = mgf(d, k);
            CHECK(cur > prev);
            prev = cur;
        }
    }
}

TEST_CASE("mgf of a point mass") {
    CHECK(mgf(ClaimDistribution::point_mass(2.0), 0.5) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
}

TEST_CASE("gamma mgf uses the standard closed form") {
    const auto d = ClaimDistribution::gamma(2.5, 4.0);
    const double direct = simpson(
        [](double z) { return std::exp(1.5 * z) * std::pow(4.0, 2.5) * std::pow(z, 1.5) * std::exp(-4.0 * z) / std::tgamma(2.5); },
        0.0, 60.0, 200000);
    CHECK(mgf(d, 1.5) == doctest::Approx(std::pow(4.0 / 2.5, 2.5)).epsilon(1e-13));
    CHECK(mgf(d, 1.5) == doctest::Approx(direct).epsilon(1e-8));
    CHECK_THROWS_AS(mgf(d, 4.0), DomainError);
}

TEST_CASE("truncated normal mgf agrees with direct integration") {
    const auto d = ClaimDistribution::truncated_normal(1.0, 0.7);
    const double mass = 0.5 * std::erfc(-1.0 / (0.7 * std::sqrt(2.0)));
    const auto dens = [mass](double z) { return std::exp(-0.5 * std::pow((z - 1.0) / 0.7, 2)) / (0.7 * std::sqrt(2 * M_PI)) / mass; };
    CHECK(mgf(d, 0.8) == doctest::Approx(simpson([&](double z) { return std::exp(0.8 * z) * dens(z); }, 0.0, 12.0)).epsilon(1e-9));
    CHECK(d.mean() == doctest::Approx(simpson([&](double z) { return z * dens(z); }, 0.0, 12.0)).epsilon(1e-9));
}

TEST_CASE("admissibility needs an exponential moment of order 2 eta e^{RT}") {
    MarketParams mkt;
    auto ok = ModelSpec::single_state(1.0, ClaimDistribution::exponential(5.0));
    const auto rep = check_admissibility(ok, mkt);
    CHECK(rep.pass);
    CHECK(rep.binding_constant == doctest::Approx(2.0));
    auto bad = ModelSpec::single_state(1.0, ClaimDistribution::exponential(1.5));
    CHECK_FALSE(check_admissibility(bad, mkt).pass);
    MarketParams harsh;
    harsh.eta = 50.0;
    harsh.rate_r = 0.2;
    CHECK(check_admissibility(ModelSpec::single_state(1.0, ClaimDistribution::discrete({{3.0, 0.5}, {9.0, 0.5}})), harsh).pass);
}

TEST_CASE("retained loss of the standard contracts") {
    CHECK(retained(Contract::proportional(), 10.0, 0.3) == doctest::Approx(3.0));
    CHECK(retained(Contract::excess_of_loss(), 10.0, 4.0) == 4.0);
    CHECK(retained(Contract::proportional(), 10.0, 0.0) == 0.0);
    CHECK(retained(Contract::excess_of_loss(), 10.0, 0.0) == 0.0);
    CHECK(retained(Contract::proportional(), 7.5, 1.0) == 7.5);
    CHECK_THROWS_AS(retained(Contract::proportional(), 1.0, 1.5), DomainError);
    CHECK_THROWS_AS(retained(Contract::excess_of_loss(), 1.0, -0.1), DomainError);
}

TEST_CASE("retained loss is monotone and bounded by the claim") {
    for (const auto& c : {Contract::proportional(), Contract::excess_of_loss()}) {
        for (double z = 0.0; z <= 5.0; z += 0.25) {
            double prev = -1.0;
            for (double u = 0.0; u <= 1.0; u += 0.05) {
                const double g = retained(c, z, u);
                CHECK(g <= z);
                CHECK(g >= prev);
                CHECK(retained(c, z + 0.1, u) >= g);
                prev = g;
            }
        }
    }
}

TEST_CASE("exponential moment of the retained loss") {
    CHECK(exp_moment(ClaimDistribution::point_mass(1.0), 2.0, Contract::proportional(), 0.5) ==
          doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    CHECK(exp_moment(ClaimDistribution::exponential(3.0), 1.0, Contract::proportional(), 1.0) ==
          doctest::Approx(1.5).epsilon(1e-10));
    CHECK(exp_moment(ClaimDistribution::gamma(2.0, 3.0), 0.0, Contract::excess_of_loss(), 0.7) == 1.0);
}

TEST_CASE("exponential moment never exceeds the mgf and matches mgf(a u) for proportional") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> ua(0.0, 1.9), uu(0.0, 1.0);
    const std::vector<ClaimDistribution> laws{ClaimDistribution::exponential(4.0), ClaimDistribution::gamma(3.0, 6.0)};
    for (int k = 0; k < 40; ++k) {
        const double a = ua(gen), u = uu(gen);
        for (const auto& d : laws) {
            CHECK(exp_moment(d, a, Contract::excess_of_loss(), 3.0 * u) <= mgf(d, a) * (1.0 + 1e-12));
            CHECK(exp_moment(d, a, Contract::proportional(), u) == doctest::Approx(mgf(d, a * u)).epsilon(1e-8));
        }
    }
}

TEST_CASE("closed-form contract moments agree with quadrature") {
    const auto d = ClaimDistribution::gamma(2.0, 5.0);
    for (const auto& c : {Contract::proportional(), Contract::excess_of_loss()}) {
        for (double u : {0.0, 0.2, 0.6, 1.0}) {
            const auto a = contract_moments(d, 1.3, c, u);
            const auto b = exp_moment_companions(d, 1.3, c, u);
            CHECK(a.exp_retained == doctest::Approx(b.exp_retained).epsilon(1e-9));
            CHECK(a.exp_marginal == doctest::Approx(b.exp_marginal).epsilon(1e-9));
            CHECK(a.mean_ceded == doctest::Approx(b.mean_ceded).epsilon(1e-9));
            CHECK(a.second_ceded == doctest::Approx(b.second_ceded).epsilon(1e-9));
            CHECK(a.ceded_marginal == doctest::Approx(b.ceded_marginal).epsilon(1e-9));
        }
    }
}

TEST_CASE("model validation") {
    auto m = fixtures::two_state();
    CHECK_NOTHROW(m.validate());
    m.generator(0, 1) = 2.0;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    auto mixed = fixtures::two_state();
    mixed.claims[1] = ClaimDistribution::point_mass(1.0);
    CHECK_THROWS_AS(mixed.validate(), ConfigError);
    MarketParams mkt;
    mkt.theta = 0.05;
    CHECK_THROWS_AS(mkt.validate(), ConfigError);
}
