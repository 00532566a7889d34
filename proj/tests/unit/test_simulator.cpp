#include <doctest.h>

#include <sstream>

#include "common.hpp"
#include "reinsure/simulator.hpp"

using namespace reinsure;

TEST_CASE("single-state chain never moves") {
    const auto m = ModelSpec::single_state(2.0, ClaimDistribution::exponential(3.0));
    for (std::uint64_t k = 0; k < 20; ++k) {
        const auto chain = simulate_chain(m, 5.0, 1, k);
        CHECK(chain.size() == 1);
        CHECK(chain.front().state == 0);
    }
}

TEST_CASE("first holding time of a symmetric chain has mean one") {
    const auto m = fixtures::two_state();
    const int n = 10000;
    double sum = 0.0, sum2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const auto chain = simulate_chain(m, 50.0, 5, static_cast<std::uint64_t>(k));
        REQUIRE(chain.size() > 1);
        sum += chain[1].time;
        sum2 += chain[1].time * chain[1].time;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::abs(mean - 1.0) < 3.0 * se);
}

TEST_CASE("paths are a pure function of seed and index") {
    const auto m = fixtures::two_state();
    const auto a = simulate_path(m, 1.0, 42, 17);
    const auto b = simulate_path(m, 1.0, 42, 17);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        CHECK(a.events[i].time == b.events[i].time);
        CHECK(a.events[i].size == b.events[i].size);
    }
    REQUIRE(a.chain.size() == b.chain.size());
    int differing = 0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const auto x = simulate_path(m, 1.0, 42, k), y = simulate_path(m, 1.0, 43, k);
        differing += x.events.size() != y.events.size() || (!x.events.empty() && x.events[0].time != y.events[0].time);
    }
    CHECK(differing > 10);
}

TEST_CASE("claim counts are Poisson and event times are ordered") {
    const auto m = ModelSpec::single_state(2.0, ClaimDistribution::exponential(3.0));
    const int n = 10000;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const auto p = simulate_path(m, 1.0, 9, static_cast<std::uint64_t>(k));
        sum += static_cast<double>(p.events.size());
        double last = 0.0;
        for (const auto& e : p.events) {
            CHECK(e.time > last);
            CHECK(e.time <= 1.0);
            last = e.time;
        }
    }
    CHECK(std::abs(sum / n - 2.0) < 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("claim sizes follow the sojourn state's law") {
    auto m = fixtures::two_state(1.0, 3.0);
    m.claims = {ClaimDistribution::discrete({{1.0, 0.5}, {2.0, 0.5}}), ClaimDistribution::discrete({{5.0, 0.2}, {7.0, 0.8}})};
    int count7 = 0, count_high = 0;
    for (std::uint64_t k = 0; k < 2000; ++k) {
        const auto p = simulate_path(m, 2.0, 3, k);
        for (const auto& e : p.events) {
            CHECK(e.state == p.state_at(e.time));
            if (e.state == 0) CHECK((e.size == 1.0 || e.size == 2.0));
            if (e.state == 1) {
                CHECK((e.size == 5.0 || e.size == 7.0));
                ++count_high;
                count7 += e.size == 7.0;
            }
        }
    }
    const double f = static_cast<double>(count7) / count_high;
    CHECK(std::abs(f - 0.8) < 3.0 * std::sqrt(0.16 / count_high));
}

TEST_CASE("thinning and per-sojourn arrivals agree in law") {
    const auto m = fixtures::two_state(0.5, 4.0);
    const int n = 20000;
    double a = 0.0, b = 0.0, a2 = 0.0, b2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = static_cast<double>(simulate_path(m, 1.0, 1, k, ArrivalMethod::PerSojourn).events.size());
        const double y = static_cast<double>(simulate_path(m, 1.0, 2, k, ArrivalMethod::Thinning).events.size());
        a += x, a2 += x * x, b += y, b2 += y * y;
    }
    const double va = a2 / n - (a / n) * (a / n), vb = b2 / n - (b / n) * (b / n);
    CHECK(std::abs(a / n - b / n) < 3.0 * std::sqrt((va + vb) / n));
}

TEST_CASE("wealth without claims grows by the net premium") {
    const auto m = ModelSpec::single_state(2.0, ClaimDistribution::point_mass(1.0));
    auto mkt = fixtures::market();
    mkt.initial_wealth = 3.0;
    const PremiumModel premia(m, mkt, {}, Contract::proportional());
    const FilterFlow flow(m);
    ClaimPath path;
    path.horizon = 1.0;
    path.chain = {{0.0, 0}};
    const auto w = wealth_path(path, [](double, const Eigen::VectorXd&) { return 1.0; }, premia, flow, mkt);
    CHECK(w.wealth.back() == doctest::Approx(3.0 + 1.1 * 2.0).epsilon(1e-13));
}

TEST_CASE("one claim with interest matches the explicit solution") {
    const auto m = ModelSpec::single_state(2.0, ClaimDistribution::exponential(2.0));
    auto mkt = fixtures::market(0.3, 0.1, 0.05);
    mkt.initial_wealth = 1.5;
    const double u = 0.4;
    const PremiumModel premia(m, mkt, {}, Contract::proportional());
    const FilterFlow flow(m);
    ClaimPath path;
    path.horizon = 1.0;
    path.chain = {{0.0, 0}};
    path.events = {{0.35, 2.0, 0}};
    const auto w = wealth_path(path, [u](double, const Eigen::VectorXd&) { return u; }, premia, flow, mkt);
    const double c = 1.1 * 2.0 * 0.5, q = 1.3 * (1.0 - u) * 2.0 * 0.5, r = 0.05;
    const double expected = std::exp(r) * 1.5 + (c - q) * std::expm1(r) / r - std::exp(r * 0.65) * u * 2.0;
    CHECK(w.wealth.back() == doctest::Approx(expected).epsilon(1e-10));
    CHECK(w.discounted.back() == doctest::Approx(std::exp(-r) * w.wealth.back()).epsilon(1e-10));
}

TEST_CASE("full reinsurance removes claim jumps") {
    const auto m = ModelSpec::single_state(2.0, ClaimDistribution::exponential(2.0));
    const auto mkt = fixtures::market(0.3, 0.1, 0.02);
    const PremiumModel premia(m, mkt, {}, Contract::proportional());
    const FilterFlow flow(m);
    const auto zero = [](double, const Eigen::VectorXd&) { return 0.0; };
    ClaimPath none;
    none.horizon = 1.0;
    none.chain = {{0.0, 0}};
    const double ref = wealth_path(none, zero, premia, flow, mkt).wealth.back();
    for (std::uint64_t k = 0; k < 20; ++k) {
        const auto p = simulate_path(m, 1.0, 4, k);
        CHECK(wealth_path(p, zero, premia, flow, mkt).wealth.back() == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("discounted wealth matches its own accumulation on two-state paths") {
    const auto m = fixtures::two_state();
    const auto mkt = fixtures::market(0.3, 0.1, 0.04);
    const PremiumModel premia(m, mkt, {}, Contract::proportional());
    const FilterFlow flow(m);
    WealthOptions opt;
    opt.record_times = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (std::uint64_t k = 0; k < 50; ++k) {
        const auto p = simulate_path(m, 1.0, 8, k);
        const auto w = wealth_path(p, [](double t, const Eigen::VectorXd& pi) { return 0.3 + 0.4 * t * pi[1]; }, premia,
                                   flow, mkt, opt);
        for (std::size_t i = 0; i < w.times.size(); ++i)
            CHECK(std::abs(w.discounted[i] - std::exp(-0.04 * w.times[i]) * w.wealth[i]) < 1e-10);
    }
}

TEST_CASE("aggregate claims have the compound Poisson exponential moment") {
    const auto m = ModelSpec::single_state(1.5, ClaimDistribution::point_mass(1.0));
    const int n = 20000;
    const double a = 0.5;
    double s = 0.0, s2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = std::exp(a * static_cast<double>(simulate_path(m, 1.0, 6, k).events.size()));
        s += x, s2 += x * x;
    }
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::abs(mean - std::exp(1.5 * std::expm1(a))) < 3.0 * se);
}

TEST_CASE("paths csv layout") {
    const auto m = fixtures::two_state();
    std::ostringstream os;
    write_paths_csv(os, {simulate_path(m, 1.0, 1, 0)});
    CHECK(os.str().rfind("path_id,event_index,time,state,claim_size\n", 0) == 0);
}
