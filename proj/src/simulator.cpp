#include <algorithm>
#include <cmath>
#include <ostream>

#include "reinsure/errors.hpp"
#include "reinsure/io.hpp"
#include "reinsure/simulator.hpp"

namespace reinsure {

namespace {

double exponential_draw(Stream& rng, double rate) { return -std::log(rng.uniform()) / rate; }

int categorical(Stream& rng, const Eigen::VectorXd& weights) {
    const double total = weights.sum();
    double x = (1.0 - rng.uniform()) * total;  // [0, total)
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        x -= weights[i];
        if (x < 0.0) return static_cast<int>(i);
    }
    for (Eigen::Index i = weights.size() - 1; i >= 0; --i)
        if (weights[i] > 0.0) return static_cast<int>(i);
    return 0;
}

}  // namespace

int ClaimPath::state_at(double t) const {
    int s = chain.front().state;
    for (const auto& c : chain) {
        if (c.time > t) break;
        s = c.state;
    }
    return s;
}

std::vector<Observation> ClaimPath::observations() const {
    std::vector<Observation> out;
    out.reserve(events.size());
    for (const auto& e : events) out.push_back({e.time, e.size});
    return out;
}

std::vector<ChainPoint> simulate_chain(const ModelSpec& model, double horizon, std::uint64_t seed,
                                       std::uint64_t path_id) {
    Stream rng(seed, path_id, kChainTag);
    std::vector<ChainPoint> chain;
    int state = categorical(rng, model.initial_distribution);
    chain.push_back({0.0, state});
    double t = 0.0;
    while (true) {
        const double rate = -model.generator(state, state);
        if (!(rate > 0.0)) break;
        t += exponential_draw(rng, rate);
        if (t > horizon) break;
        Eigen::VectorXd w = model.generator.row(state).transpose();
        w[state] = 0.0;
        state = categorical(rng, w);
        chain.push_back({t, state});
    }
    return chain;
}

std::vector<ClaimEvent> simulate_claims(const ModelSpec& model, const std::vector<ChainPoint>& chain, double horizon,
                                        std::uint64_t seed, std::uint64_t path_id, ArrivalMethod method) {
    Stream rng(seed, path_id, kClaimTag);
    std::vector<ClaimEvent> events;
    if (method == ArrivalMethod::PerSojourn) {
        for (std::size_t k = 0; k < chain.size(); ++k) {
            const double start = chain[k].time;
            const double end = k + 1 < chain.size() ? chain[k + 1].time : horizon;
            const int s = chain[k].state;
            const double rate = model.intensities[static_cast<std::size_t>(s)];
            double t = start;
            while (true) {
                t += exponential_draw(rng, rate);
                if (t > end) break;
                events.push_back({t, model.claims[static_cast<std::size_t>(s)].sample(rng), s});
            }
        }
    } else {
        const double cap = model.max_intensity();
        std::size_t k = 0;
        double t = 0.0;
        while (true) {
            t += exponential_draw(rng, cap);
            if (t > horizon) break;
            while (k + 1 < chain.size() && chain[k + 1].time <= t) ++k;
            const int s = chain[k].state;
            if (rng.uniform() * cap <= model.intensities[static_cast<std::size_t>(s)])
                events.push_back({t, model.claims[static_cast<std::size_t>(s)].sample(rng), s});
        }
    }
    return events;
}

ClaimPath simulate_path(const ModelSpec& model, double horizon, std::uint64_t seed, std::uint64_t path_id,
                        ArrivalMethod method) {
    ClaimPath path;
    path.seed = seed;
    path.id = path_id;
    path.horizon = horizon;
    path.chain = simulate_chain(model, horizon, seed, path_id);
    path.events = simulate_claims(model, path.chain, horizon, seed, path_id, method);
    return path;
}

WealthSample wealth_path(const ClaimPath& path, const RetentionFn& strategy, const PremiumModel& premia,
                         const FilterFlow& flow, const MarketParams& mkt, const WealthOptions& options) {
    const double horizon = mkt.horizon_t;
    const double r = mkt.rate_r;
    const double cap = premia.contract().cap();
    const double h_max = horizon * options.max_step_fraction;

    std::vector<double> records = options.record_times;
    if (records.empty()) records.push_back(horizon);
    std::sort(records.begin(), records.end());

    // Segment ends: claim times and record times, in order.
    std::vector<double> cuts;
    cuts.reserve(path.events.size() + records.size() + 1);
    for (const auto& e : path.events) cuts.push_back(e.time);
    for (double t : records) cuts.push_back(t);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const auto retention = [&](double t, const Eigen::VectorXd& pi) {
        const double u = strategy(t, pi);
        if (!(u >= 0.0 && u <= cap)) throw DomainError("strategy returned a retention outside [0, I]");
        return u;
    };
    const auto net_rate = [&](double t, const Eigen::VectorXd& pi) {
        return premia.insurer(pi) - premia.reinsurer(t, pi, retention(t, pi));
    };

    WealthSample out;
    Eigen::VectorXd pi = flow.model().initial_distribution;
    double x = mkt.initial_wealth;
    double xbar = mkt.initial_wealth;
    double now = 0.0;
    std::size_t next_event = 0;
    std::size_t next_record = 0;

    const auto record = [&](double t) {
        while (next_record < records.size() && records[next_record] == t) {
            out.times.push_back(t);
            out.wealth.push_back(x);
            out.discounted.push_back(xbar);
            out.filter.push_back(pi);
            ++next_record;
        }
    };
    record(0.0);

    Eigen::VectorXd node_pi;
    for (double b : cuts) {
        if (b > horizon) break;
        const double len = b - now;
        if (len > 0.0) {
            const int n = std::max(1, static_cast<int>(std::ceil(len / (2.0 * h_max))));
            const double delta = len / (2 * n);
            const Eigen::MatrixXd step = flow.step_matrix(delta);
            double acc = 0.0, acc_bar = 0.0;
            node_pi = pi;
            for (int j = 0; j <= 2 * n; ++j) {
                if (j > 0) {
                    node_pi = step * node_pi;
                    normalize_in_place(node_pi);
                }
                const double s = now + j * delta;
                const double w = (j == 0 || j == 2 * n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
                const double f = net_rate(s, node_pi);
                acc += w * std::exp(r * (b - s)) * f;
                acc_bar += w * std::exp(-r * s) * f;
            }
            x = std::exp(r * len) * x + acc * delta / 3.0;
            xbar += acc_bar * delta / 3.0;
            pi = node_pi;
            now = b;
        }
        while (next_event < path.events.size() && path.events[next_event].time == b) {
            const auto& ev = path.events[next_event];
            const double loss = premia.contract().g(ev.size, retention(b, pi));
            x -= loss;
            xbar -= std::exp(-r * b) * loss;
            pi = flow.jump(pi, ev.size);
            ++next_event;
        }
        record(b);
    }
    return out;
}

void write_paths_csv(std::ostream& os, const std::vector<ClaimPath>& paths) {
    os << "path_id,event_index,time,state,claim_size\n";
    for (const auto& p : paths)
        for (std::size_t k = 0; k < p.events.size(); ++k)
            os << p.id << ',' << k << ',' << fmt_num(p.events[k].time) << ',' << p.events[k].state + 1 << ','
               << fmt_num(p.events[k].size) << '\n';
}

void write_wealth_csv(std::ostream& os, const std::vector<std::pair<std::uint64_t, WealthSample>>& samples) {
    os << "path_id,time,wealth\n";
    for (const auto& [id, s] : samples)
        for (std::size_t k = 0; k < s.times.size(); ++k)
            os << id << ',' << fmt_num(s.times[k]) << ',' << fmt_num(s.wealth[k]) << '\n';
}

}  // namespace reinsure
