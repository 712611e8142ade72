#include "treedyn/ising.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "treedyn/clocks.hpp"
#include "treedyn/voter.hpp"

namespace treedyn::ising {

CouplingSchedule::CouplingSchedule(std::string id, std::function<double(int)> rule,
                                   int check_horizon)
    : id_(std::move(id)), rule_(std::move(rule)) {
    for (int k = 0; k <= check_horizon; ++k) {
        const double lower = J(-k);
        const double upper = J(-k - 1);
        if (lower < 0.0)
            throw config_error("CouplingSchedule: couplings must be non-negative");
        if (upper < lower)
            throw config_error("CouplingSchedule: J_{-k-1} >= J_{-k} is required");
        if (upper - lower < static_cast<double>(k))
            throw config_error("CouplingSchedule: gap growth J_{-k-1} - J_{-k} >= k fails");
    }
}

CouplingSchedule CouplingSchedule::quadratic() {
    return CouplingSchedule("ksq", [](int k) {
        return static_cast<double>(k) * static_cast<double>(k);
    });
}

double CouplingSchedule::J(int k) const {
    if (k >= 1) return 0.0;
    return rule_(k);
}

double CouplingSchedule::gap(int k) const {
    return J(k - 1) - J(k);
}

double glauber_plus_prob(int layer, std::optional<int> parent_spin,
                         const std::array<int, 3>& child_spins, double beta,
                         const CouplingSchedule& schedule) {
    if (beta <= 0.0) throw contract_violation("glauber_plus_prob: beta must be positive");
    double field = 0.0;
    if (parent_spin) field += schedule.J(layer) * static_cast<double>(*parent_spin);
    const int child_sum = child_spins[0] + child_spins[1] + child_spins[2];
    field += schedule.J(layer - 1) * static_cast<double>(child_sum);
    const double h = beta * field;
    return 1.0 / (1.0 + std::exp(-2.0 * h));
}

double disagreement_bound(int layer, double beta, const CouplingSchedule& schedule) {
    if (layer > 0) throw contract_violation("disagreement_bound: layer must be <= 0");
    const double delta = schedule.gap(layer);
    const double e = std::exp(-2.0 * beta * delta);
    return e / (1.0 + e);
}

namespace {

struct WindowGraph {
    std::vector<VertexRef> vertices;
    std::vector<int> parent;                  // -1 for the anchor root
    std::vector<std::array<int, 3>> children; // -1s at the bottom layer
};

} // namespace

CoupledResult coupled_simulate(const TreeWindow& window, double beta,
                               const CouplingSchedule& schedule, double horizon,
                               std::uint64_t seed, long max_events) {
    if (window.arity() != 3)
        throw config_error("coupled_simulate: requires the ternary tree");
    if (horizon < 0) throw config_error("coupled_simulate: negative horizon");

    // Rebuild adjacency breadth-first so parents precede children.
    WindowGraph g;
    {
        g.vertices.push_back(window.root());
        g.parent.push_back(-1);
        g.children.assign(1, {-1, -1, -1});
        for (std::size_t i = 0; i < g.vertices.size(); ++i) {
            if (g.vertices[i].layer <= window.base_layer()) continue;
            std::array<int, 3> kids{};
            int c = 0;
            for (auto& child : window.children(g.vertices[i])) {
                kids[static_cast<std::size_t>(c++)] = static_cast<int>(g.vertices.size());
                g.vertices.push_back(std::move(child));
                g.parent.push_back(static_cast<int>(i));
                g.children.push_back({-1, -1, -1});
            }
            g.children[i] = kids;
        }
    }
    const std::size_t n = g.vertices.size();

    ClockStream clock(seed);

    // Both chains start from the same exact voter sample at time 0.
    std::vector<int> spin_b(n), spin_f(n);
    {
        voter::OpinionQuery init(window, clock, true,
                                 voter::QueryGuards{window.depth(), 100'000'000});
        for (std::size_t i = 0; i < n; ++i)
            spin_b[i] = spin_f[i] = init.opinion(g.vertices[i], 0.0);
    }

    // Merged event queue: rings of every vertex above the bottom layer.
    struct Event {
        double time;
        int vertex;
        long ring_index;
    };
    std::vector<Event> events;
    for (std::size_t i = 0; i < n; ++i) {
        if (g.vertices[i].layer <= window.base_layer()) continue; // frozen boundary
        for (const auto& ring : clock.rings_in(g.vertices[i], 0.0, horizon)) {
            events.push_back(Event{ring.time, static_cast<int>(i), ring.index});
            if (static_cast<long>(events.size()) > max_events)
                throw cost_guard_error("coupled_simulate: event budget exceeded");
        }
    }
    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.time < b.time; });

    CoupledResult out;
    long disagreements = 0;
    double next_sample = 0.0;
    auto record_until = [&](double t) {
        while (next_sample <= horizon && next_sample <= t) {
            out.times.push_back(next_sample);
            out.disagreements.push_back(disagreements);
            next_sample += 1.0;
        }
    };
    for (const Event& ev : events) {
        record_until(ev.time - 1e-12);
        const std::size_t v = static_cast<std::size_t>(ev.vertex);
        const int layer = g.vertices[v].layer;
        const auto& kids = g.children[v];
        const std::array<int, 3> cb = {spin_b[static_cast<std::size_t>(kids[0])],
                                       spin_b[static_cast<std::size_t>(kids[1])],
                                       spin_b[static_cast<std::size_t>(kids[2])]};
        const std::array<int, 3> cf = {spin_f[static_cast<std::size_t>(kids[0])],
                                       spin_f[static_cast<std::size_t>(kids[1])],
                                       spin_f[static_cast<std::size_t>(kids[2])]};
        const bool opportunity = cb == cf;
        const int new_b = voter::majority3(cb[0], cb[1], cb[2]);
        std::optional<int> parent_spin;
        if (g.parent[v] >= 0) parent_spin = spin_f[static_cast<std::size_t>(g.parent[v])];
        const double p_plus = glauber_plus_prob(layer, parent_spin, cf, beta, schedule);
        // Monotone inverse-transform coupling: both chains consume one uniform.
        const double u = clock.uniform_at(g.vertices[v], ev.ring_index);
        const int new_f = u < p_plus ? 1 : -1;

        const bool was_disagreeing = spin_b[v] != spin_f[v];
        const bool now_disagreeing = new_b != new_f;
        spin_b[v] = new_b;
        spin_f[v] = new_f;
        disagreements += (now_disagreeing ? 1 : 0) - (was_disagreeing ? 1 : 0);

        auto& ls = out.layers[layer];
        if (opportunity) {
            ++ls.opportunities;
            if (now_disagreeing) ++ls.creations;
        }
        ++out.events;
    }
    record_until(horizon);
    return out;
}

InfectionResult infection_simulate(int depth, double beta,
                                   const CouplingSchedule& schedule, double horizon,
                                   std::uint64_t seed) {
    if (depth < 0) throw config_error("infection_simulate: depth must be non-negative");
    if (horizon < 0) throw config_error("infection_simulate: negative horizon");

    // Per-layer aggregate origination rates; layer k = -j holds 3^j vertices.
    std::vector<double> layer_rate(static_cast<std::size_t>(depth) + 1);
    double total_rate = 0.0;
    double count = 1.0;
    for (int j = 0; j <= depth; ++j) {
        const double per_vertex = std::exp(-2.0 * beta * schedule.gap(-j));
        layer_rate[static_cast<std::size_t>(j)] = count * per_vertex;
        total_rate += layer_rate[static_cast<std::size_t>(j)];
        count *= 3.0;
    }
    if (!std::isfinite(total_rate) || total_rate > 1e12)
        throw numerical_error("infection_simulate: origination rate overflow");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto exp_draw = [&](double rate) { return -std::log1p(-unit(rng)) / rate; };

    std::set<std::string> infected; // paths from x_0; ordered for determinism
    auto is_infected = [&](const std::string& p) { return infected.count(p) > 0; };
    auto curable = [&]() {
        std::vector<std::string> out;
        for (const auto& p : infected) {
            bool child_infected = false;
            for (char c = 0; c < 3 && !child_infected; ++c)
                child_infected = is_infected(p + c);
            if (!child_infected) out.push_back(p);
        }
        return out;
    };

    InfectionResult out;
    double t = 0.0;
    double next_sample = 0.0;
    double occupancy_integral = 0.0;
    auto record_until = [&](double upto) {
        while (next_sample <= horizon && next_sample <= upto) {
            out.times.push_back(next_sample);
            out.infected.push_back(static_cast<long>(infected.size()));
            next_sample += 1.0;
        }
    };
    auto check_closure = [&]() {
        for (const auto& p : infected)
            if (!p.empty() && !is_infected(p.substr(0, p.size() - 1)))
                ++out.closure_violations;
    };

    while (true) {
        const auto cure_candidates = curable();
        const double cure_rate = 0.5 * static_cast<double>(cure_candidates.size());
        const double rate = total_rate + cure_rate;
        const double dt = exp_draw(rate);
        const double t_next = t + dt;
        record_until(std::min(t_next, horizon));
        occupancy_integral +=
            static_cast<double>(infected.size()) * (std::min(t_next, horizon) - t);
        if (t_next > horizon) break;
        t = t_next;
        if (unit(rng) * rate < total_rate) {
            // Origination: pick a layer, then a uniform vertex in it; infect
            // the whole path up to x_0.
            double pick = unit(rng) * total_rate;
            int j = 0;
            while (j < depth && pick >= layer_rate[static_cast<std::size_t>(j)]) {
                pick -= layer_rate[static_cast<std::size_t>(j)];
                ++j;
            }
            std::string path;
            for (int b = 0; b < j; ++b)
                path.push_back(static_cast<char>(std::min(2l, static_cast<long>(
                    unit(rng) * 3.0))));
            for (std::size_t len = 0; len <= path.size(); ++len)
                infected.insert(path.substr(0, len));
            ++out.originations;
        } else if (!cure_candidates.empty()) {
            const std::size_t pick = std::min(
                cure_candidates.size() - 1,
                static_cast<std::size_t>(unit(rng) *
                                         static_cast<double>(cure_candidates.size())));
            infected.erase(cure_candidates[pick]);
        }
        check_closure();
    }
    out.time_avg_infected = horizon > 0 ? occupancy_integral / horizon : 0.0;
    return out;
}

RateSum infection_rate_sum(double beta, const CouplingSchedule& schedule,
                           double tolerance) {
    if (beta <= 0.0) throw config_error("infection_rate_sum: beta must be positive");
    if (tolerance <= 0.0) throw config_error("infection_rate_sum: tolerance must be positive");
    RateSum out;
    double prev_term = 0.0;
    int diverging_streak = 0;
    const int max_terms = 100'000;
    for (int j = 0;; ++j) {
        if (j >= max_terms)
            throw numerical_error("infection_rate_sum: no convergence within term cap");
        const double term = (static_cast<double>(j) + 1.0) *
                            std::pow(3.0, static_cast<double>(j)) *
                            std::exp(-2.0 * beta * schedule.gap(-j));
        if (!std::isfinite(term))
            throw divergence_error("infection_rate_sum: series diverges");
        out.value += term;
        out.terms = j + 1;
        if (j > 0) {
            const double ratio = term / prev_term;
            if (ratio >= 1.0) {
                if (++diverging_streak >= 50 && term > tolerance)
                    throw divergence_error("infection_rate_sum: series diverges");
            } else {
                diverging_streak = 0;
                // Ratios are eventually decreasing under the growth condition,
                // so a geometric tail bound applies.
                if (term * ratio / (1.0 - ratio) < tolerance) break;
            }
        }
        prev_term = term;
    }
    out.bounded = out.value < 0.5;
    return out;
}

} // namespace treedyn::ising
