#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>

#include "treedyn/clocks.hpp"
#include "treedyn/stats.hpp"
#include "treedyn/tree.hpp"

namespace treedyn::coalescing {

struct QueryGuards {
    int max_depth = 24;               // layers of recursion for d = 2
    long max_node_visits = 10'000'000; // per sample
};

/// Exact backward query of the stationary coalescing-particles process with
/// all-one boundary at layers <= base_layer of the window. States are read at
/// left limits t-: a ring exactly at the query time is excluded.
class ParticleQuery {
public:
    ParticleQuery(TreeWindow window, ClockStream& clock, bool memoize = true,
                  QueryGuards guards = {});

    /// State of the boundary process at v at time t-.
    bool has_particle(const VertexRef& v, double t);

    /// Whether particles flowed towards the anchor root during [0, T).
    bool flow_event(double T);

    long node_visits() const { return visits_; }
    int max_recursion_depth() const { return max_depth_seen_; }

private:
    bool pull_succeeds(const VertexRef& v, const ClockStream::Ring& ring, int depth);
    bool has_particle_at_depth(const VertexRef& v, double t, int depth);

    TreeWindow window_;
    ClockStream& clock_;
    bool memoize_;
    QueryGuards guards_;
    std::unordered_map<std::string, bool> memo_; // key: path bytes + ring index
    long visits_ = 0;
    int max_depth_seen_ = 0;
};

struct Estimate {
    double value = 0.0;
    stats::Interval ci;
    long samples = 0;
    std::uint64_t seed = 0;
};

/// Monte Carlo estimate of rho_n(T), the probability of a particle flow
/// towards the layer-n anchor within time T, with a Wilson 95% interval.
Estimate estimate_rho(int n, double T, long samples, std::uint64_t seed,
                      int workers = 1, const QueryGuards& guards = {});

} // namespace treedyn::coalescing
