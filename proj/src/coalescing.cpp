#include "treedyn/coalescing.hpp"

#include "treedyn/parallel.hpp"

namespace treedyn::coalescing {

namespace {

std::string memo_key(const VertexRef& v, long ring_index) {
    std::string k(v.path.begin(), v.path.end());
    k.push_back('\0');
    k.append(reinterpret_cast<const char*>(&ring_index), sizeof(ring_index));
    return k;
}

} // namespace

ParticleQuery::ParticleQuery(TreeWindow window, ClockStream& clock, bool memoize,
                             QueryGuards guards)
    : window_(std::move(window)), clock_(clock), memoize_(memoize), guards_(guards) {
    if (window_.arity() != 2)
        throw config_error("ParticleQuery: coalescing model runs on the binary tree");
}

// Did v receive a particle at its own ring? True iff some child was occupied
// just before the ring. Memoized on (vertex, ring index of the pull attempt).
bool ParticleQuery::pull_succeeds(const VertexRef& v, const ClockStream::Ring& ring,
                                  int depth) {
    std::string key;
    if (memoize_) {
        key = memo_key(v, ring.index);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    bool result = false;
    for (const VertexRef& child : window_.children(v)) {
        if (has_particle_at_depth(child, ring.time, depth + 1)) {
            result = true;
            break;
        }
    }
    if (memoize_) memo_.emplace(std::move(key), result);
    return result;
}

bool ParticleQuery::has_particle_at_depth(const VertexRef& v, double t, int depth) {
    if (++visits_ > guards_.max_node_visits)
        throw cost_guard_error("coalescing query exceeded the node-visit budget");
    if (depth > max_depth_seen_) max_depth_seen_ = depth;
    if (v.layer <= window_.base_layer()) return true;
    auto p = window_.parent(v);
    if (!p)
        throw contract_violation("has_particle: anchor root state is not defined here");
    // The last parent ring before t drained v; v is occupied at t- iff one of
    // its own rings since then pulled a particle up from a child.
    const double drained = clock_.last_ring_before(*p, t).time;
    for (const auto& ring : clock_.rings_in(v, drained, t)) {
        if (ring.time <= drained) continue;
        if (pull_succeeds(v, ring, depth)) return true;
    }
    return false;
}

bool ParticleQuery::has_particle(const VertexRef& v, double t) {
    return has_particle_at_depth(v, t, 0);
}

bool ParticleQuery::flow_event(double T) {
    if (T < 0) throw contract_violation("flow_event: negative horizon");
    if (T == 0) return false;
    const VertexRef root = window_.root();
    for (const auto& ring : clock_.rings_in(root, 0.0, T))
        if (pull_succeeds(root, ring, 0)) return true;
    return false;
}

Estimate estimate_rho(int n, double T, long samples, std::uint64_t seed, int workers,
                      const QueryGuards& guards) {
    if (n < 1) throw config_error("estimate_rho: n must be at least 1");
    if (samples < 1) throw config_error("estimate_rho: samples must be at least 1");
    if (n > guards.max_depth)
        throw cost_guard_error("estimate_rho: n exceeds the depth guard");
    auto outcomes = sample_map<std::uint8_t>(
        static_cast<std::size_t>(samples), workers, [&](std::size_t i) -> std::uint8_t {
            ClockStream clock(derive_seed(seed, i));
            ParticleQuery query(TreeWindow(2, n, 0), clock, true, guards);
            return query.flow_event(T) ? 1 : 0;
        });
    long hits = 0;
    for (std::uint8_t o : outcomes) hits += o;
    Estimate e;
    e.value = static_cast<double>(hits) / static_cast<double>(samples);
    e.ci = stats::wilson_interval(hits, samples);
    e.samples = samples;
    e.seed = seed;
    return e;
}

} // namespace treedyn::coalescing
