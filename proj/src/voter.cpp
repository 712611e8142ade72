#include "treedyn/voter.hpp"

#include <cmath>

#include "treedyn/parallel.hpp"

namespace treedyn::voter {

namespace {

std::string memo_key(const VertexRef& v, long ring_index) {
    std::string k(v.path.begin(), v.path.end());
    k.push_back('\0');
    k.append(reinterpret_cast<const char*>(&ring_index), sizeof(ring_index));
    return k;
}

} // namespace

int majority3(int a, int b, int c) {
    return (a + b + c) > 0 ? 1 : -1;
}

double majority_flip_prob(double p) {
    if (p < 0.0 || p > 1.0)
        throw contract_violation("majority_flip_prob: p outside [0,1]");
    return 1.5 * p - 1.5 * p * p + p * p * p;
}

OpinionQuery::OpinionQuery(TreeWindow window, ClockStream& clock, bool memoize,
                           QueryGuards guards, int coin_sign)
    : window_(std::move(window)), clock_(clock), memoize_(memoize), guards_(guards),
      coin_sign_(coin_sign) {
    if (window_.arity() != 3)
        throw config_error("OpinionQuery: majority voter runs on the ternary tree");
}

int OpinionQuery::opinion_at_depth(const VertexRef& v, double t, int depth) {
    if (++visits_ > guards_.max_node_visits)
        throw cost_guard_error("voter query exceeded the node-visit budget");
    const auto ring = clock_.last_ring_before(v, t);
    std::string key;
    if (memoize_) {
        key = memo_key(v, ring.index);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    int result;
    if (v.layer <= window_.base_layer()) {
        result = coin_sign_ * clock_.coin_at(v, ring.index);
    } else {
        // Children are read at the ring time, which refers to their own states
        // just before it (their rings are strictly earlier almost surely).
        auto children = window_.children(v);
        result = majority3(opinion_at_depth(children[0], ring.time, depth + 1),
                           opinion_at_depth(children[1], ring.time, depth + 1),
                           opinion_at_depth(children[2], ring.time, depth + 1));
    }
    if (memoize_) memo_.emplace(std::move(key), result);
    return result;
}

int OpinionQuery::opinion(const VertexRef& v, double t) {
    return opinion_at_depth(v, t, 0);
}

Estimate estimate_autocorr(int n, double T, long samples, std::uint64_t seed,
                           int workers, const QueryGuards& guards) {
    if (n < 0) throw config_error("estimate_autocorr: n must be non-negative");
    if (samples < 1) throw config_error("estimate_autocorr: samples must be at least 1");
    if (n > guards.max_depth)
        throw cost_guard_error("estimate_autocorr: n exceeds the depth guard");
    auto products = sample_map<std::int8_t>(
        static_cast<std::size_t>(samples), workers, [&](std::size_t i) -> std::int8_t {
            ClockStream clock(derive_seed(seed, i));
            OpinionQuery query(TreeWindow(3, n, 0), clock, true, guards);
            const VertexRef root{{}, n};
            return static_cast<std::int8_t>(query.opinion(root, 0.0) *
                                            query.opinion(root, T));
        });
    long sum = 0;
    for (std::int8_t p : products) sum += p;
    Estimate e;
    e.value = static_cast<double>(sum) / static_cast<double>(samples);
    // Normal-approximation CI for a mean of +-1 values.
    const double var = 1.0 - e.value * e.value;
    const double half = 1.959963984540054 * std::sqrt(var / static_cast<double>(samples));
    e.ci = stats::Interval{e.value - half, e.value + half};
    e.samples = samples;
    e.seed = seed;
    return e;
}

double layer_independence_stat(int n, int m, long samples, std::uint64_t seed,
                               int workers) {
    if (m < 2) throw config_error("layer_independence_stat: need at least two vertices");
    // Anchor high enough that m distinct depth-q descendants exist; their
    // descendant subtrees are disjoint, so their randomness never overlaps.
    int q = 0;
    long capacity = 1;
    while (capacity < m) {
        capacity *= 3;
        ++q;
    }
    TreeWindow window(3, n + q, 0);
    std::vector<VertexRef> anchors;
    for (int j = 0; j < m; ++j) {
        VertexRef v{{}, n};
        v.path.resize(static_cast<std::size_t>(q));
        long rem = j;
        for (int b = q - 1; b >= 0; --b) {
            v.path[static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(rem % 3);
            rem /= 3;
        }
        anchors.push_back(std::move(v));
    }
    auto rows = sample_map<std::vector<std::int8_t>>(
        static_cast<std::size_t>(samples), workers, [&](std::size_t i) {
            ClockStream clock(derive_seed(seed, i));
            OpinionQuery query(window, clock);
            std::vector<std::int8_t> opinions;
            opinions.reserve(static_cast<std::size_t>(m));
            for (const auto& a : anchors)
                opinions.push_back(static_cast<std::int8_t>(query.opinion(a, 0.0)));
            return opinions;
        });
    // Pearson correlations from integer sums; exact and order-independent.
    std::vector<long> s(static_cast<std::size_t>(m), 0);
    std::vector<std::vector<long>> sp(static_cast<std::size_t>(m),
                                      std::vector<long>(static_cast<std::size_t>(m), 0));
    for (const auto& row : rows)
        for (int a = 0; a < m; ++a) {
            s[static_cast<std::size_t>(a)] += row[static_cast<std::size_t>(a)];
            for (int b = a + 1; b < m; ++b)
                sp[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] +=
                    row[static_cast<std::size_t>(a)] * row[static_cast<std::size_t>(b)];
        }
    const double N = static_cast<double>(samples);
    double worst = 0.0;
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) {
            const double ma = s[static_cast<std::size_t>(a)] / N;
            const double mb = s[static_cast<std::size_t>(b)] / N;
            const double cov =
                sp[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] / N - ma * mb;
            const double corr =
                cov / std::sqrt((1.0 - ma * ma) * (1.0 - mb * mb));
            worst = std::max(worst, std::abs(corr));
        }
    return worst;
}

} // namespace treedyn::voter
