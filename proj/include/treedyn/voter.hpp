#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>

#include "treedyn/clocks.hpp"
#include "treedyn/stats.hpp"
#include "treedyn/tree.hpp"

namespace treedyn::voter {

struct QueryGuards {
    int max_depth = 14;                // layers of recursion for d = 3
    long max_node_visits = 10'000'000; // per sample
};

/// Majority of three +-1 opinions (never tied).
int majority3(int a, int b, int c);

/// M(p): probability that independently flipping each of three fair coins
/// with probability p changes their majority. Equals (3/2)p - (3/2)p^2 + p^3.
double majority_flip_prob(double p);

/// Exact backward query of the stationary majority voter process with
/// fair-coin resampling at layers at or below the window base layer.
class OpinionQuery {
public:
    /// coin_sign = -1 negates every base coin (sign-symmetry test hook).
    OpinionQuery(TreeWindow window, ClockStream& clock, bool memoize = true,
                 QueryGuards guards = {}, int coin_sign = 1);

    /// Opinion (+1 or -1) of v at time t.
    int opinion(const VertexRef& v, double t);

    long node_visits() const { return visits_; }

private:
    int opinion_at_depth(const VertexRef& v, double t, int depth);

    TreeWindow window_;
    ClockStream& clock_;
    bool memoize_;
    QueryGuards guards_;
    int coin_sign_;
    std::unordered_map<std::string, int> memo_; // key: path bytes + ring index
    long visits_ = 0;
};

struct Estimate {
    double value = 0.0;
    stats::Interval ci;
    long samples = 0;
    std::uint64_t seed = 0;
};

/// Monte Carlo estimate of the stationary autocorrelation
/// rho_bar_n(T) = E[opinion(x_n, 0) * opinion(x_n, T)].
Estimate estimate_autocorr(int n, double T, long samples, std::uint64_t seed,
                           int workers = 1, const QueryGuards& guards = {});

/// Maximum absolute pairwise empirical correlation of time-0 opinions of m
/// layer-n vertices with disjoint descendant subtrees. Expected ~0.
double layer_independence_stat(int n, int m, long samples, std::uint64_t seed,
                               int workers = 1);

} // namespace treedyn::voter
