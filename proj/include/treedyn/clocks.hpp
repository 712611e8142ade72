#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "treedyn/tree.hpp"

namespace treedyn {

/// Derive an independent child seed from a master seed and a stream index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Reproducible rate-1 Poisson clocks on (-inf, inf), one per vertex, plus
/// per-ring auxiliary randomness (a fair +-1 coin and a uniform in [0,1)).
///
/// Every draw is a pure function of (master seed, vertex path, counter), so a
/// vertex's stream is addressable without generating any other vertex, and the
/// stream is identical regardless of query order. Ring index 1 is the first
/// ring at time >= 0; backward extension assigns decreasing indices.
///
/// Not internally synchronized: confine one ClockStream to one worker.
class ClockStream {
public:
    explicit ClockStream(std::uint64_t seed) : seed_(seed) {}

    struct Ring {
        double time;
        long index;
    };

    /// All rings of v's clock in [s, t), in increasing time order.
    std::vector<Ring> rings_in(const VertexRef& v, double s, double t);

    /// The greatest ring strictly before t (extends backward until one exists).
    Ring last_ring_before(const VertexRef& v, double t);

    /// Fair +-1 coin attached to ring `index` of v's clock.
    int coin_at(const VertexRef& v, long index) const;

    /// Uniform [0,1) draw attached to ring `index` of v's clock.
    double uniform_at(const VertexRef& v, long index) const;

    std::uint64_t seed() const { return seed_; }

private:
    struct VertexClock {
        std::uint64_t key = 0;
        std::deque<double> times; // times[i] is the ring with index first_index + i
        long first_index = 0;
    };

    VertexClock& clock_for(const VertexRef& v);
    void extend_back(VertexClock& c, double below);
    void extend_front(VertexClock& c, double at_least);

    std::uint64_t seed_;
    std::unordered_map<std::string, VertexClock> clocks_;
};

} // namespace treedyn
