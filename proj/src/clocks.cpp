#include "treedyn/clocks.hpp"

#include <algorithm>
#include <cmath>

namespace treedyn {

namespace {

// splitmix64 finalizer; full 64-bit avalanche.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t path_key(std::uint64_t seed, const std::vector<std::uint8_t>& path) {
    std::uint64_t k = mix64(seed ^ 0x1A2B3C4D5E6F7081ull);
    for (std::uint8_t c : path)
        k = mix64(k + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(c) + 1));
    return k;
}

// Draw domains keep gaps, coins and uniforms in disjoint counter spaces.
enum : std::uint64_t { kGapForward = 1, kGapBackward = 2, kCoin = 3, kUniform = 4 };

std::uint64_t draw(std::uint64_t key, std::uint64_t domain, long counter) {
    return mix64(key ^ mix64(domain * 0xD6E8FEB86659FD93ull +
                             static_cast<std::uint64_t>(counter)));
}

double to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Exp(1) gap, strictly positive.
double exp_gap(std::uint64_t key, std::uint64_t domain, long counter) {
    double u = (static_cast<double>(draw(key, domain, counter) >> 11) + 0.5) * 0x1.0p-53;
    return -std::log(u);
}

std::string path_bytes(const std::vector<std::uint8_t>& path) {
    return std::string(path.begin(), path.end());
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix64(master ^ mix64(stream + 0x5851F42D4C957F2Dull));
}

ClockStream::VertexClock& ClockStream::clock_for(const VertexRef& v) {
    auto [it, inserted] = clocks_.try_emplace(path_bytes(v.path));
    VertexClock& c = it->second;
    if (inserted) {
        c.key = path_key(seed_, v.path);
        // Stationarity around time 0: the forward and backward recurrence
        // times are independent Exp(1).
        c.times.push_back(-exp_gap(c.key, kGapBackward, 0)); // ring index 0
        c.times.push_back(exp_gap(c.key, kGapForward, 1));   // ring index 1
        c.first_index = 0;
    }
    return c;
}

void ClockStream::extend_back(VertexClock& c, double below) {
    while (c.times.front() >= below) {
        long idx = c.first_index - 1;
        // backward counters: ring index -j uses counter j+1
        double gap = exp_gap(c.key, kGapBackward, -idx + 1);
        c.times.push_front(c.times.front() - gap);
        c.first_index = idx;
    }
}

void ClockStream::extend_front(VertexClock& c, double at_least) {
    while (c.times.back() < at_least) {
        long idx = c.first_index + static_cast<long>(c.times.size());
        c.times.push_back(c.times.back() + exp_gap(c.key, kGapForward, idx));
    }
}

std::vector<ClockStream::Ring> ClockStream::rings_in(const VertexRef& v, double s, double t) {
    if (s > t) throw contract_violation("rings_in: s > t");
    std::vector<Ring> out;
    if (s == t) return out;
    VertexClock& c = clock_for(v);
    extend_back(c, s);
    extend_front(c, t);
    auto lo = std::lower_bound(c.times.begin(), c.times.end(), s);
    for (auto it = lo; it != c.times.end() && *it < t; ++it)
        out.push_back(Ring{*it, c.first_index + static_cast<long>(it - c.times.begin())});
    return out;
}

ClockStream::Ring ClockStream::last_ring_before(const VertexRef& v, double t) {
    VertexClock& c = clock_for(v);
    extend_back(c, t);
    extend_front(c, t);
    auto it = std::lower_bound(c.times.begin(), c.times.end(), t);
    --it; // front() < t is guaranteed by extend_back
    return Ring{*it, c.first_index + static_cast<long>(it - c.times.begin())};
}

int ClockStream::coin_at(const VertexRef& v, long index) const {
    std::uint64_t key = path_key(seed_, v.path);
    return (draw(key, kCoin, index) >> 63) ? 1 : -1;
}

double ClockStream::uniform_at(const VertexRef& v, long index) const {
    std::uint64_t key = path_key(seed_, v.path);
    return to_unit(draw(key, kUniform, index));
}

} // namespace treedyn
