#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "treedyn/clocks.hpp"
#include "treedyn/stats.hpp"
#include "treedyn/tree.hpp"

using treedyn::ClockStream;
using treedyn::VertexRef;

namespace {

VertexRef vertex(std::vector<std::uint8_t> path, int layer) {
    return VertexRef{std::move(path), layer};
}

// Clock identity is the path from the window anchor, so statistical tests
// need pairwise distinct paths: base-3 digits of k, fixed width.
VertexRef distinct_vertex(int k, int width) {
    std::vector<std::uint8_t> path(static_cast<std::size_t>(width));
    for (int b = width - 1; b >= 0; --b) {
        path[static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(k % 3);
        k /= 3;
    }
    return VertexRef{std::move(path), 0};
}

} // namespace

TEST_CASE("derived seeds separate streams") {
    CHECK(treedyn::derive_seed(1, 0) != treedyn::derive_seed(1, 1));
    CHECK(treedyn::derive_seed(1, 0) != treedyn::derive_seed(2, 0));
    CHECK(treedyn::derive_seed(7, 3) == treedyn::derive_seed(7, 3));
}

TEST_CASE("ring streams are reproducible and independent of query order") {
    const VertexRef v = vertex({0, 1}, -2);
    ClockStream a(42), b(42);
    // Query b in a different order first; the answers must still agree.
    auto rb_late = b.rings_in(v, 5.0, 9.0);
    auto rb_early = b.rings_in(v, 0.0, 5.0);
    auto ra = a.rings_in(v, 0.0, 9.0);
    std::vector<ClockStream::Ring> rb(rb_early);
    rb.insert(rb.end(), rb_late.begin(), rb_late.end());
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) {
        CHECK(ra[i].time == rb[i].time);
        CHECK(ra[i].index == rb[i].index);
    }
}

TEST_CASE("ring index 1 is the first ring at or after time zero") {
    ClockStream s(7);
    const VertexRef v = vertex({}, 0);
    auto forward = s.rings_in(v, 0.0, 50.0);
    REQUIRE(!forward.empty());
    CHECK(forward.front().index == 1);
    CHECK(forward.front().time >= 0.0);
    for (std::size_t i = 1; i < forward.size(); ++i) {
        CHECK(forward[i].index == forward[i - 1].index + 1);
        CHECK(forward[i].time > forward[i - 1].time);
    }
    auto last_neg = s.last_ring_before(v, 0.0);
    CHECK(last_neg.index <= 0);
    CHECK(last_neg.time < 0.0);
    CHECK(last_neg.time < forward.front().time);
}

TEST_CASE("last_ring_before agrees with the ring stream") {
    ClockStream s(11);
    const VertexRef v = vertex({2}, -1);
    auto rings = s.rings_in(v, 0.0, 20.0);
    REQUIRE(rings.size() >= 3);
    const auto& second = rings[1];
    auto before = s.last_ring_before(v, rings[2].time);
    CHECK(before.time == second.time);
    CHECK(before.index == second.index);
    // A query exactly at a ring time excludes that ring.
    auto strict = s.last_ring_before(v, second.time);
    CHECK(strict.index == rings[0].index);
}

TEST_CASE("distinct vertices get distinct clocks") {
    ClockStream s(3);
    auto r1 = s.rings_in(vertex({0}, -1), 0.0, 30.0);
    auto r2 = s.rings_in(vertex({1}, -1), 0.0, 30.0);
    REQUIRE(!r1.empty());
    REQUIRE(!r2.empty());
    bool all_equal = r1.size() == r2.size();
    if (all_equal)
        for (std::size_t i = 0; i < r1.size(); ++i)
            if (r1[i].time != r2[i].time) all_equal = false;
    CHECK(!all_equal);
}

TEST_CASE("clock identity is the path from the window anchor") {
    // The layer field is navigational only; one window per stream means the
    // path determines the clock.
    ClockStream s(17);
    auto r1 = s.rings_in(vertex({1, 2}, -2), 0.0, 10.0);
    auto r2 = s.rings_in(vertex({1, 2}, 3), 0.0, 10.0);
    REQUIRE(r1.size() == r2.size());
    for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i].time == r2[i].time);
}

TEST_CASE("unit-interval ring counts pass a Poisson goodness-of-fit test") {
    ClockStream s(20250824);
    std::vector<long> counts;
    const int vertices = 200;
    const int intervals = 25;
    for (int k = 0; k < vertices; ++k) {
        const VertexRef v = distinct_vertex(k, 5);
        for (int j = 0; j < intervals; ++j) {
            auto rings = s.rings_in(v, static_cast<double>(j),
                                    static_cast<double>(j + 1));
            counts.push_back(static_cast<long>(rings.size()));
        }
    }
    const double stat = treedyn::stats::chi_square_poisson(counts, 1.0, 6);
    // 7 bins {0..5, >=6}, 6 degrees of freedom, 1% critical value 16.81.
    CHECK(stat < 16.81);
}

TEST_CASE("negative-time extension also looks like a rate-1 Poisson stream") {
    ClockStream s(99);
    std::vector<long> counts;
    for (int k = 0; k < 300; ++k) {
        const VertexRef v = distinct_vertex(k, 6);
        for (int j = 1; j <= 10; ++j)
            counts.push_back(static_cast<long>(
                s.rings_in(v, -static_cast<double>(j), -static_cast<double>(j - 1))
                    .size()));
    }
    const double stat = treedyn::stats::chi_square_poisson(counts, 1.0, 6);
    CHECK(stat < 16.81);
}

TEST_CASE("ring coins are fair and reproducible") {
    ClockStream s(5);
    const VertexRef v = vertex({1, 0, 2}, -3);
    long plus = 0;
    const long n = 20000;
    for (long i = 1; i <= n; ++i) {
        const int c = s.coin_at(v, i);
        CHECK((c == 1 || c == -1));
        if (c == 1) ++plus;
        CHECK(s.coin_at(v, i) == c);
    }
    // Two-sided fairness at ~4 sigma: |plus - n/2| < 2 sqrt(n).
    CHECK(std::abs(static_cast<double>(plus) - 0.5 * n) < 2.0 * std::sqrt(n));
}

TEST_CASE("ring uniforms pass a KS test against U[0,1)") {
    ClockStream s(6);
    std::vector<double> xs;
    for (int k = 0; k < 50; ++k) {
        const VertexRef v = distinct_vertex(k, 4);
        for (long i = 1; i <= 100; ++i) {
            const double u = s.uniform_at(v, i);
            CHECK(u >= 0.0);
            CHECK(u < 1.0);
            xs.push_back(u);
        }
    }
    const double d = treedyn::stats::ks_statistic(xs);
    // 1% KS critical value ~ 1.628 / sqrt(n).
    CHECK(d < 1.628 / std::sqrt(static_cast<double>(xs.size())));
}

TEST_CASE("coins and uniforms are decoupled from ring times") {
    ClockStream a(123), b(123);
    const VertexRef v = vertex({0}, -1);
    // Reading coins first must not change the ring times.
    (void)a.coin_at(v, 1);
    (void)a.uniform_at(v, 1);
    auto ra = a.rings_in(v, 0.0, 10.0);
    auto rb = b.rings_in(v, 0.0, 10.0);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) CHECK(ra[i].time == rb[i].time);
}
