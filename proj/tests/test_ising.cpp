#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "treedyn/ising.hpp"

using treedyn::TreeWindow;
using treedyn::ising::CouplingSchedule;
using treedyn::ising::coupled_simulate;
using treedyn::ising::disagreement_bound;
using treedyn::ising::glauber_plus_prob;
using treedyn::ising::infection_rate_sum;
using treedyn::ising::infection_simulate;

TEST_CASE("the quadratic schedule is J_k = k^2 below the root, zero above") {
    const auto sched = CouplingSchedule::quadratic();
    CHECK(sched.J(0) == 0.0);
    CHECK(sched.J(-1) == 1.0);
    CHECK(sched.J(-2) == 4.0);
    CHECK(sched.J(-5) == 25.0);
    CHECK(sched.J(1) == 0.0);
    CHECK(sched.J(7) == 0.0);
    CHECK(sched.gap(0) == 1.0);
    CHECK(sched.gap(-1) == 3.0);
    CHECK(sched.gap(-2) == 5.0);
}

TEST_CASE("schedule validation rejects non-growing couplings") {
    CHECK_THROWS_AS(CouplingSchedule("flat", [](int) { return 1.0; }),
                    treedyn::config_error);
    CHECK_THROWS_AS(
        CouplingSchedule("linear", [](int k) { return static_cast<double>(-k); }),
        treedyn::config_error);
    CHECK_THROWS_AS(CouplingSchedule("negative",
                                     [](int k) { return static_cast<double>(k); }),
                    treedyn::config_error);
    CHECK_NOTHROW(CouplingSchedule("cubic", [](int k) {
        const double a = static_cast<double>(-k);
        return a * a * a;
    }));
}

TEST_CASE("heat-bath probabilities are logistic in the local field") {
    const auto sched = CouplingSchedule::quadratic();
    const double beta = 1.5;
    // Layer 0, all children +, parent +: field = beta * (0 + 1 * 3) = 3 beta.
    const double p = glauber_plus_prob(0, 1, {1, 1, 1}, beta, sched);
    CHECK(p == doctest::Approx(1.0 / (1.0 + std::exp(-2.0 * 3.0 * beta))));
    // Zero field at layer 1 (couplings vanish above the root).
    CHECK(glauber_plus_prob(2, 1, {1, 1, -1}, beta, sched) ==
          doctest::Approx(0.5));
}

TEST_CASE("negating every neighbour spin mirrors the update") {
    const auto sched = CouplingSchedule::quadratic();
    for (int layer : {0, -1, -3})
        for (double beta : {0.5, 2.0})
            for (int parent : {1, -1})
                for (int c0 : {1, -1})
                    for (int c1 : {1, -1}) {
                        const double up = glauber_plus_prob(
                            layer, parent, {c0, c1, 1}, beta, sched);
                        const double down = glauber_plus_prob(
                            layer, -parent, {-c0, -c1, -1}, beta, sched);
                        CHECK(up + down == doctest::Approx(1.0).epsilon(1e-12));
                    }
}

TEST_CASE("disagreement bound is the logistic tail of the coupling gap") {
    const auto sched = CouplingSchedule::quadratic();
    // Layer 0: gap 1, bound e^{-2 beta} / (1 + e^{-2 beta}).
    CHECK(disagreement_bound(0, 1.0, sched) ==
          doctest::Approx(std::exp(-2.0) / (1.0 + std::exp(-2.0))).epsilon(1e-12));
    // Layer -1: gap 3.
    CHECK(disagreement_bound(-1, 1.0, sched) ==
          doctest::Approx(std::exp(-6.0) / (1.0 + std::exp(-6.0))).epsilon(1e-12));
    // Deeper layers have smaller bounds.
    CHECK(disagreement_bound(-2, 2.0, sched) < disagreement_bound(-1, 2.0, sched));
}

TEST_CASE("rate sum matches the closed form for quadratic gaps") {
    const auto sched = CouplingSchedule::quadratic();
    // sum_{j>=0} (j+1) 3^j e^{-2 beta (2j+1)} = e^{-2 beta} / (1 - 3 e^{-4 beta})^2
    const auto rs = infection_rate_sum(2.0, sched, 1e-12);
    CHECK(rs.value == doctest::Approx(0.01835255988877153).epsilon(1e-10));
    CHECK(rs.bounded);
    CHECK(rs.terms >= 2);
    const auto rs3 = infection_rate_sum(3.0, sched, 1e-12);
    const double x3 = 3.0 * std::exp(-12.0);
    CHECK(rs3.value ==
          doctest::Approx(std::exp(-6.0) / ((1.0 - x3) * (1.0 - x3))).epsilon(1e-10));
}

TEST_CASE("rate sum detects divergence at small beta") {
    const auto sched = CouplingSchedule::quadratic();
    // Terms grow like (3 e^{-4 beta})^j, divergent for beta <= ln(3)/4.
    CHECK_THROWS_AS(infection_rate_sum(0.2, sched, 1e-9),
                    treedyn::divergence_error);
}

TEST_CASE("coupled chains start agreeing and stay within the bound regime") {
    const auto sched = CouplingSchedule::quadratic();
    const auto res =
        coupled_simulate(TreeWindow(3, 0, -4), 2.0, sched, 10.0, 20250824);
    REQUIRE(!res.times.empty());
    CHECK(res.times.front() == 0.0);
    CHECK(res.disagreements.front() == 0);
    CHECK(res.events > 0);
    long total_opportunities = 0;
    for (const auto& [layer, ls] : res.layers) {
        CHECK(layer <= 0);
        CHECK(ls.creations <= ls.opportunities);
        total_opportunities += ls.opportunities;
    }
    CHECK(total_opportunities > 0);
}

TEST_CASE("coupled run is reproducible for a fixed seed") {
    const auto sched = CouplingSchedule::quadratic();
    const auto a = coupled_simulate(TreeWindow(3, 0, -3), 1.0, sched, 5.0, 7);
    const auto b = coupled_simulate(TreeWindow(3, 0, -3), 1.0, sched, 5.0, 7);
    CHECK(a.events == b.events);
    CHECK(a.disagreements == b.disagreements);
}

TEST_CASE("infection stays rare and downward-closed at strong coupling") {
    const auto sched = CouplingSchedule::quadratic();
    const auto res = infection_simulate(10, 2.0, sched, 100.0, 20250824);
    CHECK(res.closure_violations == 0);
    CHECK(res.time_avg_infected < 0.2);
    REQUIRE(res.times.size() == res.infected.size());
    for (long count : res.infected) CHECK(count >= 0);
}
