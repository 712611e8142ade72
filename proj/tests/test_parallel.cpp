#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "treedyn/coalescing.hpp"
#include "treedyn/parallel.hpp"
#include "treedyn/stats.hpp"
#include "treedyn/voter.hpp"

TEST_CASE("parallel map equals the serial reference") {
    auto fn = [](std::size_t i) { return static_cast<long>(i * i % 97); };
    const auto serial = treedyn::sample_map_serial<long>(5000, fn);
    for (int workers : {1, 2, 8}) {
        const auto parallel = treedyn::sample_map<long>(5000, workers, fn);
        CHECK(parallel == serial);
    }
}

TEST_CASE("exceptions from workers propagate to the caller") {
    auto fn = [](std::size_t i) -> int {
        if (i == 137) throw treedyn::numerical_error("boom");
        return 0;
    };
    CHECK_THROWS_AS(treedyn::sample_map<int>(1000, 4, fn),
                    treedyn::numerical_error);
    CHECK_THROWS_AS(treedyn::sample_map_serial<int>(1000, fn),
                    treedyn::numerical_error);
}

TEST_CASE("at least one worker is available") {
    CHECK(treedyn::max_workers() >= 1);
}

TEST_CASE("flow estimates are identical for every worker count") {
    const auto base = treedyn::coalescing::estimate_rho(4, 1.0, 6000, 20250824, 1);
    for (int workers : {2, 4, treedyn::max_workers()}) {
        const auto est =
            treedyn::coalescing::estimate_rho(4, 1.0, 6000, 20250824, workers);
        CHECK(est.value == base.value);
        CHECK(est.ci.lo == base.ci.lo);
        CHECK(est.ci.hi == base.ci.hi);
    }
}

TEST_CASE("autocorrelation estimates are identical for every worker count") {
    const auto base = treedyn::voter::estimate_autocorr(3, 1.0, 6000, 20250824, 1);
    for (int workers : {2, 4, treedyn::max_workers()}) {
        const auto est =
            treedyn::voter::estimate_autocorr(3, 1.0, 6000, 20250824, workers);
        CHECK(est.value == base.value);
        CHECK(est.ci.lo == base.ci.lo);
        CHECK(est.ci.hi == base.ci.hi);
    }
}

TEST_CASE("statistical helpers behave on known inputs") {
    const auto iv = treedyn::stats::wilson_interval(50, 100);
    CHECK(iv.lo < 0.5);
    CHECK(iv.hi > 0.5);
    CHECK(iv.lo > 0.3);
    CHECK(iv.hi < 0.7);
    const auto all = treedyn::stats::wilson_interval(100, 100);
    CHECK(all.hi <= 1.0);
    CHECK(all.lo > 0.9);

    // P[Bin(10, 0.5) >= 0] = 1; P[Bin(10, 0.5) >= 10] = 2^-10.
    CHECK(treedyn::stats::binomial_upper_pvalue(10, 0.5, 0) ==
          doctest::Approx(1.0));
    CHECK(treedyn::stats::binomial_upper_pvalue(10, 0.5, 10) ==
          doctest::Approx(1.0 / 1024.0).epsilon(1e-10));

    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    const std::vector<double> ys{1.0, 3.0, 5.0, 7.0};
    const auto fit = treedyn::stats::fit_line(xs, ys);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(-1.0));
}
