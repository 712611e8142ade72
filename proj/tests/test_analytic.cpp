#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "treedyn/analytic.hpp"

using namespace treedyn::analytic;

TEST_CASE("model polynomials and derived quantities") {
    const auto coal = ModelSpec::coalescing();
    CHECK(coal.f(0.0) == 0.0);
    CHECK(coal.f(1.0) == 1.0);
    CHECK(coal.f(0.5) == doctest::Approx(0.75));
    CHECK(coal.f_prime(1.0) == doctest::Approx(0.0));
    CHECK(coal.potential(1.0) == doctest::Approx(1.0 / 6.0));
    CHECK(coal.tail_rate() == doctest::Approx(1.0));

    const auto vot = ModelSpec::voter();
    CHECK(vot.f(0.0) == 0.0);
    CHECK(vot.f(1.0) == doctest::Approx(1.0));
    CHECK(vot.f_prime(1.0) == doctest::Approx(0.75));
    CHECK(vot.potential(1.0) == doctest::Approx(1.0 / 16.0));
    CHECK(vot.tail_rate() == doctest::Approx(0.5));
    // The voter flow polynomial is 2 M(rho / 2) where M is the majority flip
    // probability of three fair coins.
    for (double rho : {0.1, 0.4, 0.9}) {
        const double p = rho / 2.0;
        const double M = 1.5 * p - 1.5 * p * p + p * p * p;
        CHECK(vot.f(rho) == doctest::Approx(2.0 * M).epsilon(1e-14));
    }

    const auto g3 = ModelSpec::general(3);
    CHECK(g3.f(0.5) == doctest::Approx(1.0 - 0.125));
    CHECK_THROWS_AS(ModelSpec::general(1), treedyn::config_error);
}

TEST_CASE("grid functions interpolate and carry an analytic tail") {
    const GridSpec grid{0.5, 2.0};
    GridFunction g(grid, {0.0, 0.2, 0.4, 0.6, 0.8}, 1.0);
    CHECK(g(0.5) == doctest::Approx(0.2));
    CHECK(g(0.75) == doctest::Approx(0.3));
    CHECK(g(-1.0) == 0.0);
    // Beyond t_max: 1 - (1 - 0.8) e^{-(u - 2)}.
    CHECK(g(3.0) == doctest::Approx(1.0 - 0.2 * std::exp(-1.0)));
    CHECK_THROWS_AS(GridFunction(grid, {0.0, 1.0}, 1.0), treedyn::config_error);
    CHECK_THROWS_AS(GridFunction(grid, {0.0, 0.2, 0.4, 0.6, 0.8}, 0.0),
                    treedyn::config_error);
}

TEST_CASE("csv output is bit-stable") {
    const auto cf = closed_form_grid({0.1, 2.0});
    std::ostringstream a, b;
    cf.write_csv(a, "coalescing");
    cf.write_csv(b, "coalescing");
    CHECK(a.str() == b.str());
    CHECK(a.str().substr(0, 1) == "#");
}

TEST_CASE("the transform vanishes at zero and stays below the envelope") {
    const GridSpec grid{0.01, 15.0};
    const auto model = ModelSpec::coalescing();
    const auto image = chi_apply(model, upper_envelope(model, grid));
    CHECK(image.at(0) == 0.0);
    for (std::size_t i = 0; i < image.size(); i += 25)
        CHECK(image.at(i) <= 1.0 - std::exp(-image.time(i)) + 1e-9);
}

TEST_CASE("the transform rejects inputs outside its domain") {
    const GridSpec grid{0.1, 1.0};
    std::vector<double> above(grid.points(), 0.9); // above 1 - e^{-T} near 0
    CHECK_THROWS_AS(chi_apply(ModelSpec::coalescing(),
                              GridFunction(grid, above, 1.0)),
                    treedyn::numerical_error);
    std::vector<double> wiggle{0.0, 0.05, 0.03, 0.1, 0.12, 0.14, 0.16,
                               0.18, 0.2, 0.22, 0.24};
    CHECK_THROWS_AS(chi_apply(ModelSpec::coalescing(),
                              GridFunction(grid, wiggle, 1.0)),
                    treedyn::numerical_error);
}

TEST_CASE("one transform of the envelope matches the exact second level") {
    // For the coalescing model, chi(1 - e^{-T}) has the closed form
    // (1 - e^{-T}) - (e^{-T} - e^{-2T}) / 3.
    const GridSpec grid{0.01, 15.0};
    const auto image =
        chi_apply(ModelSpec::coalescing(), upper_envelope(ModelSpec::coalescing(), grid));
    auto exact = [](double T) {
        return (1.0 - std::exp(-T)) - (std::exp(-T) - std::exp(-2.0 * T)) / 3.0;
    };
    CHECK(image(1.0) == doctest::Approx(0.5546058395169478).epsilon(1e-8));
    double worst = 0.0;
    for (std::size_t i = 0; i < image.size(); ++i)
        worst = std::max(worst, std::abs(image.at(i) - exact(image.time(i))));
    CHECK(worst < 1e-7);
}

TEST_CASE("iterates decrease pointwise from the envelope") {
    const GridSpec grid{0.01, 15.0};
    const auto iterates = chi_iterate(ModelSpec::voter(), 10, grid);
    REQUIRE(iterates.size() == 11);
    for (std::size_t k = 1; k < iterates.size(); ++k)
        for (std::size_t i = 0; i < iterates[k].size(); i += 50)
            CHECK(iterates[k].at(i) <= iterates[k - 1].at(i) + 1e-9);
}

TEST_CASE("closed form evaluates to the frozen oracle values") {
    CHECK(closed_form_rho_inf(0.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(closed_form_rho_inf(1.0) ==
          doctest::Approx(0.5099376033946031).epsilon(1e-14));
    CHECK(closed_form_rho_inf(10.0) > 0.999);
    CHECK_THROWS_AS(closed_form_rho_inf(-0.5), treedyn::contract_violation);
}

TEST_CASE("the closed form satisfies the second-order flow equation") {
    const auto cf = closed_form_grid({1e-3, 10.0});
    CHECK(ode_residual(ModelSpec::coalescing(), cf) < 1e-5);
}

TEST_CASE("the heteroclinic solver leaves zero at the conserved-energy slope") {
    const GridSpec grid{1e-3, 10.0};
    const auto coal = solve_heteroclinic(ModelSpec::coalescing(), grid);
    CHECK(coal.at(0) == 0.0);
    CHECK((coal.at(1) - coal.at(0)) / grid.h ==
          doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-3));
    const auto vot = solve_heteroclinic(ModelSpec::voter(), grid);
    CHECK((vot.at(1) - vot.at(0)) / grid.h ==
          doctest::Approx(std::sqrt(1.0 / 8.0)).epsilon(1e-3));
    // Strictly increasing towards 1.
    for (std::size_t i = 1; i < coal.size(); i += 500) {
        CHECK(coal.at(i) >= coal.at(i - 1));
        CHECK(coal.at(i) <= 1.0);
    }
    CHECK(coal.values().back() > 0.999);
}

TEST_CASE("heteroclinic and closed form coincide for the coalescing model") {
    const GridSpec grid{1e-3, 10.0};
    const auto ode = solve_heteroclinic(ModelSpec::coalescing(), grid);
    const auto cf = closed_form_grid(grid);
    CHECK(ode.sup_distance(cf) < 1e-6);
}

TEST_CASE("the closed form is nearly a fixed point of the transform") {
    const auto cf = closed_form_grid({0.01, 15.0});
    CHECK(fixed_point_residual(ModelSpec::coalescing(), cf) < 5e-3);
}
