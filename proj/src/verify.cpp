#include "treedyn/verify.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "treedyn/analytic.hpp"
#include "treedyn/coalescing.hpp"
#include "treedyn/ising.hpp"
#include "treedyn/lattice.hpp"
#include "treedyn/parallel.hpp"
#include "treedyn/report.hpp"
#include "treedyn/stats.hpp"
#include "treedyn/voter.hpp"

namespace treedyn::verify {

namespace {

using report::format_double;

std::string fmt(double v) { return format_double(v); }

CheckResult make(int criterion, std::string id, bool pass, std::string measured,
                 std::string requirement) {
    return CheckResult{criterion, std::move(id), pass, std::move(measured),
                       std::move(requirement)};
}

// 64-configuration enumeration of M(p): three fair coins, each independently
// turned with probability p; probability the majority changes.
double majority_flip_prob_oracle(double p) {
    double total = 0.0;
    for (int coins = 0; coins < 8; ++coins) {
        int before = 0;
        for (int i = 0; i < 3; ++i) before += (coins >> i) & 1 ? 1 : -1;
        for (int flips = 0; flips < 8; ++flips) {
            int after = 0;
            int nflips = 0;
            for (int i = 0; i < 3; ++i) {
                int s = (coins >> i) & 1 ? 1 : -1;
                if ((flips >> i) & 1) {
                    s = -s;
                    ++nflips;
                }
                after += s;
            }
            const double weight = std::pow(p, nflips) * std::pow(1.0 - p, 3 - nflips);
            if ((before > 0) != (after > 0)) total += 0.125 * weight;
        }
    }
    return total;
}

void check_rho1_law(const SuiteOptions& o, std::vector<CheckResult>& out) {
    const long samples = o.full ? 100'000 : 20'000;
    for (double T : {0.5, 1.0, 2.0}) {
        const double expected = 1.0 - std::exp(-T);
        const auto est = coalescing::estimate_rho(1, T, samples, o.seed, o.workers);
        const double se = std::sqrt(expected * (1.0 - expected) /
                                    static_cast<double>(samples));
        const double err = std::abs(est.value - expected);
        out.push_back(make(1, "rho1-law-T" + fmt(T), err <= 3.0 * se,
                           fmt(est.value), "within " + fmt(3.0 * se) + " of " +
                           fmt(expected)));
    }
}

void check_closed_form(std::vector<CheckResult>& out) {
    const double at0 = analytic::closed_form_rho_inf(0.0);
    out.push_back(make(2, "closed-form-at-0", std::abs(at0) <= 1e-12, fmt(at0),
                       "|rho_inf(0)| <= 1e-12"));
    // 5-point one-sided finite difference for the initial slope.
    const double h = 1e-3;
    double fd = 0.0;
    const double c[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};
    for (int i = 0; i < 5; ++i)
        fd += c[i] * analytic::closed_form_rho_inf(static_cast<double>(i) * h);
    fd /= 12.0 * h;
    const double target = 1.0 / std::sqrt(3.0);
    out.push_back(make(2, "closed-form-slope-at-0", std::abs(fd - target) <= 1e-6,
                       fmt(fd), "sqrt(1/3) +- 1e-6"));
    const auto cf = analytic::closed_form_grid({1e-3, 10.0});
    const double res = analytic::ode_residual(analytic::ModelSpec::coalescing(), cf);
    out.push_back(make(2, "closed-form-ode-residual", res < 1e-5, fmt(res),
                       "< 1e-5 at h = 1e-3"));
}

void check_fixed_point_residual(std::vector<CheckResult>& out) {
    const auto cf = analytic::closed_form_grid({0.01, 15.0});
    const double res =
        analytic::fixed_point_residual(analytic::ModelSpec::coalescing(), cf);
    out.push_back(make(3, "chi-fixed-point-residual", res < 5e-3, fmt(res),
                       "sup|chi(rho_inf) - rho_inf| < 5e-3"));
}

double sup_on_prefix(const analytic::GridFunction& a, const analytic::GridFunction& b,
                     double t_hi) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size() && a.time(i) <= t_hi; ++i)
        d = std::max(d, std::abs(a.at(i) - b.at(i)));
    return d;
}

void check_agreement_triangle(std::vector<CheckResult>& out) {
    const analytic::GridSpec grid{0.01, 15.0};
    const auto model = analytic::ModelSpec::coalescing();
    const auto iterates = analytic::chi_iterate(model, 40, grid);
    const auto& limit = iterates.back();
    const auto ode = analytic::solve_heteroclinic(model, grid);
    const auto cf = analytic::closed_form_grid(grid);
    const double d1 = sup_on_prefix(limit, ode, 10.0);
    const double d2 = sup_on_prefix(limit, cf, 10.0);
    const double d3 = sup_on_prefix(ode, cf, 10.0);
    const double worst = std::max({d1, d2, d3});
    out.push_back(make(4, "agreement-triangle", worst < 5e-3, fmt(worst),
                       "pairwise sup-norm on [0,10] < 5e-3"));
}

void check_mc_vs_quadrature(const SuiteOptions& o, std::vector<CheckResult>& out) {
    const analytic::GridSpec grid{0.01, 15.0};
    const long samples = o.full ? 100'000 : 20'000;
    {
        const auto iterates =
            analytic::chi_iterate(analytic::ModelSpec::coalescing(), 7, grid);
        const double ref = iterates[7](1.0); // rho_8 = chi^7(rho_1)
        const auto est =
            coalescing::estimate_rho(8, 1.0, samples, derive_seed(o.seed, 5), o.workers);
        const double se =
            std::sqrt(ref * (1.0 - ref) / static_cast<double>(samples));
        out.push_back(make(5, "coalescing-rho8-vs-quadrature",
                           std::abs(est.value - ref) <= 3.0 * se, fmt(est.value),
                           "within " + fmt(3.0 * se) + " of " + fmt(ref)));
    }
    {
        const auto iterates =
            analytic::chi_iterate(analytic::ModelSpec::voter(), 6, grid);
        const double ref = 1.0 - iterates[6](1.0); // rho_bar_6 = 1 - chi^6(rho_0)
        const auto est = voter::estimate_autocorr(6, 1.0, samples,
                                                  derive_seed(o.seed, 6), o.workers);
        const double se =
            std::sqrt((1.0 - ref * ref) / static_cast<double>(samples));
        out.push_back(make(5, "voter-rhobar6-vs-quadrature",
                           std::abs(est.value - ref) <= 3.0 * se, fmt(est.value),
                           "within " + fmt(3.0 * se) + " of " + fmt(ref)));
    }
}

void check_majority_polynomial(std::vector<CheckResult>& out) {
    double worst = 0.0;
    for (int i = 0; i <= 10; ++i) {
        const double p = static_cast<double>(i) / 10.0;
        worst = std::max(worst, std::abs(voter::majority_flip_prob(p) -
                                         majority_flip_prob_oracle(p)));
    }
    out.push_back(make(6, "majority-flip-polynomial", worst <= 1e-12, fmt(worst),
                       "matches 64-term enumeration to 1e-12"));
}

void check_mixing_rate(const SuiteOptions& o, std::vector<CheckResult>& out) {
    {
        const auto sol = analytic::solve_heteroclinic(analytic::ModelSpec::voter(),
                                                      {0.01, 25.0});
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < sol.size(); ++i) {
            const double T = sol.time(i);
            if (T >= 10.0 && T <= 20.0 && sol.at(i) < 1.0) {
                xs.push_back(T);
                ys.push_back(std::log(1.0 - sol.at(i)));
            }
        }
        const double slope = stats::fit_line(xs, ys).slope;
        out.push_back(make(7, "voter-ode-decay-rate",
                           std::abs(slope + 0.5) <= 0.01, fmt(slope),
                           "-0.5 +- 0.01 on T in [10,20]"));
    }
    {
        const long samples = o.full ? 30'000 : 8'000;
        std::vector<double> xs, ys;
        for (double T : {2.0, 3.0, 4.0, 5.0, 6.0}) {
            const auto est = voter::estimate_autocorr(6, T, samples,
                                                      derive_seed(o.seed, 7), o.workers);
            xs.push_back(T);
            ys.push_back(std::log(est.value));
        }
        const double slope = stats::fit_line(xs, ys).slope;
        out.push_back(make(7, "voter-simulated-decay-rate",
                           slope >= -1.0 && slope <= -0.25, fmt(slope),
                           "in [-1.0, -0.25] on T in [2,6]"));
    }
}

void check_disagreement_bound(const SuiteOptions& o, std::vector<CheckResult>& out) {
    const auto schedule = ising::CouplingSchedule::quadratic();
    for (double beta : {1.0, 3.0}) {
        const auto res = ising::coupled_simulate(TreeWindow(3, 0, -8), beta, schedule,
                                                 50.0, derive_seed(o.seed, 8));
        bool pass = true;
        double worst_p = 1.0;
        for (const auto& [layer, ls] : res.layers) {
            if (ls.opportunities == 0) continue;
            const double bound = ising::disagreement_bound(layer, beta, schedule);
            const double pval = stats::binomial_upper_pvalue(ls.opportunities, bound,
                                                             ls.creations);
            worst_p = std::min(worst_p, pval);
            if (pval < 0.01) pass = false;
        }
        out.push_back(make(8, "disagreement-bound-beta" + fmt(beta), pass,
                           "min p-value " + fmt(worst_p),
                           "one-sided binomial p >= 0.01 per layer"));
    }
}

void check_infection(const SuiteOptions& o, std::vector<CheckResult>& out) {
    const auto schedule = ising::CouplingSchedule::quadratic();
    {
        const auto rs = ising::infection_rate_sum(2.0, schedule, 1e-9);
        // Closed form for quadratic gaps: sum (j+1) (3 e^{-4 beta})^j e^{-2 beta}.
        const double x = 3.0 * std::exp(-4.0 * 2.0);
        const double closed = std::exp(-2.0 * 2.0) / ((1.0 - x) * (1.0 - x));
        const bool pass = std::abs(rs.value - closed) <= 1e-6 && rs.bounded;
        out.push_back(make(9, "infection-rate-sum", pass, fmt(rs.value),
                           "equals " + fmt(closed) + " +- 1e-6, below 1/2"));
    }
    {
        const auto sim =
            ising::infection_simulate(12, 2.0, schedule, 200.0, derive_seed(o.seed, 9));
        const bool pass =
            sim.time_avg_infected < 0.1 && sim.closure_violations == 0;
        out.push_back(make(9, "infection-boundedness", pass,
                           "avg " + fmt(sim.time_avg_infected) + ", violations " +
                               std::to_string(sim.closure_violations),
                           "time-averaged count < 0.1, zero closure violations"));
    }
}

void check_determinism(const SuiteOptions& o, std::vector<CheckResult>& out) {
    // The same seeded computation must be bit-identical across repeats and
    // across worker counts.
    auto canary = [&](int workers) {
        std::ostringstream os;
        const auto c = coalescing::estimate_rho(4, 1.0, 4000, o.seed, workers);
        const auto v = voter::estimate_autocorr(3, 1.0, 4000, o.seed, workers);
        os << fmt(c.value) << ',' << fmt(c.ci.lo) << ',' << fmt(c.ci.hi) << ','
           << fmt(v.value) << ',' << fmt(v.ci.lo) << ',' << fmt(v.ci.hi);
        return os.str();
    };
    const std::string serial_a = canary(1);
    const std::string serial_b = canary(1);
    const std::string parallel = canary(std::max(8, o.workers));
    const bool pass = serial_a == serial_b && serial_a == parallel;
    out.push_back(make(10, "determinism", pass,
                       pass ? "identical" : "outputs differ",
                       "byte-identical across repeats and worker counts"));
}

void check_monotonicity(const SuiteOptions& o, std::vector<CheckResult>& out) {
    {
        // chi_iterate throws on a pointwise monotonicity violation.
        bool pass = true;
        std::string detail = "decreasing";
        try {
            analytic::chi_iterate(analytic::ModelSpec::coalescing(), 20, {0.01, 15.0});
            analytic::chi_iterate(analytic::ModelSpec::voter(), 20, {0.01, 15.0});
        } catch (const numerical_error& e) {
            pass = false;
            detail = e.what();
        }
        out.push_back(make(11, "chi-iterates-decreasing", pass, detail,
                           "pointwise decreasing with 1e-9 slack"));
    }
    {
        // Shared clocks: a flow with a deeper base layer implies one with a
        // shallower base layer.
        const long pairs = 10'000;
        auto violations = sample_map<std::uint8_t>(
            static_cast<std::size_t>(pairs), o.workers, [&](std::size_t i) {
                ClockStream clock(derive_seed(derive_seed(o.seed, 11), i));
                coalescing::ParticleQuery shallow(TreeWindow(2, 4, 0), clock);
                coalescing::ParticleQuery deep(TreeWindow(2, 4, -2), clock);
                const bool flow_deep = deep.flow_event(1.0);
                const bool flow_shallow = shallow.flow_event(1.0);
                return static_cast<std::uint8_t>(flow_deep && !flow_shallow);
            });
        long bad = 0;
        for (auto v : violations) bad += v;
        out.push_back(make(11, "shared-clock-coupling", bad == 0,
                           std::to_string(bad) + " violations",
                           "zero violations over 10^4 paired samples"));
    }
    {
        const long samples = o.full ? 20'000 : 5'000;
        bool pass = true;
        double prev = 1.0;
        double prev_se = 0.0;
        std::string values;
        for (int n = 1; n <= 8; ++n) {
            const auto est = coalescing::estimate_rho(n, 1.0, samples,
                                                      derive_seed(o.seed, 12), o.workers);
            const double se = std::sqrt(est.value * (1.0 - est.value) /
                                        static_cast<double>(samples));
            if (n > 1 && est.value > prev + 3.0 * std::hypot(se, prev_se)) pass = false;
            prev = est.value;
            prev_se = se;
            if (!values.empty()) values += ' ';
            values += fmt(est.value);
        }
        out.push_back(make(11, "rho-decreasing-in-n", pass, values,
                           "statistically decreasing for n = 1..8"));
    }
}

void check_lattice_demo(const SuiteOptions& o, std::vector<CheckResult>& out) {
    const auto res =
        coalescing::lattice_density_decay(32, 2, 50.0, derive_seed(o.seed, 13));
    bool monotone = true;
    for (std::size_t i = 1; i < res.density.size(); ++i)
        if (res.density[i] > res.density[i - 1]) monotone = false;
    const double final_density = res.density.back();
    out.push_back(make(12, "lattice-density-decay",
                       monotone && final_density < 0.2, fmt(final_density),
                       "non-increasing, final density < 0.2"));
}

} // namespace

std::vector<CheckResult> run_suite(const SuiteOptions& opts) {
    std::vector<CheckResult> out;
    check_rho1_law(opts, out);
    check_closed_form(out);
    check_fixed_point_residual(out);
    check_agreement_triangle(out);
    check_mc_vs_quadrature(opts, out);
    check_majority_polynomial(out);
    check_mixing_rate(opts, out);
    check_disagreement_bound(opts, out);
    check_infection(opts, out);
    check_determinism(opts, out);
    check_monotonicity(opts, out);
    check_lattice_demo(opts, out);
    return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

std::string suite_csv(const std::vector<CheckResult>& results) {
    report::Csv csv({"criterion", "check", "status", "measured", "requirement"});
    for (const auto& r : results)
        csv.add_row({std::to_string(r.criterion), r.id, r.pass ? "pass" : "fail",
                     r.measured, r.requirement});
    return csv.str();
}

std::string suite_json(const std::vector<CheckResult>& results,
                       const SuiteOptions& opts) {
    nlohmann::ordered_json j;
    j["tool"] = "treedyn";
    j["version"] = std::string(report::kToolVersion);
    j["suite"] = opts.full ? "full" : "fast";
    j["seed"] = opts.seed;
    j["workers"] = opts.workers;
    j["all_passed"] = all_passed(results);
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        nlohmann::ordered_json c;
        c["criterion"] = r.criterion;
        c["id"] = r.id;
        c["status"] = r.pass ? "pass" : "fail";
        c["measured"] = r.measured;
        c["requirement"] = r.requirement;
        checks.push_back(c);
    }
    j["checks"] = checks;
    return j.dump(2) + "\n";
}

} // namespace treedyn::verify
