#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "treedyn/analytic.hpp"
#include "treedyn/coalescing.hpp"
#include "treedyn/ising.hpp"
#include "treedyn/lattice.hpp"
#include "treedyn/parallel.hpp"
#include "treedyn/report.hpp"
#include "treedyn/verify.hpp"
#include "treedyn/voter.hpp"

namespace {

using treedyn::report::format_double;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCostGuard = 3;
constexpr int kExitNumerical = 4;

struct Output {
    std::string data_path; // empty: stdout
    std::string meta_path; // empty: skip metadata file
};

void emit(const Output& out, const std::string& csv,
          const std::map<std::string, std::string>& config, std::uint64_t seed,
          int workers) {
    if (out.data_path.empty())
        std::cout << csv;
    else
        treedyn::report::write_file(out.data_path, csv);
    if (!out.meta_path.empty())
        treedyn::report::write_file(
            out.meta_path, treedyn::report::metadata_json(config, seed, workers));
}

long env_long(const char* name, long fallback) {
    const char* v = std::getenv(name);
    if (!v) return fallback;
    return std::strtol(v, nullptr, 10);
}

treedyn::coalescing::QueryGuards coalescing_guards() {
    treedyn::coalescing::QueryGuards g;
    g.max_depth = static_cast<int>(env_long("TREEDYN_MAX_DEPTH_COALESCING", g.max_depth));
    g.max_node_visits = env_long("TREEDYN_MAX_NODE_VISITS", g.max_node_visits);
    return g;
}

treedyn::voter::QueryGuards voter_guards() {
    treedyn::voter::QueryGuards g;
    g.max_depth = static_cast<int>(env_long("TREEDYN_MAX_DEPTH_VOTER", g.max_depth));
    g.max_node_visits = env_long("TREEDYN_MAX_NODE_VISITS", g.max_node_visits);
    return g;
}

treedyn::analytic::ModelSpec parse_model(const std::string& name, int branching) {
    if (name == "coalescing") return treedyn::analytic::ModelSpec::coalescing();
    if (name == "voter") return treedyn::analytic::ModelSpec::voter();
    if (name == "general") return treedyn::analytic::ModelSpec::general(branching);
    throw treedyn::config_error("unknown model: " + name);
}

treedyn::ising::CouplingSchedule parse_schedule(const std::string& id) {
    if (id == "ksq") return treedyn::ising::CouplingSchedule::quadratic();
    throw treedyn::config_error("unknown coupling schedule: " + id);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and numerics for interacting particle systems on "
                 "directed regular trees"};
    app.set_config("--config");
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    int workers = 1;
    Output output;
    std::vector<double> horizons{1.0};
    long samples = 100000;
    int n = 1;
    double beta = 2.0;
    std::string schedule_id = "ksq";
    int depth = 8;
    double horizon = 50.0;
    double tol = 1e-6;
    double grid_h = 0.01;
    double grid_tmax = 15.0;
    int iterations = 40;
    std::string model_name = "coalescing";
    int branching = 2;
    int side = 32;
    int dim = 2;
    std::string residual_source = "closed-form";
    std::string suite;
    std::string out_dir = ".";

    auto add_common = [&](CLI::App* cmd, bool stochastic) {
        cmd->add_option("--out", output.data_path, "CSV output path (default stdout)");
        cmd->add_option("--meta", output.meta_path, "JSON metadata output path");
        if (stochastic) {
            cmd->add_option("--seed", seed, "master seed")->required();
            cmd->add_option("--workers", workers, "parallel workers");
        }
    };

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo samplers");
    auto* sim_coal = simulate->add_subcommand("coalescing", "flow probability rho_n(T)");
    sim_coal->add_option("--n", n, "layer depth")->required();
    sim_coal->add_option("--T", horizons, "time horizons")->required();
    sim_coal->add_option("--samples", samples, "Monte Carlo samples");
    add_common(sim_coal, true);

    auto* sim_voter = simulate->add_subcommand("voter", "autocorrelation rho_bar_n(T)");
    sim_voter->add_option("--n", n, "layer depth")->required();
    sim_voter->add_option("--T", horizons, "time horizons")->required();
    sim_voter->add_option("--samples", samples, "Monte Carlo samples");
    add_common(sim_voter, true);

    auto* sim_lattice = simulate->add_subcommand("lattice-demo",
                                                 "coalescing density decay on a torus");
    sim_lattice->add_option("--side", side, "torus side length");
    sim_lattice->add_option("--dim", dim, "torus dimension");
    sim_lattice->add_option("--horizon", horizon, "time horizon");
    add_common(sim_lattice, true);

    auto* ising_cmd = app.add_subcommand("ising", "Glauber dynamics experiments");
    auto* ising_coupled =
        ising_cmd->add_subcommand("coupled", "coupled voter/Glauber disagreements");
    ising_coupled->add_option("--beta", beta, "inverse temperature");
    ising_coupled->add_option("--schedule", schedule_id, "coupling schedule id");
    ising_coupled->add_option("--depth", depth, "window depth below x_0");
    ising_coupled->add_option("--horizon", horizon, "time horizon");
    add_common(ising_coupled, true);

    auto* ising_infection =
        ising_cmd->add_subcommand("infection", "dominating infection process");
    ising_infection->add_option("--beta", beta, "inverse temperature");
    ising_infection->add_option("--schedule", schedule_id, "coupling schedule id");
    ising_infection->add_option("--depth", depth, "truncation depth");
    ising_infection->add_option("--horizon", horizon, "time horizon");
    add_common(ising_infection, true);

    auto* ising_rate = ising_cmd->add_subcommand("rate-sum", "infection rate series");
    ising_rate->add_option("--beta", beta, "inverse temperature");
    ising_rate->add_option("--schedule", schedule_id, "coupling schedule id");
    ising_rate->add_option("--tol", tol, "tail tolerance");
    add_common(ising_rate, false);

    auto* analytic_cmd = app.add_subcommand("analytic", "deterministic numerics");
    auto* an_iterate = analytic_cmd->add_subcommand("iterate", "chi iteration");
    // The grid-step option is spelled --h, so these subcommands keep only the
    // long help flag.
    an_iterate->set_help_flag("--help", "print help");
    an_iterate->add_option("--model", model_name, "coalescing|voter|general");
    an_iterate->add_option("--d", branching, "branching for the general model");
    an_iterate->add_option("--iters", iterations, "iterations");
    an_iterate->add_option("--h", grid_h, "grid step");
    an_iterate->add_option("--tmax", grid_tmax, "grid horizon");
    add_common(an_iterate, false);

    auto* an_ode = analytic_cmd->add_subcommand("ode", "heteroclinic ODE solution");
    an_ode->set_help_flag("--help", "print help");
    an_ode->add_option("--model", model_name, "coalescing|voter|general");
    an_ode->add_option("--d", branching, "branching for the general model");
    an_ode->add_option("--h", grid_h, "grid step");
    an_ode->add_option("--tmax", grid_tmax, "grid horizon");
    add_common(an_ode, false);

    auto* an_cf = analytic_cmd->add_subcommand("closed-form", "closed-form rho_inf");
    an_cf->add_option("--T", horizons, "evaluation points")->required();
    add_common(an_cf, false);

    auto* an_res = analytic_cmd->add_subcommand("residual", "fixed-point and ODE residuals");
    an_res->set_help_flag("--help", "print help");
    an_res->add_option("--model", model_name, "coalescing|voter|general");
    an_res->add_option("--d", branching, "branching for the general model");
    an_res->add_option("--source", residual_source, "closed-form|iterate|ode");
    an_res->add_option("--iters", iterations, "iterations for source=iterate");
    an_res->add_option("--h", grid_h, "grid step");
    an_res->add_option("--tmax", grid_tmax, "grid horizon");
    add_common(an_res, false);

    auto* verify_cmd = app.add_subcommand("verify", "run the cross-check suite");
    verify_cmd->add_option("suite", suite, "fast|full")->required();
    verify_cmd->add_option("--seed", seed, "master seed");
    verify_cmd->add_option("--workers", workers, "parallel workers");
    verify_cmd->add_option("--out-dir", out_dir, "report directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    const auto started = std::chrono::steady_clock::now();
    auto log_wall_clock = [&]() {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                .count();
        std::cerr << "wall_clock_seconds=" << secs << "\n";
    };

    try {
        if (sim_coal->parsed()) {
            treedyn::report::Csv csv(
                {"n", "T", "samples", "estimate", "ci_low", "ci_high", "seed"});
            for (double T : horizons) {
                const auto est = treedyn::coalescing::estimate_rho(
                    n, T, samples, seed, workers, coalescing_guards());
                csv.add_row({std::to_string(n), format_double(T),
                             std::to_string(samples), format_double(est.value),
                             format_double(est.ci.lo), format_double(est.ci.hi),
                             std::to_string(seed)});
            }
            emit(output, csv.str(),
                 {{"command", "simulate coalescing"},
                  {"n", std::to_string(n)},
                  {"samples", std::to_string(samples)}},
                 seed, workers);
        } else if (sim_voter->parsed()) {
            treedyn::report::Csv csv(
                {"n", "T", "samples", "rho_bar", "ci_low", "ci_high", "seed"});
            for (double T : horizons) {
                const auto est = treedyn::voter::estimate_autocorr(
                    n, T, samples, seed, workers, voter_guards());
                csv.add_row({std::to_string(n), format_double(T),
                             std::to_string(samples), format_double(est.value),
                             format_double(est.ci.lo), format_double(est.ci.hi),
                             std::to_string(seed)});
            }
            emit(output, csv.str(),
                 {{"command", "simulate voter"},
                  {"n", std::to_string(n)},
                  {"samples", std::to_string(samples)}},
                 seed, workers);
        } else if (sim_lattice->parsed()) {
            const auto res =
                treedyn::coalescing::lattice_density_decay(side, dim, horizon, seed);
            treedyn::report::Csv csv({"t", "density"});
            for (std::size_t i = 0; i < res.times.size(); ++i)
                csv.add_row({format_double(res.times[i]), format_double(res.density[i])});
            emit(output, csv.str(),
                 {{"command", "simulate lattice-demo"},
                  {"side", std::to_string(side)},
                  {"dim", std::to_string(dim)}},
                 seed, workers);
        } else if (ising_coupled->parsed()) {
            const auto schedule = parse_schedule(schedule_id);
            const auto res = treedyn::ising::coupled_simulate(
                treedyn::TreeWindow(3, 0, -depth), beta, schedule, horizon, seed);
            treedyn::report::Csv csv(
                {"layer", "opportunities", "creations", "bound"});
            for (const auto& [layer, ls] : res.layers)
                csv.add_row({std::to_string(layer), std::to_string(ls.opportunities),
                             std::to_string(ls.creations),
                             format_double(treedyn::ising::disagreement_bound(
                                 layer, beta, schedule))});
            emit(output, csv.str(),
                 {{"command", "ising coupled"},
                  {"beta", format_double(beta)},
                  {"schedule", schedule_id},
                  {"depth", std::to_string(depth)},
                  {"horizon", format_double(horizon)}},
                 seed, workers);
        } else if (ising_infection->parsed()) {
            const auto schedule = parse_schedule(schedule_id);
            const auto res = treedyn::ising::infection_simulate(depth, beta, schedule,
                                                                horizon, seed);
            treedyn::report::Csv csv({"t", "infected"});
            for (std::size_t i = 0; i < res.times.size(); ++i)
                csv.add_row({format_double(res.times[i]),
                             std::to_string(res.infected[i])});
            emit(output, csv.str(),
                 {{"command", "ising infection"},
                  {"beta", format_double(beta)},
                  {"schedule", schedule_id},
                  {"depth", std::to_string(depth)},
                  {"time_avg_infected", format_double(res.time_avg_infected)},
                  {"closure_violations", std::to_string(res.closure_violations)}},
                 seed, workers);
        } else if (ising_rate->parsed()) {
            const auto schedule = parse_schedule(schedule_id);
            const auto rs = treedyn::ising::infection_rate_sum(beta, schedule, tol);
            treedyn::report::Csv csv({"beta", "schedule", "sum", "terms", "bounded"});
            csv.add_row({format_double(beta), schedule_id, format_double(rs.value),
                         std::to_string(rs.terms), rs.bounded ? "true" : "false"});
            emit(output, csv.str(),
                 {{"command", "ising rate-sum"},
                  {"beta", format_double(beta)},
                  {"schedule", schedule_id},
                  {"tol", format_double(tol)}},
                 seed, workers);
        } else if (an_iterate->parsed()) {
            const auto model = parse_model(model_name, branching);
            const auto iterates =
                treedyn::analytic::chi_iterate(model, iterations, {grid_h, grid_tmax});
            std::ostringstream os;
            iterates.back().write_csv(os, model.name());
            emit(output, os.str(),
                 {{"command", "analytic iterate"},
                  {"model", model.name()},
                  {"iters", std::to_string(iterations)}},
                 seed, workers);
        } else if (an_ode->parsed()) {
            const auto model = parse_model(model_name, branching);
            const auto sol =
                treedyn::analytic::solve_heteroclinic(model, {grid_h, grid_tmax});
            std::ostringstream os;
            sol.write_csv(os, model.name());
            emit(output, os.str(),
                 {{"command", "analytic ode"}, {"model", model.name()}}, seed, workers);
        } else if (an_cf->parsed()) {
            treedyn::report::Csv csv({"T", "rho_inf"});
            for (double T : horizons)
                csv.add_row({format_double(T),
                             format_double(treedyn::analytic::closed_form_rho_inf(T))});
            emit(output, csv.str(), {{"command", "analytic closed-form"}}, seed,
                 workers);
        } else if (an_res->parsed()) {
            const auto model = parse_model(model_name, branching);
            const treedyn::analytic::GridSpec grid{grid_h, grid_tmax};
            treedyn::analytic::GridFunction rho = [&]() {
                if (residual_source == "closed-form")
                    return treedyn::analytic::closed_form_grid(grid);
                if (residual_source == "iterate")
                    return treedyn::analytic::chi_iterate(model, iterations, grid).back();
                if (residual_source == "ode")
                    return treedyn::analytic::solve_heteroclinic(model, grid);
                throw treedyn::config_error("unknown residual source: " +
                                            residual_source);
            }();
            treedyn::report::Csv csv({"model", "source", "fixed_point", "ode"});
            csv.add_row({model.name(), residual_source,
                         format_double(
                             treedyn::analytic::fixed_point_residual(model, rho)),
                         format_double(treedyn::analytic::ode_residual(model, rho))});
            emit(output, csv.str(),
                 {{"command", "analytic residual"},
                  {"model", model.name()},
                  {"source", residual_source}},
                 seed, workers);
        } else if (verify_cmd->parsed()) {
            if (suite != "fast" && suite != "full")
                throw treedyn::config_error("unknown verify suite: " + suite);
            treedyn::verify::SuiteOptions opts;
            opts.seed = seed != 0 ? seed : opts.seed;
            opts.workers = workers;
            opts.full = suite == "full";
            const auto results = treedyn::verify::run_suite(opts);
            treedyn::report::write_file(out_dir + "/verify_" + suite + ".csv",
                                        treedyn::verify::suite_csv(results));
            treedyn::report::write_file(out_dir + "/verify_" + suite + ".json",
                                        treedyn::verify::suite_json(results, opts));
            for (const auto& r : results)
                std::cout << (r.pass ? "PASS" : "FAIL") << " [" << r.criterion << "] "
                          << r.id << ": " << r.measured << " (" << r.requirement
                          << ")\n";
            log_wall_clock();
            return treedyn::verify::all_passed(results) ? kExitOk : kExitVerifyFailed;
        }
    } catch (const treedyn::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const treedyn::cost_guard_error& e) {
        std::cerr << "cost guard: " << e.what() << "\n";
        return kExitCostGuard;
    } catch (const treedyn::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const treedyn::contract_violation& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return kExitConfig;
    }
    log_wall_clock();
    return kExitOk;
}
