// mlrcpf — batch CLI for the multi-layer robust crop planner.
//
// Subcommands: gen-case-study, solve, evaluate, sweep, oracle. All randomness
// derives from --seed; named sub-streams keep generation and solver restarts
// independently reproducible. MLRCPF_THREADS caps worker threads.

#include "CLI11.hpp"

#include "mlrcpf/io.hpp"
#include "mlrcpf/optimizer.hpp"
#include "mlrcpf/rng.hpp"
#include "mlrcpf/spatial.hpp"
#include "mlrcpf/temporal.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace mlrcpf;

namespace {

constexpr std::uint64_t kGenStream = 101;    // scenario generation
constexpr std::uint64_t kSolverStream = 202; // solver restarts

struct SolverOptions {
    int iterations = 20000;
    int restarts = 4;
    double cooling = 0.9995;
    double t0 = 0.0;
    double rotation_penalty = 0.0;
};

void add_solver_options(CLI::App* cmd, SolverOptions& opts) {
    cmd->add_option("--iterations", opts.iterations, "annealing iterations per restart");
    cmd->add_option("--restarts", opts.restarts, "independent annealing restarts");
    cmd->add_option("--cooling", opts.cooling, "geometric cooling rate in (0,1)");
    cmd->add_option("--t0", opts.t0, "initial temperature (<=0: auto-calibrated)");
    cmd->add_option("--rotation-penalty", opts.rotation_penalty,
                    "soft rotation-stress weight (diagnostics only)");
}

SolverConfig make_config(const SolverOptions& opts, std::uint64_t seed, double rho) {
    SolverConfig cfg;
    cfg.seed = derive_seed(seed, kSolverStream);
    cfg.max_iterations = opts.iterations;
    cfg.restarts = opts.restarts;
    cfg.cooling_rate = opts.cooling;
    cfg.initial_temperature = opts.t0;
    cfg.rotation_penalty_weight = opts.rotation_penalty;
    cfg.rho = rho;
    return cfg;
}

ScenarioSet make_scenarios(const InstanceDocument& doc, int count, std::uint64_t seed) {
    ScenarioGenSpec spec = doc.scenario_spec.value_or(ScenarioGenSpec{});
    if (count > 0) spec.count = count;
    return generate_scenarios(doc.instance, spec, derive_seed(seed, kGenStream));
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (item.empty()) continue;
        grid.push_back(std::stod(item));
    }
    return grid;
}

void write_solution(const fs::path& dir, const Plan& plan, const PlanMetrics& metrics,
                    const PlanningInstance& in, double rho, int scenario_count,
                    std::uint64_t seed, const std::vector<IterationLogEntry>& log,
                    bool maps) {
    fs::create_directories(dir);
    const auto w = build_adjacency(in.units);
    const auto tr = build_trajectory(plan, in, w);
    export_plan(plan, tr, in, (dir / "plan.csv").string(), (dir / "states.json").string());
    write_text_file((dir / "metrics.json").string(),
                    metrics_to_text(metrics, rho, scenario_count, seed));
    if (!log.empty())
        write_text_file((dir / "iterations.csv").string(), iteration_log_to_csv(log));
    if (maps) {
        for (int t = 0; t < plan.horizon; ++t) {
            char name[32];
            std::snprintf(name, sizeof(name), "map_period_%02d.svg", t + 1);
            render_map(plan, in, t, (dir / name).string());
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-layer robust crop planning"};
    app.require_subcommand(1);

    // ---- gen-case-study ----
    auto* gen = app.add_subcommand("gen-case-study", "emit the 54-unit synthetic instance");
    std::uint64_t gen_seed = 1;
    std::string gen_out = "case_study.json";
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output instance path")->required();

    // ---- solve ----
    auto* solve = app.add_subcommand("solve", "optimize a plan and export artifacts");
    std::string solve_instance, solve_mode = "proposed", solve_out = "out";
    int solve_scenarios = 200;
    double solve_rho = 0.05;
    std::uint64_t solve_seed = 1;
    bool solve_no_maps = false;
    SolverOptions solve_opts;
    solve->add_option("--instance", solve_instance, "instance document")->required();
    solve->add_option("--scenarios", solve_scenarios, "Monte Carlo scenario count");
    solve->add_option("--rho", solve_rho, "ambiguity radius");
    solve->add_option("--seed", solve_seed, "master seed");
    solve->add_option("--mode", solve_mode, "proposed | baseline-det | baseline-rob")
        ->check(CLI::IsMember({"proposed", "baseline-det", "baseline-rob"}));
    solve->add_option("--out", solve_out, "output directory");
    solve->add_flag("--no-maps", solve_no_maps, "skip SVG map rendering");
    add_solver_options(solve, solve_opts);

    // ---- evaluate ----
    auto* eval = app.add_subcommand("evaluate", "metrics for an existing plan");
    std::string eval_instance, eval_plan, eval_out;
    int eval_scenarios = 200;
    double eval_rho = 0.05;
    std::uint64_t eval_seed = 1;
    eval->add_option("--instance", eval_instance, "instance document")->required();
    eval->add_option("--plan", eval_plan, "plan CSV")->required();
    eval->add_option("--scenarios", eval_scenarios, "Monte Carlo scenario count");
    eval->add_option("--rho", eval_rho, "ambiguity radius");
    eval->add_option("--seed", eval_seed, "master seed");
    eval->add_option("--out", eval_out, "metrics output path (default: stdout)");

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "worst-case profit across a rho grid");
    std::string sweep_instance, sweep_plan, sweep_grid = "0,0.05,0.1,0.2", sweep_out;
    int sweep_scenarios = 200;
    std::uint64_t sweep_seed = 1;
    bool sweep_resolve = false;
    SolverOptions sweep_opts;
    sweep->add_option("--instance", sweep_instance, "instance document")->required();
    sweep->add_option("--rho-grid", sweep_grid, "comma-separated ascending rho values");
    sweep->add_option("--plan", sweep_plan, "fixed plan CSV (default: solve at grid start)");
    sweep->add_option("--scenarios", sweep_scenarios, "Monte Carlo scenario count");
    sweep->add_option("--seed", sweep_seed, "master seed");
    sweep->add_flag("--resolve", sweep_resolve, "re-solve at each rho from the base plan");
    sweep->add_option("--out", sweep_out, "curve output path (default: stdout)");
    add_solver_options(sweep, sweep_opts);

    // ---- oracle ----
    auto* oracle = app.add_subcommand("oracle", "exhaustive solve (size-guarded)");
    std::string oracle_instance, oracle_out = "oracle_out";
    int oracle_scenarios = 4;
    double oracle_rho = 0.05, oracle_guard = 1e7;
    std::uint64_t oracle_seed = 1;
    oracle->add_option("--instance", oracle_instance, "instance document")->required();
    oracle->add_option("--scenarios", oracle_scenarios, "Monte Carlo scenario count");
    oracle->add_option("--rho", oracle_rho, "ambiguity radius");
    oracle->add_option("--seed", oracle_seed, "master seed");
    oracle->add_option("--out", oracle_out, "output directory");
    oracle->add_option("--max-candidates", oracle_guard, "enumeration guard");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const auto instance = generate_case_study(gen_seed);
            save_instance(instance, gen_out, ScenarioGenSpec{});
            std::cout << "wrote " << gen_out << "\n";
            return 0;
        }
        if (solve->parsed()) {
            const auto doc = load_instance_document(solve_instance);
            const auto set = make_scenarios(doc, solve_scenarios, solve_seed);
            const auto cfg = make_config(solve_opts, solve_seed, solve_rho);
            Plan plan;
            std::vector<IterationLogEntry> log;
            if (solve_mode == "proposed") {
                auto result = local_search_optimize(doc.instance, set, cfg);
                plan = std::move(result.plan);
                log = std::move(result.log);
            } else if (solve_mode == "baseline-det") {
                plan = baseline_deterministic(doc.instance, cfg);
            } else { // baseline-rob: interactions off, same rho
                auto result = local_search_optimize(interactions_off(doc.instance), set, cfg);
                plan = std::move(result.plan);
                log = std::move(result.log);
            }
            // All modes are reported under the full instance, one world for
            // every comparator.
            const auto metrics = evaluate(plan, doc.instance, set, solve_rho);
            write_solution(solve_out, plan, metrics, doc.instance, solve_rho,
                           static_cast<int>(set.scenarios.size()), solve_seed, log,
                           !solve_no_maps);
            std::cout << "mode: " << solve_mode << "\n" << metrics_to_human(metrics);
            return 0;
        }
        if (eval->parsed()) {
            const auto doc = load_instance_document(eval_instance);
            const auto set = make_scenarios(doc, eval_scenarios, eval_seed);
            const auto plan = load_plan(eval_plan, doc.instance);
            const auto metrics = evaluate(plan, doc.instance, set, eval_rho);
            const auto text = metrics_to_text(metrics, eval_rho,
                                              static_cast<int>(set.scenarios.size()), eval_seed);
            if (eval_out.empty())
                std::cout << text;
            else
                write_text_file(eval_out, text);
            return 0;
        }
        if (sweep->parsed()) {
            const auto doc = load_instance_document(sweep_instance);
            const auto set = make_scenarios(doc, sweep_scenarios, sweep_seed);
            const auto grid = parse_grid(sweep_grid);
            if (grid.empty()) throw std::runtime_error("sweep: empty rho grid");
            const auto cfg = make_config(sweep_opts, sweep_seed, grid.front());
            Plan base;
            if (!sweep_plan.empty()) {
                base = load_plan(sweep_plan, doc.instance);
            } else {
                base = local_search_optimize(doc.instance, set, cfg).plan;
            }
            const auto points =
                sensitivity_sweep(doc.instance, set, base, grid,
                                  sweep_resolve ? SweepMode::resolve : SweepMode::fixed_plan, cfg);
            const auto text = sweep_to_csv(points);
            if (sweep_out.empty())
                std::cout << text;
            else
                write_text_file(sweep_out, text);
            return 0;
        }
        if (oracle->parsed()) {
            const auto doc = load_instance_document(oracle_instance);
            const auto set = make_scenarios(doc, oracle_scenarios, oracle_seed);
            const auto result = brute_force_optimize(doc.instance, set, oracle_rho, oracle_guard);
            write_solution(oracle_out, result.plan, result.metrics, doc.instance, oracle_rho,
                           static_cast<int>(set.scenarios.size()), oracle_seed, {}, true);
            std::cout << metrics_to_human(result.metrics);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
