// optimizer.hpp — the unified program: full feasibility checking, plan
// metrics, an exact enumeration oracle, simulated-annealing local search, and
// rho-sensitivity sweeps.

#pragma once

#include "mlrcpf/core.hpp"
#include "mlrcpf/uncertainty.hpp"

#include <cstdint>
#include <vector>

namespace mlrcpf {

struct PlanMetrics {
    double total_expected_profit = 0.0; // CNY, empirical mean of horizon totals
    double worst_case_profit = 0.0;     // CNY, robust value at the given rho
    double volatility = 0.0;            // CNY, std dev of annual profits
    double legume_ratio = 0.0;          // legume plantings / all plantings
};

struct MoveWeights {
    double reassign = 0.6; // change one (unit, period) to another crop or fallow
    double swap = 0.25;    // exchange two units' crops within a period
    double rotate = 0.15;  // swap a unit's two consecutive periods
};

struct SolverConfig {
    std::uint64_t seed = 1;
    int max_iterations = 20000; // per restart; 0 returns the initial plan
    double initial_temperature = 0.0; // <= 0: calibrated from sampled move deltas
    double cooling_rate = 0.9995;     // geometric, per iteration
    int restarts = 4;
    double rho = 0.05;
    // Soft rotation-stress penalty for search diagnostics. Emitted plans are
    // hard-feasible regardless; this only shapes the search objective.
    double rotation_penalty_weight = 0.0;
    MoveWeights move_weights;
};

struct IterationLogEntry {
    int iteration = 0;
    double temperature = 0.0;
    double current_value = 0.0;
    double best_value = 0.0;
    bool accepted = false;
};

struct SolveResult {
    Plan plan;
    PlanMetrics metrics;
    double robust_value = 0.0; // objective of the returned plan at config.rho
    std::vector<IterationLogEntry> log;
};

// Copy of the instance with interactions disabled (kappa = 0, M = 0); the
// baseline comparators solve against this view.
PlanningInstance interactions_off(const PlanningInstance& instance);

// Aggregated feasibility per the unified program: admissibility, capacity,
// water, rotation interval, and the optional legume window. One crop per
// (unit, period) holds by construction of Plan. Empty list iff feasible.
std::vector<Violation> feasible(const Plan& plan, const PlanningInstance& instance);

// Adds the scenario-level checks: water limits under each scenario's limit
// factor and the optional per-scenario revenue floor.
std::vector<Violation> feasible(const Plan& plan, const PlanningInstance& instance,
                                const ScenarioSet& set);

// Metrics of a feasible plan. Volatility pools annual profits (two periods
// per year, a trailing odd period counts as a year) over scenarios, weighted
// by scenario probability. Throws std::invalid_argument on infeasible plans.
PlanMetrics evaluate(const Plan& plan, const PlanningInstance& instance, const ScenarioSet& set,
                     double rho);

// Exhaustive search over all feasible plans; exact up to the enumeration
// guard. Throws std::invalid_argument with a size report when the raw
// candidate count exceeds max_candidates. Ties broken by lexicographic plan
// encoding over (unit id, period, crop id).
SolveResult brute_force_optimize(const PlanningInstance& instance, const ScenarioSet& set,
                                 double rho, double max_candidates = 1e7);

// Simulated annealing over hard-feasible plans; candidate moves that violate
// any constraint are rejected. Deterministic in config.seed; restarts run
// concurrently and merge by best robust value (ties to the lowest restart
// index). Never returns a plan worse than the initial one.
SolveResult local_search_optimize(const PlanningInstance& instance, const ScenarioSet& set,
                                  const SolverConfig& config);
SolveResult local_search_optimize(const PlanningInstance& instance, const ScenarioSet& set,
                                  const SolverConfig& config, const Plan& initial);

// Nominal-scenario comparator: maximizes deterministic 2023-calibrated profit
// with interactions off, same feasibility rules.
Plan baseline_deterministic(const PlanningInstance& instance, const SolverConfig& config);

enum class SweepMode {
    fixed_plan, // re-evaluate the given plan at each rho
    resolve,    // re-solve at each rho, seeded from the given plan
};

struct SweepPoint {
    double rho = 0.0;
    double worst_case_profit = 0.0;
};

// Worst-case profit across an ascending rho grid. Fixed-plan mode yields a
// non-increasing curve; resolve mode dominates it pointwise because each
// re-solve starts from the same base plan.
std::vector<SweepPoint> sensitivity_sweep(const PlanningInstance& instance,
                                          const ScenarioSet& set, const Plan& base_plan,
                                          const std::vector<double>& rho_grid, SweepMode mode,
                                          const SolverConfig& config);

} // namespace mlrcpf
