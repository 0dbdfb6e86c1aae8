// uncertainty.hpp — scenario generation, scenario revenue, Wasserstein ground
// cost, and the worst-case inner problem over a finite-support ambiguity ball
// (Layer 3).

#pragma once

#include "mlrcpf/core.hpp"
#include "mlrcpf/temporal.hpp"

#include <vector>

namespace mlrcpf {

// Interaction potential is clamped to this band before it enters the yield
// modifier (1 + kappa * eta).
inline constexpr double kEtaClamp = 0.5;

// One joint realization of yields, prices, costs, and demands over the
// horizon. Yield enters as a multiplicative factor shared across units
// (a regional shock); prices, costs, and demands are absolute values.
struct Scenario {
    int num_crops = 0;
    int horizon = 0;
    std::vector<double> yield_factor; // crop-major, num_crops * horizon
    std::vector<double> price;        // CNY per kg
    std::vector<double> cost;         // CNY per mu
    std::vector<double> demand;       // kg
    double weight = 0.0;
    double water_limit_factor = 1.0;  // scales the per-period water limits

    double yf(int c, int t) const { return yield_factor[static_cast<std::size_t>(c) * horizon + t]; }
    double pr(int c, int t) const { return price[static_cast<std::size_t>(c) * horizon + t]; }
    double co(int c, int t) const { return cost[static_cast<std::size_t>(c) * horizon + t]; }
    double dm(int c, int t) const { return demand[static_cast<std::size_t>(c) * horizon + t]; }
};

struct ScenarioSet {
    std::vector<Scenario> scenarios;
    std::uint64_t seed = 0;

    std::vector<double> weights() const;
    // Throws std::invalid_argument unless non-empty, weights >= 0 summing to
    // 1 within 1e-9, all factors positive, and dimensions uniform.
    void check(int num_crops, int horizon) const;

    // Single scenario at the nominal parameters, weight 1.
    static ScenarioSet nominal(const PlanningInstance& instance);
};

struct ScenarioGenSpec {
    double yield_radius = 0.10;       // delta_Y
    double price_radius = 0.05;
    double cost_radius = 0.05;        // symmetric with price by default
    double demand_growth_min = 0.05;  // staple-grain yearly compounding
    double demand_growth_max = 0.10;
    int count = 200;
};

// Monte Carlo scenario set, deterministic in the seed. Radii must lie in
// [0, 1) and count must be >= 1.
ScenarioSet generate_scenarios(const PlanningInstance& instance, const ScenarioGenSpec& spec,
                               std::uint64_t seed);

// Ambiguity ball: radius rho plus the per-dimension scales of the ground cost
// theta(omega) = (yield factors, prices, costs).
struct AmbiguitySpec {
    double rho = 0.0;
    std::vector<double> yield_scale; // num_crops * horizon
    std::vector<double> price_scale;
    std::vector<double> cost_scale;

    // Scales each dimension by (block size * nominal magnitude), so the
    // distance reads as the mean relative deviation summed over the three
    // parameter blocks.
    static AmbiguitySpec defaults(const PlanningInstance& instance, double rho);
};

// L1 distance over the normalized parameter vector. Throws on dimension
// mismatch.
double ground_distance(const Scenario& a, const Scenario& b, const AmbiguitySpec& spec);

// Dense symmetric pairwise ground distances, row-major.
std::vector<double> distance_matrix(const ScenarioSet& set, const AmbiguitySpec& spec);

struct WorstCaseResult {
    double value = 0.0;                // CNY
    std::vector<double> worst_weights; // q*, on the simplex
    double transport_cost_used = 0.0;  // <= rho
};

// Exact worst-case expectation over the Wasserstein ball of radius rho around
// the empirical weights: min_q sum_k q_k v_k s.t. W1(q, p) <= rho, solved as
// the finite-support transportation program via its one-dimensional concave
// dual (a parametric sweep over the transport price; see solver notes in the
// implementation). Matches an LP oracle to within floating-point error.
//
// Preconditions enforced: rho >= 0, values finite, distances symmetric and
// non-negative with zero diagonal.
WorstCaseResult worst_case_expectation(const std::vector<double>& values,
                                       const std::vector<double>& weights,
                                       const std::vector<double>& distances, double rho);

WorstCaseResult worst_case_expectation(const std::vector<double>& values, const ScenarioSet& set,
                                       const std::vector<double>& distances, double rho);

// Reusable solver for repeated evaluations against fixed weights/distances
// (the hot path of local search): per-source line orders are sorted once.
class WorstCaseSolver {
  public:
    WorstCaseSolver(std::vector<double> weights, std::vector<double> distances);

    WorstCaseResult evaluate(const std::vector<double>& values, double rho) const;

    int size() const { return n_; }

  private:
    int n_ = 0;
    std::vector<double> weights_;
    std::vector<double> distances_;
    // For each source k, destination indices sorted by d_kj descending.
    std::vector<int> slope_order_;

    mutable std::vector<int> piece_dest_;    // scratch: hull destinations
    mutable std::vector<double> piece_from_; // scratch: hull piece start lambdas
    mutable std::vector<int> hull_begin_;    // scratch: per-source hull offsets
    mutable std::vector<int> hull_end_;
};

// Per-period revenues R_t for one scenario: sum over planted (unit, crop) of
// price * sold - cost * area, with yield scaled by gamma_i and the clamped
// interaction modifier (1 + kappa * eta). When the demand cap is enabled,
// production beyond remaining demand earns salvage_fraction of the price and
// demand is drawn down in instance unit order.
std::vector<double> scenario_revenue(const Plan& plan, const Scenario& scenario,
                                     const PlanningInstance& instance,
                                     const StateTrajectory& trajectory);

// Total plan revenue per scenario.
std::vector<double> scenario_totals(const Plan& plan, const PlanningInstance& instance,
                                    const StateTrajectory& trajectory, const ScenarioSet& set);

// Worst-case expected total revenue of the plan over the ambiguity ball.
WorstCaseResult robust_value(const Plan& plan, const PlanningInstance& instance,
                             const StateTrajectory& trajectory, const ScenarioSet& set,
                             double rho);

// Scenario-specific feasibility: capacity, scenario-scaled water limits, and
// the optional per-scenario revenue floor.
bool scenario_feasible(const Plan& plan, const Scenario& scenario,
                       const PlanningInstance& instance);

} // namespace mlrcpf
