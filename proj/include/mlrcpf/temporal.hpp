// temporal.hpp — agronomic state transitions, rotation legality, and
// interaction-potential aggregation (Layer 2).

#pragma once

#include "mlrcpf/core.hpp"
#include "mlrcpf/spatial.hpp"

#include <vector>

namespace mlrcpf {

// States per (unit, period) for periods 1..horizon+1 (stored 0-based: index t
// holds the state entering period t+1). states(u, 0) is the initial state;
// states(u, t) for t >= 1 is the state produced by the period-t decisions.
struct StateTrajectory {
    int num_units = 0;
    int horizon = 0;
    std::vector<AgronomicState> states; // num_units * (horizon + 1)

    const AgronomicState& at(int unit, int period_index) const {
        return states[static_cast<std::size_t>(unit) * (horizon + 1) + period_index];
    }
    AgronomicState& at(int unit, int period_index) {
        return states[static_cast<std::size_t>(unit) * (horizon + 1) + period_index];
    }

    // Interaction potential generated by the period-t decisions (eta of the
    // same-period aggregation), as stored by the transition into t+1.
    double interaction_for_period(int unit, int period) const {
        return at(unit, period + 1).interaction_potential;
    }
};

// All-zero states; last_crop seeded from the instance planting history.
std::vector<AgronomicState> initial_states(const PlanningInstance& instance);

// Rotation-stress update g: same-category repetition adds 1, a legume relieves
// 2, fallow relieves 1, anything else is neutral; floor at 0. The first
// matching branch in that order applies.
double rotation_stress_update(const AgronomicState& state, std::optional<int> chosen,
                              const std::vector<Crop>& crops);

// Same-period neighbor aggregation, collapsed to one term per planted
// neighbor since each unit hosts at most one crop.
double interaction_potential(int unit, int period, const Plan& plan, const AdjacencyMatrix& w,
                             const InteractionMatrix& m);

// One period step: updates last_crop (retained under fallow), rotation stress,
// and interaction potential for every unit.
std::vector<AgronomicState> transition(const std::vector<AgronomicState>& states, const Plan& plan,
                                       int period, const AdjacencyMatrix& w,
                                       const PlanningInstance& instance);

// Full trajectory for a plan: initial states plus one transition per period.
StateTrajectory build_trajectory(const Plan& plan, const PlanningInstance& instance,
                                 const AdjacencyMatrix& w);

// Every premature repetition: crop c at periods t and t+delta with
// 1 <= delta < tau_c, reported at the later period.
struct RotationViolation {
    int unit = 0;
    int period = 0; // later period of the offending pair, 0-based
    int crop = 0;
};

std::vector<RotationViolation> rotation_legal(const Plan& plan, const PlanningInstance& instance);

} // namespace mlrcpf
