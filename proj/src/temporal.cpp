#include "mlrcpf/temporal.hpp"

#include <algorithm>

namespace mlrcpf {

std::vector<AgronomicState> initial_states(const PlanningInstance& instance) {
    std::vector<AgronomicState> states(instance.units.size());
    for (const auto& [unit_id, crop_id] : instance.planting_history) {
        const int u = instance.unit_index(unit_id);
        const int c = instance.crop_index(crop_id);
        if (u >= 0 && c >= 0) states[static_cast<std::size_t>(u)].last_crop = c;
    }
    return states;
}

double rotation_stress_update(const AgronomicState& state, std::optional<int> chosen,
                              const std::vector<Crop>& crops) {
    double delta = 0.0;
    if (chosen && state.last_crop &&
        crops[static_cast<std::size_t>(*chosen)].category ==
            crops[static_cast<std::size_t>(*state.last_crop)].category) {
        delta = 1.0;
    } else if (chosen &&
               crops[static_cast<std::size_t>(*chosen)].category == CropCategory::legume) {
        delta = -2.0;
    } else if (!chosen) {
        delta = -1.0;
    }
    return std::max(0.0, state.rotation_stress + delta);
}

double interaction_potential(int unit, int period, const Plan& plan, const AdjacencyMatrix& w,
                             const InteractionMatrix& m) {
    const int own = plan.at(unit, period);
    if (own == Plan::kFallow) return 0.0;
    double eta = 0.0;
    for (int j = 0; j < plan.num_units; ++j) {
        if (!w.adjacent(unit, j)) continue;
        const int other = plan.at(j, period);
        if (other != Plan::kFallow) eta += m.at(own, other);
    }
    return eta;
}

std::vector<AgronomicState> transition(const std::vector<AgronomicState>& states, const Plan& plan,
                                       int period, const AdjacencyMatrix& w,
                                       const PlanningInstance& instance) {
    std::vector<AgronomicState> next(states.size());
    for (int u = 0; u < plan.num_units; ++u) {
        const auto& cur = states[static_cast<std::size_t>(u)];
        const int chosen = plan.at(u, period);
        const std::optional<int> chosen_opt =
            chosen == Plan::kFallow ? std::nullopt : std::optional<int>(chosen);
        auto& out = next[static_cast<std::size_t>(u)];
        // Fallow retains last_crop so the replant interval keeps counting
        // elapsed periods.
        out.last_crop = chosen_opt ? chosen_opt : cur.last_crop;
        out.rotation_stress = rotation_stress_update(cur, chosen_opt, instance.crops);
        out.interaction_potential = interaction_potential(u, period, plan, w,
                                                          instance.interaction);
    }
    return next;
}

StateTrajectory build_trajectory(const Plan& plan, const PlanningInstance& instance,
                                 const AdjacencyMatrix& w) {
    StateTrajectory tr;
    tr.num_units = plan.num_units;
    tr.horizon = plan.horizon;
    tr.states.resize(static_cast<std::size_t>(plan.num_units) * (plan.horizon + 1));

    std::vector<AgronomicState> cur = initial_states(instance);
    for (int u = 0; u < plan.num_units; ++u) tr.at(u, 0) = cur[static_cast<std::size_t>(u)];
    for (int t = 0; t < plan.horizon; ++t) {
        cur = transition(cur, plan, t, w, instance);
        for (int u = 0; u < plan.num_units; ++u)
            tr.at(u, t + 1) = cur[static_cast<std::size_t>(u)];
    }
    return tr;
}

std::vector<RotationViolation> rotation_legal(const Plan& plan,
                                              const PlanningInstance& instance) {
    std::vector<RotationViolation> out;
    for (int u = 0; u < plan.num_units; ++u) {
        for (int t = 0; t < plan.horizon; ++t) {
            const int c = plan.at(u, t);
            if (c == Plan::kFallow) continue;
            const int tau = instance.crops[static_cast<std::size_t>(c)].replant_interval;
            for (int delta = 1; delta < tau && t + delta < plan.horizon; ++delta) {
                if (plan.at(u, t + delta) == c) out.push_back({u, t + delta, c});
            }
        }
    }
    return out;
}

} // namespace mlrcpf
