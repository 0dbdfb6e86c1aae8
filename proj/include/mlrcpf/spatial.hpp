// spatial.hpp — adjacency construction, crop admissibility, and per-period
// spatial resource checks (Layer 1).

#pragma once

#include "mlrcpf/core.hpp"

#include <optional>
#include <vector>

namespace mlrcpf {

// Symmetric 0/1 unit-by-unit adjacency with zero diagonal.
struct AdjacencyMatrix {
    int size = 0;
    std::vector<std::uint8_t> entries; // row-major

    bool adjacent(int i, int j) const {
        return entries[static_cast<std::size_t>(i) * size + j] != 0;
    }

    // Neighbor index lists, ascending.
    std::vector<std::vector<int>> neighbor_lists() const;
};

// W_ij = 1 iff some cell of unit i and some cell of unit j are horizontal or
// vertical grid neighbors (L1 distance exactly 1). Throws std::invalid_argument
// if two units share a cell.
AdjacencyMatrix build_adjacency(const std::vector<LandUnit>& units);

// Crop ids admissible on the unit's land type.
std::vector<std::string> feasible_crops(const LandUnit& unit, const std::vector<Crop>& crops);

// Crop indices whose land type fits the unit, ascending.
std::vector<int> feasible_crop_indices(const PlanningInstance& instance, int unit);

// Per-unit admissible crop indices for one period: land type fits and the
// planting area does not exceed the unit area.
std::vector<std::vector<int>> admissible_actions(const PlanningInstance& instance, int period);

// Units whose planted area exceeds capacity in the period.
std::vector<int> capacity_violation(const Plan& plan, const PlanningInstance& instance,
                                    int period);

// Excess irrigation water drawn in the period, if any. The sum runs over units
// with irrigated_flag only. water_limit_scale rescales the period limit (used
// for scenario-specific limits).
std::optional<double> water_violation(const Plan& plan, const PlanningInstance& instance,
                                      int period, double water_limit_scale = 1.0);

} // namespace mlrcpf
