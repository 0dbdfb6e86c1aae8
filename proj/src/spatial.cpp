#include "mlrcpf/spatial.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mlrcpf {

std::vector<std::vector<int>> AdjacencyMatrix::neighbor_lists() const {
    std::vector<std::vector<int>> lists(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j)
            if (adjacent(i, j)) lists[static_cast<std::size_t>(i)].push_back(j);
    return lists;
}

AdjacencyMatrix build_adjacency(const std::vector<LandUnit>& units) {
    const int n = static_cast<int>(units.size());
    std::map<GridCell, int> owner;
    for (int i = 0; i < n; ++i) {
        for (const auto& cell : units[static_cast<std::size_t>(i)].cells) {
            auto [it, inserted] = owner.emplace(cell, i);
            if (!inserted && it->second != i) {
                std::ostringstream msg;
                msg << "units " << units[static_cast<std::size_t>(it->second)].id << " and "
                    << units[static_cast<std::size_t>(i)].id << " share grid cell ("
                    << cell.row << "," << cell.col << ")";
                throw std::invalid_argument(msg.str());
            }
        }
    }

    AdjacencyMatrix w;
    w.size = n;
    w.entries.assign(static_cast<std::size_t>(n) * n, 0);
    // Every cell bordering a foreign cell is a boundary cell, so scanning all
    // cells realizes the boundary-pair definition unchanged.
    for (int i = 0; i < n; ++i) {
        for (const auto& cell : units[static_cast<std::size_t>(i)].cells) {
            const GridCell nbrs[4] = {{cell.row - 1, cell.col},
                                      {cell.row + 1, cell.col},
                                      {cell.row, cell.col - 1},
                                      {cell.row, cell.col + 1}};
            for (const auto& nb : nbrs) {
                auto it = owner.find(nb);
                if (it == owner.end() || it->second == i) continue;
                w.entries[static_cast<std::size_t>(i) * n + it->second] = 1;
                w.entries[static_cast<std::size_t>(it->second) * n + i] = 1;
            }
        }
    }
    return w;
}

std::vector<std::string> feasible_crops(const LandUnit& unit, const std::vector<Crop>& crops) {
    std::vector<std::string> ids;
    for (const auto& c : crops) {
        if (std::find(c.allowed_land_types.begin(), c.allowed_land_types.end(),
                      unit.land_type) != c.allowed_land_types.end())
            ids.push_back(c.id);
    }
    return ids;
}

std::vector<int> feasible_crop_indices(const PlanningInstance& instance, int unit) {
    const auto& u = instance.units[static_cast<std::size_t>(unit)];
    std::vector<int> out;
    for (std::size_t c = 0; c < instance.crops.size(); ++c) {
        const auto& allowed = instance.crops[c].allowed_land_types;
        if (std::find(allowed.begin(), allowed.end(), u.land_type) != allowed.end())
            out.push_back(static_cast<int>(c));
    }
    return out;
}

std::vector<std::vector<int>> admissible_actions(const PlanningInstance& instance,
                                                 int /*period*/) {
    // Planting areas are period-uniform, so the filter is period-independent;
    // the parameter stays to match the per-period contract.
    std::vector<std::vector<int>> result(instance.units.size());
    for (std::size_t u = 0; u < instance.units.size(); ++u) {
        for (int c : feasible_crop_indices(instance, static_cast<int>(u))) {
            if (instance.planting_area(static_cast<int>(u), c) <=
                instance.units[u].area)
                result[u].push_back(c);
        }
    }
    return result;
}

std::vector<int> capacity_violation(const Plan& plan, const PlanningInstance& instance,
                                    int period) {
    std::vector<int> offenders;
    for (int u = 0; u < plan.num_units; ++u) {
        const int c = plan.at(u, period);
        if (c == Plan::kFallow) continue;
        if (instance.planting_area(u, c) > instance.units[static_cast<std::size_t>(u)].area)
            offenders.push_back(u);
    }
    return offenders;
}

std::optional<double> water_violation(const Plan& plan, const PlanningInstance& instance,
                                      int period, double water_limit_scale) {
    double used = 0.0;
    for (int u = 0; u < plan.num_units; ++u) {
        if (!instance.units[static_cast<std::size_t>(u)].irrigated_flag) continue;
        const int c = plan.at(u, period);
        if (c == Plan::kFallow) continue;
        used += instance.crops[static_cast<std::size_t>(c)].water_need;
    }
    const double limit =
        instance.water_limits[static_cast<std::size_t>(period)] * water_limit_scale;
    if (used > limit) return used - limit;
    return std::nullopt;
}

} // namespace mlrcpf
