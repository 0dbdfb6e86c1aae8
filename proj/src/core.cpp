#include "mlrcpf/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace mlrcpf {

const char* to_string(LandType t) {
    switch (t) {
    case LandType::dry_flat: return "dry_flat";
    case LandType::dry_terrace: return "dry_terrace";
    case LandType::dry_hillside: return "dry_hillside";
    case LandType::irrigated: return "irrigated";
    case LandType::greenhouse: return "greenhouse";
    case LandType::smart_greenhouse: return "smart_greenhouse";
    }
    return "?";
}

const char* to_string(CropCategory c) {
    switch (c) {
    case CropCategory::cereal: return "cereal";
    case CropCategory::legume: return "legume";
    case CropCategory::vegetable: return "vegetable";
    case CropCategory::fungus: return "fungus";
    }
    return "?";
}

std::optional<LandType> land_type_from_string(const std::string& s) {
    static const std::pair<const char*, LandType> table[] = {
        {"dry_flat", LandType::dry_flat},
        {"dry_terrace", LandType::dry_terrace},
        {"dry_hillside", LandType::dry_hillside},
        {"irrigated", LandType::irrigated},
        {"greenhouse", LandType::greenhouse},
        {"smart_greenhouse", LandType::smart_greenhouse},
    };
    for (const auto& [name, value] : table)
        if (s == name) return value;
    return std::nullopt;
}

std::optional<CropCategory> crop_category_from_string(const std::string& s) {
    static const std::pair<const char*, CropCategory> table[] = {
        {"cereal", CropCategory::cereal},
        {"legume", CropCategory::legume},
        {"vegetable", CropCategory::vegetable},
        {"fungus", CropCategory::fungus},
    };
    for (const auto& [name, value] : table)
        if (s == name) return value;
    return std::nullopt;
}

int PlanningInstance::unit_index(const std::string& id) const {
    for (std::size_t i = 0; i < units.size(); ++i)
        if (units[i].id == id) return static_cast<int>(i);
    return -1;
}

int PlanningInstance::crop_index(const std::string& id) const {
    for (std::size_t i = 0; i < crops.size(); ++i)
        if (crops[i].id == id) return static_cast<int>(i);
    return -1;
}

std::string format_violations(const std::vector<Violation>& violations) {
    std::ostringstream out;
    for (const auto& v : violations)
        out << v.entity << " [" << v.rule << "]: " << v.message << "\n";
    return out.str();
}

namespace {

void check_units(const PlanningInstance& in, std::vector<Violation>& out) {
    std::set<std::string> seen_ids;
    std::map<GridCell, std::string> cell_owner;
    for (const auto& u : in.units) {
        if (!seen_ids.insert(u.id).second)
            out.push_back({u.id, "unit_id_unique", "duplicate unit id"});
        if (!(u.area > 0.0))
            out.push_back({u.id, "area_positive", "area must be > 0"});
        if (!(u.productivity_factor > 0.0))
            out.push_back({u.id, "productivity_positive", "productivity_factor must be > 0"});
        if (u.fertility_level < 1 || u.fertility_level > 5)
            out.push_back({u.id, "fertility_range", "fertility_level must be in 1..5"});
        if (u.cells.empty())
            out.push_back({u.id, "cells_nonempty", "unit has no grid cells"});
        for (const auto& cell : u.cells) {
            auto [it, inserted] = cell_owner.emplace(cell, u.id);
            if (!inserted && it->second != u.id) {
                std::ostringstream msg;
                msg << "cell (" << cell.row << "," << cell.col << ") also owned by unit "
                    << it->second;
                out.push_back({u.id, "cells_disjoint", msg.str()});
            }
        }
    }
}

void check_crops(const PlanningInstance& in, std::vector<Violation>& out) {
    std::set<std::string> seen_ids;
    for (const auto& c : in.crops) {
        if (!seen_ids.insert(c.id).second)
            out.push_back({c.id, "crop_id_unique", "duplicate crop id"});
        if (c.baseline_yield < 0.0)
            out.push_back({c.id, "yield_nonnegative", "baseline_yield must be >= 0"});
        if (c.replant_interval < 1)
            out.push_back({c.id, "replant_interval_min", "replant_interval must be >= 1"});
        if (c.allowed_land_types.empty())
            out.push_back({c.id, "allowed_land_types_nonempty", "no allowed land types"});
        if (c.area_per_planting && !(*c.area_per_planting > 0.0))
            out.push_back({c.id, "area_per_planting_positive", "area_per_planting must be > 0"});
        if (c.water_need < 0.0)
            out.push_back({c.id, "water_need_nonnegative", "water_need must be >= 0"});
    }
}

void check_interaction(const PlanningInstance& in, std::vector<Violation>& out) {
    const auto& m = in.interaction;
    const int n = static_cast<int>(in.crops.size());
    if (m.size != n || m.entries.size() != static_cast<std::size_t>(n) * n) {
        out.push_back({"interaction", "interaction_square",
                       "matrix side must equal the number of crops"});
        return;
    }
    for (int a = 0; a < n; ++a) {
        if (m.at(a, a) != 0.0)
            out.push_back({in.crops[a].id, "interaction_zero_diagonal",
                           "diagonal interaction entry must be 0"});
        for (int b = 0; b < n; ++b)
            if (!std::isfinite(m.at(a, b))) {
                out.push_back({in.crops[a].id, "interaction_finite",
                               "non-finite interaction entry vs " + in.crops[b].id});
            }
    }
}

void check_scalars(const PlanningInstance& in, std::vector<Violation>& out) {
    if (in.horizon < 1)
        out.push_back({"instance", "horizon_min", "horizon must be >= 1"});
    if (static_cast<int>(in.water_limits.size()) != in.horizon)
        out.push_back({"instance", "water_limits_length",
                       "water_limits must have one entry per period"});
    for (std::size_t t = 0; t < in.water_limits.size(); ++t)
        if (in.water_limits[t] < 0.0)
            out.push_back({"instance", "water_limits_nonnegative",
                           "water limit for period " + std::to_string(t + 1) + " is negative"});
    if (in.salvage_fraction < 0.0 || in.salvage_fraction > 1.0)
        out.push_back({"instance", "salvage_range", "salvage_fraction must be in [0,1]"});
    if (in.legume_window && *in.legume_window < 1)
        out.push_back({"instance", "legume_window_min", "legume_window must be >= 1"});
    for (const auto& [unit_id, crop_id] : in.planting_history) {
        if (in.unit_index(unit_id) < 0)
            out.push_back({unit_id, "history_unit_exists", "history names unknown unit"});
        if (in.crop_index(crop_id) < 0)
            out.push_back({crop_id, "history_crop_exists", "history names unknown crop"});
    }
}

} // namespace

std::vector<Violation> validate_instance(const PlanningInstance& instance) {
    std::vector<Violation> out;
    check_units(instance, out);
    check_crops(instance, out);
    check_interaction(instance, out);
    check_scalars(instance, out);
    return out;
}

} // namespace mlrcpf
