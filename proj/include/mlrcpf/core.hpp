// core.hpp — domain types shared by every module, plus instance validation.
//
// All types here are plain immutable value aggregates: construct, validate,
// then share freely across threads. Nothing in this module mutates after
// construction.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mlrcpf {

enum class LandType : std::uint8_t {
    dry_flat,
    dry_terrace,
    dry_hillside,
    irrigated,
    greenhouse,
    smart_greenhouse,
};

enum class CropCategory : std::uint8_t {
    cereal,
    legume,
    vegetable,
    fungus,
};

const char* to_string(LandType t);
const char* to_string(CropCategory c);
std::optional<LandType> land_type_from_string(const std::string& s);
std::optional<CropCategory> crop_category_from_string(const std::string& s);

// Integer grid coordinate (row, col). Units own disjoint sets of cells.
struct GridCell {
    int row = 0;
    int col = 0;

    friend bool operator==(const GridCell&, const GridCell&) = default;
    friend auto operator<=>(const GridCell&, const GridCell&) = default;
};

struct LandUnit {
    std::string id;
    LandType land_type = LandType::dry_flat;
    double area = 0.0;                // mu
    double productivity_factor = 1.0; // gamma, dimensionless
    int fertility_level = 3;          // ordinal 1..5
    bool irrigated_flag = false;
    std::vector<GridCell> cells;      // kept sorted and deduplicated
};

struct Crop {
    std::string id;
    CropCategory category = CropCategory::cereal;
    double baseline_yield = 0.0; // kg per mu
    double baseline_price = 0.0; // CNY per kg
    double baseline_cost = 0.0;  // CNY per mu
    double water_need = 0.0;     // m^3 per planting
    int replant_interval = 1;    // tau, in periods, >= 1
    std::vector<LandType> allowed_land_types;
    // Area one planting occupies. Absent means the whole unit.
    std::optional<double> area_per_planting;
};

// Dense signed crop-by-crop coefficients; positive = complementarity,
// negative = competition. Diagonal is zero.
struct InteractionMatrix {
    int size = 0;
    std::vector<double> entries; // row-major, size*size

    double at(int a, int b) const { return entries[static_cast<std::size_t>(a) * size + b]; }
    double& at(int a, int b) { return entries[static_cast<std::size_t>(a) * size + b]; }

    static InteractionMatrix zero(int n) {
        InteractionMatrix m;
        m.size = n;
        m.entries.assign(static_cast<std::size_t>(n) * n, 0.0);
        return m;
    }
};

struct PlanningInstance {
    std::vector<LandUnit> units;
    std::vector<Crop> crops;
    InteractionMatrix interaction;
    int horizon = 1;                       // number of periods, two per year
    std::vector<double> water_limits;      // per period, m^3
    double interaction_yield_gain = 0.05;  // kappa in the yield modifier
    double salvage_fraction = 0.0;         // price fraction paid for surplus
    std::optional<int> legume_window;      // max run of non-legume plantings
    bool demand_cap_enabled = false;       // off: revenue ignores demand
    std::optional<double> revenue_floor;   // per-scenario minimum total revenue
    // Declared 2023 plantings; seeds last_crop at period 1.
    std::map<std::string, std::string> planting_history;

    int unit_index(const std::string& id) const;  // -1 if unknown
    int crop_index(const std::string& id) const;  // -1 if unknown

    // Area occupied when crop c is planted on unit u.
    double planting_area(int unit, int crop) const {
        const auto& ov = crops[static_cast<std::size_t>(crop)].area_per_planting;
        return ov ? *ov : units[static_cast<std::size_t>(unit)].area;
    }
};

// Binary allocation x_{i,t}^{(c)} with at most one crop per (unit, period) by
// construction: each slot holds a crop index or kFallow. Periods are 0-based
// internally; serialized artifacts print them 1-based.
struct Plan {
    static constexpr int kFallow = -1;

    int num_units = 0;
    int horizon = 0;
    std::vector<int> slots; // num_units * horizon, crop index or kFallow

    Plan() = default;
    Plan(int units, int periods)
        : num_units(units), horizon(periods),
          slots(static_cast<std::size_t>(units) * periods, kFallow) {}

    int at(int unit, int period) const {
        return slots[static_cast<std::size_t>(unit) * horizon + period];
    }
    void set(int unit, int period, int crop) {
        slots[static_cast<std::size_t>(unit) * horizon + period] = crop;
    }
    bool planted(int unit, int period) const { return at(unit, period) != kFallow; }

    int planting_count() const {
        int n = 0;
        for (int s : slots) n += (s != kFallow);
        return n;
    }

    friend bool operator==(const Plan&, const Plan&) = default;
};

// Per-unit agronomic state (ell, r, eta).
struct AgronomicState {
    std::optional<int> last_crop;       // crop index
    double rotation_stress = 0.0;       // r >= 0
    double interaction_potential = 0.0; // eta
};

// One violated rule: which entity, which rule, human-readable detail.
struct Violation {
    std::string entity;
    std::string rule;
    std::string message;
};

std::string format_violations(const std::vector<Violation>& violations);

// Checks every type invariant of the instance. Violations are data, not
// faults: the list is empty iff the instance is well formed. Idempotent.
std::vector<Violation> validate_instance(const PlanningInstance& instance);

} // namespace mlrcpf
