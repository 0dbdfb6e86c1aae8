// Synthetic high-mix planning instance: a fragmented North-China-style
// village with 54 units over 1201 mu, 41 crop varieties, and 14 seasonal
// periods (7 years). Economics are calibrated so that open-field grains and
// legumes carry thin stable margins while greenhouse vegetables and fungi
// carry high but volatile ones.

#include "mlrcpf/io.hpp"
#include "mlrcpf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mlrcpf {

namespace {

struct CropSeed {
    const char* id;
    CropCategory category;
    double yield_lo, yield_hi;  // kg per mu
    double price_lo, price_hi;  // CNY per kg
    double cost_lo, cost_hi;    // CNY per mu
    double water_lo, water_hi;  // m^3 per planting
    int tau;
    int habitat; // 0 open (all dry + irrigated), 1 irrigated only,
                 // 2 open-field vegetable (dry_flat + irrigated),
                 // 3 greenhouse, 4 smart greenhouse only
};

// 8 cereals, 7 legumes, 18 vegetables, 8 edible fungi.
constexpr CropSeed kCropSeeds[] = {
    {"wheat", CropCategory::cereal, 420, 560, 2.3, 2.8, 420, 560, 110, 160, 2, 0},
    {"corn", CropCategory::cereal, 480, 640, 2.2, 2.7, 430, 580, 120, 180, 2, 0},
    {"millet", CropCategory::cereal, 300, 420, 3.4, 4.2, 380, 520, 90, 130, 2, 0},
    {"sorghum", CropCategory::cereal, 400, 540, 2.4, 3.0, 390, 540, 100, 150, 2, 0},
    {"barley", CropCategory::cereal, 380, 500, 2.3, 2.9, 380, 520, 100, 150, 2, 0},
    {"oat", CropCategory::cereal, 320, 430, 3.2, 4.0, 370, 500, 90, 140, 2, 0},
    {"buckwheat", CropCategory::cereal, 260, 360, 3.8, 4.6, 350, 470, 80, 120, 2, 0},
    {"rice", CropCategory::cereal, 520, 650, 2.8, 3.4, 520, 700, 380, 460, 2, 1},

    {"soybean", CropCategory::legume, 170, 250, 5.2, 6.4, 330, 470, 70, 110, 2, 0},
    {"mung_bean", CropCategory::legume, 140, 210, 6.0, 7.4, 320, 450, 60, 100, 2, 0},
    {"adzuki_bean", CropCategory::legume, 140, 200, 6.2, 7.6, 330, 460, 60, 100, 3, 0},
    {"pea", CropCategory::legume, 180, 260, 5.0, 6.2, 340, 480, 70, 110, 2, 0},
    {"broad_bean", CropCategory::legume, 190, 270, 4.8, 6.0, 350, 490, 80, 120, 2, 0},
    {"cowpea", CropCategory::legume, 160, 230, 5.4, 6.6, 330, 460, 70, 110, 2, 0},
    {"peanut", CropCategory::legume, 220, 320, 4.6, 5.8, 420, 580, 90, 130, 3, 0},

    {"potato", CropCategory::vegetable, 1800, 2600, 1.5, 2.1, 2600, 3600, 160, 240, 3, 2},
    {"cabbage", CropCategory::vegetable, 2600, 3600, 1.3, 1.9, 2800, 3900, 200, 280, 2, 2},
    {"radish", CropCategory::vegetable, 2400, 3300, 1.2, 1.8, 2500, 3500, 180, 260, 2, 2},
    {"carrot", CropCategory::vegetable, 2200, 3100, 1.5, 2.1, 2600, 3700, 180, 260, 2, 2},
    {"chinese_cabbage", CropCategory::vegetable, 2800, 3900, 1.2, 1.8, 2700, 3800, 200, 280, 2, 2},
    {"pumpkin", CropCategory::vegetable, 2000, 2900, 1.4, 2.0, 2400, 3400, 170, 250, 2, 2},

    {"tomato", CropCategory::vegetable, 3200, 4400, 2.6, 3.6, 5200, 7800, 50, 80, 2, 3},
    {"cucumber", CropCategory::vegetable, 3400, 4600, 2.4, 3.4, 5000, 7500, 50, 80, 2, 3},
    {"eggplant", CropCategory::vegetable, 3000, 4100, 2.5, 3.5, 4900, 7300, 50, 80, 2, 3},
    {"pepper", CropCategory::vegetable, 2700, 3800, 2.8, 3.8, 5100, 7600, 50, 80, 2, 3},
    {"spinach", CropCategory::vegetable, 2200, 3100, 2.6, 3.6, 4300, 6400, 40, 70, 2, 3},
    {"celery", CropCategory::vegetable, 2900, 4000, 2.3, 3.3, 4600, 6900, 40, 70, 2, 3},
    {"lettuce", CropCategory::vegetable, 2400, 3400, 2.5, 3.5, 4400, 6600, 40, 70, 2, 3},
    {"cauliflower", CropCategory::vegetable, 2500, 3500, 2.7, 3.7, 4800, 7200, 40, 70, 2, 3},
    {"zucchini", CropCategory::vegetable, 2800, 3900, 2.3, 3.3, 4500, 6700, 40, 70, 2, 3},
    {"garlic_sprout", CropCategory::vegetable, 2000, 2900, 3.0, 4.0, 4700, 7000, 40, 70, 2, 3},
    {"leek", CropCategory::vegetable, 2300, 3200, 2.7, 3.7, 4400, 6600, 40, 70, 2, 3},
    {"strawberry", CropCategory::vegetable, 1700, 2500, 6.5, 8.5, 8200, 11500, 50, 80, 2, 3},

    {"shiitake", CropCategory::fungus, 1500, 2100, 9.5, 13.0, 13500, 18500, 30, 60, 2, 3},
    {"oyster_mushroom", CropCategory::fungus, 1700, 2400, 8.0, 11.0, 12500, 17000, 30, 60, 1, 3},
    {"enoki", CropCategory::fungus, 1400, 2000, 9.0, 12.5, 13000, 18000, 30, 60, 1, 3},
    {"king_oyster", CropCategory::fungus, 1500, 2100, 9.5, 13.0, 13500, 18500, 30, 60, 2, 3},
    {"wood_ear", CropCategory::fungus, 1200, 1700, 11.0, 15.0, 13800, 19000, 30, 60, 2, 3},
    {"straw_mushroom", CropCategory::fungus, 1300, 1900, 9.0, 12.5, 12800, 17500, 30, 60, 1, 3},
    {"agaricus", CropCategory::fungus, 1500, 2100, 8.5, 11.5, 12600, 17200, 30, 60, 2, 3},
    {"morel", CropCategory::fungus, 900, 1300, 18.0, 26.0, 16500, 22500, 30, 60, 2, 4},
};

std::vector<LandType> habitat_types(int habitat) {
    switch (habitat) {
    case 0:
        return {LandType::dry_flat, LandType::dry_terrace, LandType::dry_hillside,
                LandType::irrigated};
    case 1: return {LandType::irrigated};
    case 2: return {LandType::dry_flat, LandType::irrigated};
    case 3: return {LandType::greenhouse, LandType::smart_greenhouse};
    case 4: return {LandType::smart_greenhouse};
    }
    return {};
}

} // namespace

PlanningInstance generate_case_study(std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0xca5e));
    PlanningInstance in;
    in.horizon = 14;
    in.interaction_yield_gain = 0.05;
    in.salvage_fraction = 0.0;
    in.demand_cap_enabled = false;

    // ---- crops ------------------------------------------------------------
    for (const auto& s : kCropSeeds) {
        Crop c;
        c.id = s.id;
        c.category = s.category;
        c.baseline_yield = std::round(rng.uniform(s.yield_lo, s.yield_hi));
        c.baseline_price = std::round(rng.uniform(s.price_lo, s.price_hi) * 100.0) / 100.0;
        c.baseline_cost = std::round(rng.uniform(s.cost_lo, s.cost_hi));
        c.water_need = std::round(rng.uniform(s.water_lo, s.water_hi));
        c.replant_interval = s.tau;
        c.allowed_land_types = habitat_types(s.habitat);
        in.crops.push_back(std::move(c));
    }

    // ---- units ------------------------------------------------------------
    struct UnitSeed {
        LandType type;
        int count;
        double area_lo, area_hi;
        bool irrigated;
    };
    const UnitSeed unit_seeds[] = {
        {LandType::dry_flat, 12, 28, 42, false},
        {LandType::dry_terrace, 8, 22, 34, false},
        {LandType::dry_hillside, 6, 16, 28, false},
        {LandType::irrigated, 8, 20, 32, true},
        {LandType::greenhouse, 16, 2.0, 3.5, false},
        {LandType::smart_greenhouse, 4, 3.5, 5.5, false},
    };
    int serial = 0;
    for (const auto& s : unit_seeds) {
        for (int k = 0; k < s.count; ++k) {
            LandUnit u;
            ++serial;
            u.id = serial < 10 ? "U0" + std::to_string(serial) : "U" + std::to_string(serial);
            u.land_type = s.type;
            u.area = rng.uniform(s.area_lo, s.area_hi);
            u.productivity_factor = std::round(rng.uniform(0.8, 1.2) * 1000.0) / 1000.0;
            u.fertility_level = rng.uniform_int(1, 5);
            u.irrigated_flag = s.irrigated;
            in.units.push_back(std::move(u));
        }
    }
    // Rescale areas to total exactly 1201 mu; absorb rounding in unit 1.
    double raw_total = 0.0;
    for (const auto& u : in.units) raw_total += u.area;
    const double scale = 1201.0 / raw_total;
    double scaled_total = 0.0;
    for (auto& u : in.units) {
        u.area = std::round(u.area * scale * 100.0) / 100.0;
        scaled_total += u.area;
    }
    in.units[0].area += 1201.0 - scaled_total;

    // Grid layout: ~2 mu per cell, strip-packed row-major over a 28-wide
    // field in shuffled unit order so land types interleave and adjacency is
    // non-trivial.
    std::vector<int> order(in.units.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.next_below(i)]);
    constexpr int kRowWidth = 28;
    int row = 0, col = 0;
    for (int idx : order) {
        auto& u = in.units[static_cast<std::size_t>(idx)];
        const int cells = std::max(1, static_cast<int>(std::round(u.area / 2.0)));
        for (int k = 0; k < cells; ++k) {
            u.cells.push_back({row, col});
            if (++col == kRowWidth) {
                col = 0;
                ++row;
            }
        }
    }

    // ---- interaction matrix ------------------------------------------------
    const int n = static_cast<int>(in.crops.size());
    in.interaction = InteractionMatrix::zero(n);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const auto ca = in.crops[static_cast<std::size_t>(a)].category;
            const auto cb = in.crops[static_cast<std::size_t>(b)].category;
            double value;
            const bool legume_cereal =
                (ca == CropCategory::legume && cb == CropCategory::cereal) ||
                (ca == CropCategory::cereal && cb == CropCategory::legume);
            if (legume_cereal)
                value = rng.uniform(0.25, 0.5); // nitrogen fixation bonus
            else if (ca == cb)
                value = rng.uniform(-0.35, -0.15); // shared niche, competition
            else
                value = rng.uniform(-0.1, 0.05);
            in.interaction.at(a, b) = value;
            in.interaction.at(b, a) = value;
        }

    // ---- resources and history ---------------------------------------------
    in.water_limits.assign(static_cast<std::size_t>(in.horizon), 1400.0);
    for (auto& u : in.units) {
        std::vector<int> menu;
        for (int c = 0; c < n; ++c) {
            const auto& allowed = in.crops[static_cast<std::size_t>(c)].allowed_land_types;
            if (std::find(allowed.begin(), allowed.end(), u.land_type) != allowed.end())
                menu.push_back(c);
        }
        const int pick = menu[rng.next_below(menu.size())];
        in.planting_history[u.id] = in.crops[static_cast<std::size_t>(pick)].id;
    }
    return in;
}

} // namespace mlrcpf
