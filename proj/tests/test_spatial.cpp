#include "doctest.h"

#include "support/test_support.hpp"

#include <stdexcept>

using namespace mlrcpf;
using namespace mlrcpf_test;

TEST_CASE("orthogonally touching cells are adjacent, diagonal ones are not") {
    std::vector<LandUnit> units;
    units.push_back(make_unit("a", LandType::dry_flat, 1.0, 1.0, {{0, 0}}));
    units.push_back(make_unit("b", LandType::dry_flat, 1.0, 1.0, {{0, 1}}));
    units.push_back(make_unit("c", LandType::dry_flat, 1.0, 1.0, {{1, 2}}));
    const auto w = build_adjacency(units);
    CHECK(w.adjacent(0, 1));
    CHECK(w.adjacent(1, 0));
    CHECK(!w.adjacent(0, 2)); // (0,0) vs (1,2)
    CHECK(!w.adjacent(1, 2)); // (0,1) vs (1,2) is diagonal
    for (int i = 0; i < 3; ++i) CHECK(!w.adjacent(i, i));
}

TEST_CASE("overlapping cell sets are rejected") {
    std::vector<LandUnit> units;
    units.push_back(make_unit("a", LandType::dry_flat, 1.0, 1.0, {{0, 0}}));
    units.push_back(make_unit("b", LandType::dry_flat, 1.0, 1.0, {{0, 0}}));
    CHECK_THROWS_AS(build_adjacency(units), std::invalid_argument);
}

TEST_CASE("adjacency matches the brute-force all-pairs cell scan") {
    Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<LandUnit> units;
        const int n = rng.uniform_int(2, 10);
        std::vector<GridCell> taken;
        for (int u = 0; u < n; ++u) {
            std::vector<GridCell> cells;
            const int m = rng.uniform_int(1, 4);
            for (int k = 0; k < m; ++k) {
                GridCell cell{rng.uniform_int(0, 7), rng.uniform_int(0, 7)};
                bool clash = false;
                for (const auto& c : taken) clash = clash || c == cell;
                for (const auto& c : cells) clash = clash || c == cell;
                if (!clash) cells.push_back(cell);
            }
            if (cells.empty()) cells.push_back({10 + u, 20}); // isolated fallback
            for (const auto& c : cells) taken.push_back(c);
            units.push_back(make_unit("u" + std::to_string(u), LandType::dry_flat, 1.0, 1.0,
                                      std::move(cells)));
        }
        const auto w = build_adjacency(units);
        const auto oracle = adjacency_bruteforce(units);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                CHECK(static_cast<int>(w.adjacent(i, j)) ==
                      static_cast<int>(oracle[static_cast<std::size_t>(i) * n + j]));
    }
}

TEST_CASE("adjacency is permutation-equivariant") {
    Rng rng(99);
    auto in = tiny_instance();
    auto units = in.units;
    const auto w = build_adjacency(units);
    // Reverse the unit order and compare permuted entries.
    std::vector<LandUnit> reversed(units.rbegin(), units.rend());
    const auto wr = build_adjacency(reversed);
    const int n = static_cast<int>(units.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            CHECK(w.adjacent(i, j) == wr.adjacent(n - 1 - i, n - 1 - j));
}

TEST_CASE("feasible_crops filters by land type") {
    auto in = tiny_instance();
    const auto dry = feasible_crops(in.units[0], in.crops);
    CHECK(dry == std::vector<std::string>{"wheat", "soybean"}); // cabbage needs irrigation
    const auto irr = feasible_crops(in.units[2], in.crops);
    CHECK(irr == std::vector<std::string>{"wheat", "soybean", "cabbage"});
}

TEST_CASE("fungus on a smart greenhouse is feasible") {
    std::vector<Crop> crops = {make_crop("shiitake", CropCategory::fungus, 1500, 10, 14000, 60, 1,
                                         {LandType::greenhouse, LandType::smart_greenhouse})};
    const auto unit = make_unit("g", LandType::smart_greenhouse, 3.0, 1.0, {{0, 0}});
    CHECK(feasible_crops(unit, crops) == std::vector<std::string>{"shiitake"});
}

TEST_CASE("admissible_actions enforces the area bound") {
    auto in = tiny_instance();
    in.crops[0].area_per_planting = 10.0; // wheat footprint exceeds u2 (8 mu)
    const auto actions = admissible_actions(in, 0);
    CHECK(actions[0] == std::vector<int>{0, 1}); // u1 has 10 mu, boundary included
    CHECK(actions[1] == std::vector<int>{1});    // u2 loses wheat
}

TEST_CASE("admissible actions nest inside feasible crops and match a re-derivation") {
    Rng rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const auto in = random_small_instance(rng);
        const auto actions = admissible_actions(in, 0);
        for (std::size_t u = 0; u < in.units.size(); ++u) {
            const auto feas = feasible_crop_indices(in, static_cast<int>(u));
            // Independent re-derivation from the raw tables.
            std::vector<int> expect;
            for (std::size_t c = 0; c < in.crops.size(); ++c) {
                const auto& allowed = in.crops[c].allowed_land_types;
                const bool fits_type =
                    std::find(allowed.begin(), allowed.end(), in.units[u].land_type) !=
                    allowed.end();
                const double area = in.crops[c].area_per_planting
                                        ? *in.crops[c].area_per_planting
                                        : in.units[u].area;
                if (fits_type && area <= in.units[u].area)
                    expect.push_back(static_cast<int>(c));
            }
            CHECK(actions[u] == expect);
            for (int c : actions[u])
                CHECK(std::find(feas.begin(), feas.end(), c) != feas.end());
        }
    }
}

TEST_CASE("capacity violations: empty plan, in-capacity plan, adversarial override") {
    auto in = tiny_instance();
    Plan plan(3, in.horizon);
    CHECK(capacity_violation(plan, in, 0).empty());

    plan.set(0, 0, 0);
    CHECK(capacity_violation(plan, in, 0).empty());

    in.crops[0].area_per_planting = 11.0; // bigger than u1's 10 mu
    CHECK(capacity_violation(plan, in, 0) == std::vector<int>{0});
}

TEST_CASE("water accounting covers only irrigated units") {
    auto in = tiny_instance();
    Plan plan(3, in.horizon);
    plan.set(0, 0, 0); // dry unit planting draws no regional water
    CHECK(!water_violation(plan, in, 0));

    in.water_limits[0] = 0.0;
    plan.set(2, 0, 1); // soybean (80 m3) on the irrigated unit
    auto excess = water_violation(plan, in, 0);
    REQUIRE(excess);
    CHECK(*excess == doctest::Approx(80.0));
}

TEST_CASE("water usage near the limit matches an independent summation") {
    Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const auto in = random_small_instance(rng);
        Plan plan(static_cast<int>(in.units.size()), in.horizon);
        const auto actions = admissible_actions(in, 0);
        for (int u = 0; u < plan.num_units; ++u)
            for (int t = 0; t < plan.horizon; ++t)
                if (!actions[static_cast<std::size_t>(u)].empty() && rng.bernoulli(0.7))
                    plan.set(u, t, actions[static_cast<std::size_t>(u)][rng.next_below(
                                       actions[static_cast<std::size_t>(u)].size())]);
        for (int t = 0; t < plan.horizon; ++t) {
            double used = 0.0;
            for (int u = 0; u < plan.num_units; ++u)
                if (in.units[static_cast<std::size_t>(u)].irrigated_flag && plan.planted(u, t))
                    used += in.crops[static_cast<std::size_t>(plan.at(u, t))].water_need;
            const auto excess = water_violation(plan, in, t);
            const double limit = in.water_limits[static_cast<std::size_t>(t)];
            if (used > limit) {
                REQUIRE(excess);
                CHECK(*excess == doctest::Approx(used - limit));
            } else {
                CHECK(!excess);
            }
        }
    }
}
