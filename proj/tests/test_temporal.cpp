#include "doctest.h"

#include "support/test_support.hpp"

using namespace mlrcpf;
using namespace mlrcpf_test;

namespace {

Plan random_plan(const PlanningInstance& in, Rng& rng, double plant_prob = 0.7) {
    Plan plan(static_cast<int>(in.units.size()), in.horizon);
    const auto actions = admissible_actions(in, 0);
    for (int u = 0; u < plan.num_units; ++u)
        for (int t = 0; t < plan.horizon; ++t)
            if (!actions[static_cast<std::size_t>(u)].empty() && rng.bernoulli(plant_prob))
                plan.set(u, t, actions[static_cast<std::size_t>(u)][rng.next_below(
                                   actions[static_cast<std::size_t>(u)].size())]);
    return plan;
}

} // namespace

TEST_CASE("initial states are zeroed, optionally seeded from history") {
    auto in = tiny_instance();
    auto states = initial_states(in);
    REQUIRE(states.size() == 3);
    for (const auto& s : states) {
        CHECK(!s.last_crop);
        CHECK(s.rotation_stress == 0.0);
        CHECK(s.interaction_potential == 0.0);
    }
    in.planting_history["u1"] = "wheat";
    states = initial_states(in);
    CHECK(states[0].last_crop == in.crop_index("wheat"));
    CHECK(states[0].rotation_stress == 0.0);
}

TEST_CASE("rotation stress update branches") {
    const auto in = tiny_instance();
    AgronomicState s;
    s.last_crop = 0; // wheat
    s.rotation_stress = 0.0;
    CHECK(rotation_stress_update(s, 0, in.crops) == 1.0); // cereal after cereal

    s.rotation_stress = 3.0;
    CHECK(rotation_stress_update(s, 1, in.crops) == 1.0); // legume relieves 2

    s.rotation_stress = 0.0;
    CHECK(rotation_stress_update(s, std::nullopt, in.crops) == 0.0); // fallow, floored

    s.rotation_stress = 2.0;
    s.last_crop = 1;                                      // soybean
    CHECK(rotation_stress_update(s, 1, in.crops) == 3.0); // legume after legume repeats category
    CHECK(rotation_stress_update(s, 2, in.crops) == 2.0); // unrelated category is neutral
}

TEST_CASE("interaction potential: isolated unit, single pair, brute-force equality") {
    auto in = tiny_instance();
    const auto w = build_adjacency(in.units);
    Plan plan(3, in.horizon);

    plan.set(2, 0, 2); // u3 has no neighbors
    CHECK(interaction_potential(2, 0, plan, w, in.interaction) == 0.0);

    in.interaction.at(0, 1) = 0.1;
    in.interaction.at(1, 0) = 0.1;
    plan.set(0, 0, 0); // wheat on u1
    plan.set(1, 0, 1); // soybean on u2, adjacent
    CHECK(interaction_potential(0, 0, plan, w, in.interaction) == doctest::Approx(0.1));

    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        auto rin = random_small_instance(rng);
        const auto rw = build_adjacency(rin.units);
        const auto rplan = random_plan(rin, rng);
        for (int u = 0; u < rplan.num_units; ++u)
            for (int t = 0; t < rplan.horizon; ++t)
                CHECK(interaction_potential(u, t, rplan, rw, rin.interaction) ==
                      doctest::Approx(eta_quadruple_sum(u, t, rplan, rw, rin.interaction))
                          .epsilon(1e-12));
    }
}

TEST_CASE("zero interaction matrix forces eta to zero everywhere") {
    Rng rng(17);
    auto in = random_small_instance(rng);
    in.interaction = InteractionMatrix::zero(static_cast<int>(in.crops.size()));
    const auto w = build_adjacency(in.units);
    const auto plan = random_plan(in, rng);
    const auto tr = build_trajectory(plan, in, w);
    for (int u = 0; u < plan.num_units; ++u)
        for (int t = 0; t <= plan.horizon; ++t)
            CHECK(tr.at(u, t).interaction_potential == 0.0);
}

TEST_CASE("mutual sole neighbors see symmetric interaction entries") {
    PlanningInstance in = tiny_instance();
    in.units.resize(2); // u1, u2 adjacent and alone
    in.interaction.at(0, 1) = 0.25;
    in.interaction.at(1, 0) = 0.25;
    const auto w = build_adjacency(in.units);
    Plan plan(2, in.horizon);
    plan.set(0, 0, 0);
    plan.set(1, 0, 1);
    CHECK(interaction_potential(0, 0, plan, w, in.interaction) == doctest::Approx(0.25));
    CHECK(interaction_potential(1, 0, plan, w, in.interaction) == doctest::Approx(0.25));
}

TEST_CASE("all-fallow transition decays stress, keeps last crop, zeroes eta") {
    auto in = tiny_instance();
    in.planting_history["u1"] = "wheat";
    const auto w = build_adjacency(in.units);
    Plan plan(3, in.horizon); // empty
    auto states = initial_states(in);
    states[0].rotation_stress = 2.0;
    const auto next = transition(states, plan, 0, w, in);
    CHECK(next[0].last_crop == in.crop_index("wheat"));
    CHECK(next[0].rotation_stress == 1.0);
    CHECK(next[1].rotation_stress == 0.0);
    for (const auto& s : next) CHECK(s.interaction_potential == 0.0);
}

TEST_CASE("transition is deterministic and matches the straight-line recomputation") {
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        auto in = random_small_instance(rng);
        if (!in.units.empty() && rng.bernoulli(0.5))
            in.planting_history[in.units[0].id] = in.crops[0].id;
        const auto w = build_adjacency(in.units);
        const auto plan = random_plan(in, rng);
        const auto tr = build_trajectory(plan, in, w);
        const auto tr2 = build_trajectory(plan, in, w);
        const auto oracle = trajectory_bruteforce(plan, in, w);
        for (int u = 0; u < plan.num_units; ++u)
            for (int t = 0; t <= plan.horizon; ++t) {
                const auto& got = tr.at(u, t);
                const auto& ref =
                    oracle[static_cast<std::size_t>(u) * (plan.horizon + 1) + t];
                CHECK(got.last_crop == ref.last_crop);
                CHECK(got.rotation_stress == doctest::Approx(ref.rotation_stress));
                CHECK(got.interaction_potential ==
                      doctest::Approx(ref.interaction_potential).epsilon(1e-12));
                CHECK(got.rotation_stress >= 0.0);
                // determinism
                CHECK(got.last_crop == tr2.at(u, t).last_crop);
                CHECK(got.rotation_stress == tr2.at(u, t).rotation_stress);
                CHECK(got.interaction_potential == tr2.at(u, t).interaction_potential);
            }
    }
}

TEST_CASE("rotation legality: premature repetition within tau") {
    auto in = tiny_instance(3);
    Plan plan(3, 3);
    plan.set(0, 0, 0); // wheat, tau = 2
    plan.set(0, 1, 0); // repeat after delta = 1 < 2
    auto violations = rotation_legal(plan, in);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].unit == 0);
    CHECK(violations[0].period == 1);
    CHECK(violations[0].crop == 0);

    plan.set(0, 1, Plan::kFallow);
    plan.set(0, 2, 0); // delta = 2 == tau: legal
    CHECK(rotation_legal(plan, in).empty());
}

TEST_CASE("rotation legality counts every offending pair") {
    auto in = tiny_instance(3);
    in.crops[0].replant_interval = 3;
    Plan plan(3, 3);
    plan.set(1, 0, 0);
    plan.set(1, 1, 0);
    plan.set(1, 2, 0);
    // pairs (0,1), (0,2), (1,2) all violate tau = 3
    CHECK(rotation_legal(plan, in).size() == 3);
}
