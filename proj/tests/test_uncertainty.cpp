#include "doctest.h"

#include "support/test_support.hpp"

#include <numeric>
#include <stdexcept>

using namespace mlrcpf;
using namespace mlrcpf_test;

namespace {

// Four scenarios on a line at coordinates 0,1,2,3 (L1 ground distance equals
// coordinate gap), uniform weights. Hand-solved transportation optima:
//   rho 0.00 -> 6.50 (empirical),  rho 0.10 -> 5.70,  rho 0.25 -> 4.50,
//   rho 0.50 -> 3.50,  rho 0.75 -> 2.75,  rho >= 1 -> 2.00 (all mass on min).
struct LineCase {
    std::vector<double> values{10.0, 2.0, 6.0, 8.0};
    std::vector<double> weights{0.25, 0.25, 0.25, 0.25};
    std::vector<double> distances;
    LineCase() {
        const double x[4] = {0, 1, 2, 3};
        distances.assign(16, 0.0);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) distances[static_cast<std::size_t>(i) * 4 + j] = std::abs(x[i] - x[j]);
    }
};

void check_result_invariants(const WorstCaseResult& r, const std::vector<double>& values,
                             const std::vector<double>& weights, double rho) {
    double mass = 0.0;
    for (double q : r.worst_weights) {
        CHECK(q >= -1e-12);
        mass += q;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.transport_cost_used <= rho + 1e-9);
    const double vmin = *std::min_element(values.begin(), values.end());
    double empirical = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) empirical += weights[i] * values[i];
    CHECK(r.value >= vmin - 1e-9 * (1.0 + std::abs(vmin)));
    CHECK(r.value <= empirical + 1e-9 * (1.0 + std::abs(empirical)));
}

} // namespace

TEST_CASE("worst case on the frozen line example") {
    LineCase lc;
    const double expected[][2] = {{0.0, 6.5},  {0.1, 5.7}, {0.25, 4.5}, {0.5, 3.5},
                                  {0.75, 2.75}, {1.0, 2.0}, {1.5, 2.0},  {2.0, 2.0}};
    for (const auto& [rho, want] : expected) {
        const auto r = worst_case_expectation(lc.values, lc.weights, lc.distances, rho);
        CHECK(r.value == doctest::Approx(want).epsilon(1e-9));
        check_result_invariants(r, lc.values, lc.weights, rho);
    }
}

TEST_CASE("rho zero returns the empirical expectation exactly") {
    LineCase lc;
    const auto r = worst_case_expectation(lc.values, lc.weights, lc.distances, 0.0);
    CHECK(r.value == 6.5);
    CHECK(r.worst_weights == lc.weights);
    CHECK(r.transport_cost_used == 0.0);
}

TEST_CASE("large rho pushes all mass onto the worst scenario") {
    LineCase lc;
    const auto r = worst_case_expectation(lc.values, lc.weights, lc.distances, 10.0);
    CHECK(r.value == doctest::Approx(2.0));
    CHECK(r.worst_weights[1] == doctest::Approx(1.0));
}

TEST_CASE("zero-distance duplicate scenarios are handled") {
    const std::vector<double> values{5.0, 5.0, 1.0};
    const std::vector<double> weights{0.5, 0.3, 0.2};
    std::vector<double> d(9, 0.0);
    d[2] = d[6] = 4.0; // scenario 3 sits 4 away from the coincident pair
    d[5] = d[7] = 4.0;
    const auto r = worst_case_expectation(values, weights, d, 0.4);
    CHECK(r.value == doctest::Approx(3.8).epsilon(1e-9));
    check_result_invariants(r, values, weights, 0.4);
}

TEST_CASE("invalid inputs are rejected") {
    LineCase lc;
    CHECK_THROWS_AS(worst_case_expectation(lc.values, lc.weights, lc.distances, -0.1),
                    std::invalid_argument);
    auto bad = lc.distances;
    bad[1] = -1.0;
    CHECK_THROWS_AS(worst_case_expectation(lc.values, lc.weights, bad, 0.1),
                    std::invalid_argument);
    bad = lc.distances;
    bad[0] = 0.5; // diagonal
    CHECK_THROWS_AS(worst_case_expectation(lc.values, lc.weights, bad, 0.1),
                    std::invalid_argument);
    bad = lc.distances;
    bad[1] = bad[4] + 1.0; // asymmetric
    CHECK_THROWS_AS(worst_case_expectation(lc.values, lc.weights, bad, 0.1),
                    std::invalid_argument);
    auto nanv = lc.values;
    nanv[2] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(worst_case_expectation(nanv, lc.weights, lc.distances, 0.1),
                    std::invalid_argument);
}

TEST_CASE("solver matches the exhaustive transport oracle on random problems") {
    Rng rng(314159);
    for (int trial = 0; trial < 80; ++trial) {
        const int n = rng.uniform_int(3, 6);
        const auto d = random_l1_metric(rng, n);
        auto weights = random_simplex_weights(rng, n);
        if (trial % 7 == 0) { // exercise zero-weight sources
            weights[0] = 0.0;
            double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
            for (auto& w : weights) w /= sum;
        }
        std::vector<double> values(static_cast<std::size_t>(n));
        for (auto& v : values) v = rng.uniform(-10.0, 10.0);
        double dmax = 0.0;
        for (double x : d) dmax = std::max(dmax, x);
        const double rho = rng.uniform(0.0, 1.2 * dmax);

        const auto got = worst_case_expectation(values, weights, d, rho);
        const double want = worst_case_oracle(values, weights, d, rho);
        CHECK(got.value ==
              doctest::Approx(want).epsilon(1e-6));
        check_result_invariants(got, values, weights, rho);
    }
}

TEST_CASE("worst-case value is non-increasing in rho") {
    Rng rng(777);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = rng.uniform_int(3, 6);
        const auto d = random_l1_metric(rng, n);
        const auto weights = random_simplex_weights(rng, n);
        std::vector<double> values(static_cast<std::size_t>(n));
        for (auto& v : values) v = rng.uniform(-5.0, 15.0);
        WorstCaseSolver solver(weights, d);
        double prev = std::numeric_limits<double>::infinity();
        for (double rho = 0.0; rho <= 2.001; rho += 0.05) {
            const double v = solver.evaluate(values, rho).value;
            CHECK(v <= prev + 1e-9);
            prev = v;
        }
    }
}

TEST_CASE("scenario generation: nominal degenerate case") {
    const auto in = tiny_instance();
    ScenarioGenSpec spec;
    spec.yield_radius = spec.price_radius = spec.cost_radius = 0.0;
    spec.demand_growth_min = spec.demand_growth_max = 0.0;
    spec.count = 1;
    const auto set = generate_scenarios(in, spec, 9);
    REQUIRE(set.scenarios.size() == 1);
    const auto& s = set.scenarios[0];
    CHECK(s.weight == 1.0);
    for (int c = 0; c < 3; ++c)
        for (int t = 0; t < in.horizon; ++t) {
            CHECK(s.yf(c, t) == 1.0);
            CHECK(s.pr(c, t) == in.crops[static_cast<std::size_t>(c)].baseline_price);
            CHECK(s.co(c, t) == in.crops[static_cast<std::size_t>(c)].baseline_cost);
        }
}

TEST_CASE("yield factors stay inside the +-10% band") {
    const auto in = tiny_instance();
    ScenarioGenSpec spec;
    spec.count = 50;
    const auto set = generate_scenarios(in, spec, 4);
    for (const auto& s : set.scenarios)
        for (double f : s.yield_factor) {
            CHECK(f >= 0.9);
            CHECK(f <= 1.1);
        }
}

TEST_CASE("identical seeds give bit-identical scenario sets") {
    const auto in = tiny_instance();
    ScenarioGenSpec spec;
    spec.count = 20;
    const auto a = generate_scenarios(in, spec, 42);
    const auto b = generate_scenarios(in, spec, 42);
    REQUIRE(a.scenarios.size() == b.scenarios.size());
    for (std::size_t i = 0; i < a.scenarios.size(); ++i) {
        CHECK(a.scenarios[i].yield_factor == b.scenarios[i].yield_factor);
        CHECK(a.scenarios[i].price == b.scenarios[i].price);
        CHECK(a.scenarios[i].cost == b.scenarios[i].cost);
        CHECK(a.scenarios[i].demand == b.scenarios[i].demand);
    }
    const auto c = generate_scenarios(in, spec, 43);
    CHECK(a.scenarios[0].yield_factor != c.scenarios[0].yield_factor);
}

TEST_CASE("yield factor sample mean converges to 1") {
    const auto in = tiny_instance();
    ScenarioGenSpec spec;
    spec.count = 400;
    const auto set = generate_scenarios(in, spec, 7);
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : set.scenarios) {
        for (double f : s.yield_factor) sum += f;
        n += s.yield_factor.size();
    }
    const double mean = sum / static_cast<double>(n);
    const double se = (0.1 / std::sqrt(3.0)) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean - 1.0) <= 3.0 * se);
}

TEST_CASE("invalid generation parameters are rejected") {
    const auto in = tiny_instance();
    ScenarioGenSpec spec;
    spec.yield_radius = 1.0;
    CHECK_THROWS_AS(generate_scenarios(in, spec, 1), std::invalid_argument);
    spec = {};
    spec.count = 0;
    CHECK_THROWS_AS(generate_scenarios(in, spec, 1), std::invalid_argument);
    spec = {};
    spec.demand_growth_min = 0.2;
    spec.demand_growth_max = 0.1;
    CHECK_THROWS_AS(generate_scenarios(in, spec, 1), std::invalid_argument);
}

TEST_CASE("scenario weights must sum to one") {
    auto set = ScenarioSet::nominal(tiny_instance());
    set.scenarios[0].weight = 0.5;
    CHECK_THROWS_AS(set.check(3, 2), std::invalid_argument);
}

TEST_CASE("empty plan earns zero revenue") {
    const auto in = tiny_instance();
    const auto w = build_adjacency(in.units);
    Plan plan(3, in.horizon);
    const auto tr = build_trajectory(plan, in, w);
    const auto set = ScenarioSet::nominal(in);
    const auto r = scenario_revenue(plan, set.scenarios[0], in, tr);
    for (double x : r) CHECK(x == 0.0);
}

TEST_CASE("revenue without the demand cap follows price*yield - cost*area") {
    auto in = tiny_instance(1);
    in.interaction_yield_gain = 0.0;
    const auto w = build_adjacency(in.units);
    Plan plan(3, 1);
    plan.set(0, 0, 0); // wheat on u1: 2.4 * 500 * 10 - 450 * 10 = 7500
    const auto tr = build_trajectory(plan, in, w);
    const auto set = ScenarioSet::nominal(in);
    const auto r = scenario_revenue(plan, set.scenarios[0], in, tr);
    CHECK(r[0] == doctest::Approx(7500.0));
}

TEST_CASE("binding demand with salvage matches the hand tally") {
    auto in = tiny_instance(1);
    in.interaction_yield_gain = 0.0;
    in.demand_cap_enabled = true;
    in.salvage_fraction = 0.5;
    const auto w = build_adjacency(in.units);
    Plan plan(3, 1);
    plan.set(0, 0, 0); // wheat on u1: 5000 kg produced
    plan.set(1, 0, 0); // wheat on u2: 4000 kg produced
    const auto tr = build_trajectory(plan, in, w);
    auto set = ScenarioSet::nominal(in);
    auto& s = set.scenarios[0];
    s.demand[0 * in.horizon + 0] = 6000.0; // wheat demand for the period
    // u1 sells 5000, u2 sells 1000, surplus 3000 at half price:
    // 2.4*6000 + 1.2*3000 - 450*18 = 9900
    const auto r = scenario_revenue(plan, s, in, tr);
    CHECK(r[0] == doctest::Approx(9900.0));
}

TEST_CASE("interaction modifier scales yield and is clamped") {
    auto in = tiny_instance(1);
    const auto w = build_adjacency(in.units);
    Plan plan(3, 1);
    plan.set(0, 0, 0); // wheat next to soybean, M = 0.3
    plan.set(1, 0, 1);
    auto tr = build_trajectory(plan, in, w);
    auto set = ScenarioSet::nominal(in);
    auto r = scenario_revenue(plan, set.scenarios[0], in, tr);
    const double wheat = 2.4 * 500 * 10 * (1.0 + 0.05 * 0.3) - 450 * 10;
    const double soy = 5.6 * 180 * 8 * (1.0 + 0.05 * 0.3) - 380 * 8;
    CHECK(r[0] == doctest::Approx(wheat + soy));

    in.interaction.at(0, 1) = 20.0; // clamp band is +-0.5
    in.interaction.at(1, 0) = 20.0;
    tr = build_trajectory(plan, in, w);
    r = scenario_revenue(plan, set.scenarios[0], in, tr);
    const double wheat_clamped = 2.4 * 500 * 10 * (1.0 + 0.05 * kEtaClamp) - 450 * 10;
    const double soy_clamped = 5.6 * 180 * 8 * (1.0 + 0.05 * kEtaClamp) - 380 * 8;
    CHECK(r[0] == doctest::Approx(wheat_clamped + soy_clamped));
}

TEST_CASE("ground distance is a metric on generated scenarios") {
    const auto in = tiny_instance();
    ScenarioGenSpec gen;
    gen.count = 12;
    const auto set = generate_scenarios(in, gen, 21);
    const auto spec = AmbiguitySpec::defaults(in, 0.1);
    Rng rng(3);
    for (int trial = 0; trial < 60; ++trial) {
        const auto& a = set.scenarios[rng.next_below(set.scenarios.size())];
        const auto& b = set.scenarios[rng.next_below(set.scenarios.size())];
        const auto& c = set.scenarios[rng.next_below(set.scenarios.size())];
        CHECK(ground_distance(a, a, spec) == 0.0);
        CHECK(ground_distance(a, b, spec) == doctest::Approx(ground_distance(b, a, spec)));
        CHECK(ground_distance(a, c, spec) <=
              ground_distance(a, b, spec) + ground_distance(b, c, spec) + 1e-12);
    }
}

TEST_CASE("ground distance rejects mismatched dimensions") {
    const auto in = tiny_instance();
    const auto spec = AmbiguitySpec::defaults(in, 0.1);
    auto set = ScenarioSet::nominal(in);
    auto other = set.scenarios[0];
    other.yield_factor.pop_back();
    CHECK_THROWS_AS(ground_distance(set.scenarios[0], other, spec), std::invalid_argument);
}

TEST_CASE("robust value reduces to the deterministic profit on a nominal-only set") {
    const auto in = tiny_instance();
    const auto w = build_adjacency(in.units);
    Plan plan(3, in.horizon);
    plan.set(0, 0, 0);
    plan.set(0, 1, 1);
    const auto tr = build_trajectory(plan, in, w);
    const auto set = ScenarioSet::nominal(in);
    const auto totals = scenario_totals(plan, in, tr, set);
    const auto r = robust_value(plan, in, tr, set, 0.0);
    CHECK(r.value == doctest::Approx(totals[0]));
    const auto r2 = robust_value(plan, in, tr, set, 0.3);
    CHECK(r2.value == doctest::Approx(totals[0])); // single support point
}

TEST_CASE("robust value agrees with the exhaustive oracle on a tiny instance") {
    const auto in = tiny_instance();
    const auto w = build_adjacency(in.units);
    Plan plan(3, in.horizon);
    plan.set(0, 0, 0);
    plan.set(1, 0, 1);
    plan.set(2, 0, 2);
    plan.set(0, 1, 1);
    const auto tr = build_trajectory(plan, in, w);
    ScenarioGenSpec gen;
    gen.count = 5;
    const auto set = generate_scenarios(in, gen, 31);
    const auto spec = AmbiguitySpec::defaults(in, 0.0);
    const auto d = distance_matrix(set, spec);
    const auto totals = scenario_totals(plan, in, tr, set);
    for (double rho : {0.0, 0.01, 0.05, 0.1, 0.5}) {
        const auto got = robust_value(plan, in, tr, set, rho);
        const double want = worst_case_oracle(totals, set.weights(), d, rho);
        CHECK(got.value == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("scenario feasibility: water scaling and dry plans") {
    const auto in = tiny_instance();
    Plan dry(3, in.horizon);
    dry.set(0, 0, 0); // dry unit only
    auto set = ScenarioSet::nominal(in);
    CHECK(scenario_feasible(dry, set.scenarios[0], in));

    Plan irr(3, in.horizon);
    irr.set(2, 0, 2); // cabbage on irrigated unit, 220 m3 of 500
    CHECK(scenario_feasible(irr, set.scenarios[0], in));
    auto shrunk = set.scenarios[0];
    shrunk.water_limit_factor = 0.2; // limit 100 < 220
    CHECK(!scenario_feasible(irr, shrunk, in));
}
