#include "mlrcpf/uncertainty.hpp"

#include "mlrcpf/rng.hpp"
#include "mlrcpf/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace mlrcpf {

namespace {

// Demand anchor for generated scenarios: a share of the nominal production
// capacity of the land that can host the crop.
double base_demand(const PlanningInstance& instance, int crop) {
    const auto& c = instance.crops[static_cast<std::size_t>(crop)];
    double suitable_area = 0.0;
    for (const auto& u : instance.units) {
        if (std::find(c.allowed_land_types.begin(), c.allowed_land_types.end(), u.land_type) !=
            c.allowed_land_types.end())
            suitable_area += u.area;
    }
    return 0.6 * c.baseline_yield * suitable_area;
}

} // namespace

std::vector<double> ScenarioSet::weights() const {
    std::vector<double> w;
    w.reserve(scenarios.size());
    for (const auto& s : scenarios) w.push_back(s.weight);
    return w;
}

void ScenarioSet::check(int num_crops, int horizon) const {
    if (scenarios.empty()) throw std::invalid_argument("scenario set is empty");
    double sum = 0.0;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const auto& s = scenarios[i];
        if (s.num_crops != num_crops || s.horizon != horizon)
            throw std::invalid_argument("scenario " + std::to_string(i) +
                                        " has mismatched dimensions");
        if (s.weight < 0.0)
            throw std::invalid_argument("scenario " + std::to_string(i) +
                                        " has negative weight");
        for (double f : s.yield_factor)
            if (!(f > 0.0))
                throw std::invalid_argument("scenario " + std::to_string(i) +
                                            " has non-positive yield factor");
        if (!(s.water_limit_factor > 0.0))
            throw std::invalid_argument("scenario " + std::to_string(i) +
                                        " has non-positive water limit factor");
        sum += s.weight;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("scenario weights sum to " + std::to_string(sum));
}

ScenarioSet ScenarioSet::nominal(const PlanningInstance& instance) {
    const int nc = static_cast<int>(instance.crops.size());
    const int t = instance.horizon;
    Scenario s;
    s.num_crops = nc;
    s.horizon = t;
    s.weight = 1.0;
    s.yield_factor.assign(static_cast<std::size_t>(nc) * t, 1.0);
    s.price.resize(static_cast<std::size_t>(nc) * t);
    s.cost.resize(static_cast<std::size_t>(nc) * t);
    s.demand.resize(static_cast<std::size_t>(nc) * t);
    for (int c = 0; c < nc; ++c) {
        const auto& crop = instance.crops[static_cast<std::size_t>(c)];
        const double d0 = base_demand(instance, c);
        for (int p = 0; p < t; ++p) {
            s.price[static_cast<std::size_t>(c) * t + p] = crop.baseline_price;
            s.cost[static_cast<std::size_t>(c) * t + p] = crop.baseline_cost;
            s.demand[static_cast<std::size_t>(c) * t + p] = d0;
        }
    }
    ScenarioSet set;
    set.scenarios.push_back(std::move(s));
    set.seed = 0;
    return set;
}

ScenarioSet generate_scenarios(const PlanningInstance& instance, const ScenarioGenSpec& spec,
                               std::uint64_t seed) {
    auto radius_ok = [](double r) { return r >= 0.0 && r < 1.0; };
    if (!radius_ok(spec.yield_radius) || !radius_ok(spec.price_radius) ||
        !radius_ok(spec.cost_radius))
        throw std::invalid_argument("perturbation radii must lie in [0, 1)");
    if (spec.demand_growth_min < 0.0 || spec.demand_growth_max < spec.demand_growth_min)
        throw std::invalid_argument("demand growth range must satisfy 0 <= min <= max");
    if (spec.count < 1) throw std::invalid_argument("scenario count must be >= 1");

    const int nc = static_cast<int>(instance.crops.size());
    const int t = instance.horizon;
    std::vector<double> d0(static_cast<std::size_t>(nc));
    for (int c = 0; c < nc; ++c) d0[static_cast<std::size_t>(c)] = base_demand(instance, c);

    Rng rng(derive_seed(seed, 0x5ce0));
    ScenarioSet set;
    set.seed = seed;
    set.scenarios.reserve(static_cast<std::size_t>(spec.count));
    for (int k = 0; k < spec.count; ++k) {
        Scenario s;
        s.num_crops = nc;
        s.horizon = t;
        s.weight = 1.0 / spec.count;
        s.yield_factor.resize(static_cast<std::size_t>(nc) * t);
        s.price.resize(static_cast<std::size_t>(nc) * t);
        s.cost.resize(static_cast<std::size_t>(nc) * t);
        s.demand.resize(static_cast<std::size_t>(nc) * t);
        for (int c = 0; c < nc; ++c)
            for (int p = 0; p < t; ++p)
                s.yield_factor[static_cast<std::size_t>(c) * t + p] =
                    rng.uniform(1.0 - spec.yield_radius, 1.0 + spec.yield_radius);
        for (int c = 0; c < nc; ++c) {
            const double nominal = instance.crops[static_cast<std::size_t>(c)].baseline_price;
            for (int p = 0; p < t; ++p)
                s.price[static_cast<std::size_t>(c) * t + p] =
                    nominal * rng.uniform(1.0 - spec.price_radius, 1.0 + spec.price_radius);
        }
        for (int c = 0; c < nc; ++c) {
            const double nominal = instance.crops[static_cast<std::size_t>(c)].baseline_cost;
            for (int p = 0; p < t; ++p)
                s.cost[static_cast<std::size_t>(c) * t + p] =
                    nominal * rng.uniform(1.0 - spec.cost_radius, 1.0 + spec.cost_radius);
        }
        for (int c = 0; c < nc; ++c) {
            const bool staple =
                instance.crops[static_cast<std::size_t>(c)].category == CropCategory::cereal;
            const double growth =
                staple ? rng.uniform(spec.demand_growth_min, spec.demand_growth_max) : 0.0;
            for (int p = 0; p < t; ++p) {
                const int year = p / 2;
                s.demand[static_cast<std::size_t>(c) * t + p] =
                    d0[static_cast<std::size_t>(c)] * std::pow(1.0 + growth, year);
            }
        }
        set.scenarios.push_back(std::move(s));
    }
    return set;
}

AmbiguitySpec AmbiguitySpec::defaults(const PlanningInstance& instance, double rho) {
    AmbiguitySpec spec;
    spec.rho = rho;
    const int nc = static_cast<int>(instance.crops.size());
    const int t = instance.horizon;
    const double block = static_cast<double>(nc) * t;
    spec.yield_scale.assign(static_cast<std::size_t>(nc) * t, block);
    spec.price_scale.resize(static_cast<std::size_t>(nc) * t);
    spec.cost_scale.resize(static_cast<std::size_t>(nc) * t);
    for (int c = 0; c < nc; ++c) {
        const auto& crop = instance.crops[static_cast<std::size_t>(c)];
        for (int p = 0; p < t; ++p) {
            spec.price_scale[static_cast<std::size_t>(c) * t + p] =
                block * std::max(crop.baseline_price, 1e-12);
            spec.cost_scale[static_cast<std::size_t>(c) * t + p] =
                block * std::max(crop.baseline_cost, 1e-12);
        }
    }
    return spec;
}

double ground_distance(const Scenario& a, const Scenario& b, const AmbiguitySpec& spec) {
    const std::size_t dims = a.yield_factor.size();
    if (b.yield_factor.size() != dims || spec.yield_scale.size() != dims ||
        spec.price_scale.size() != dims || spec.cost_scale.size() != dims ||
        a.num_crops != b.num_crops || a.horizon != b.horizon)
        throw std::invalid_argument("ground_distance: mismatched scenario dimensions");
    double d = 0.0;
    for (std::size_t i = 0; i < dims; ++i)
        d += std::abs(a.yield_factor[i] - b.yield_factor[i]) / spec.yield_scale[i];
    for (std::size_t i = 0; i < dims; ++i)
        d += std::abs(a.price[i] - b.price[i]) / spec.price_scale[i];
    for (std::size_t i = 0; i < dims; ++i)
        d += std::abs(a.cost[i] - b.cost[i]) / spec.cost_scale[i];
    return d;
}

std::vector<double> distance_matrix(const ScenarioSet& set, const AmbiguitySpec& spec) {
    const int n = static_cast<int>(set.scenarios.size());
    std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = ground_distance(set.scenarios[static_cast<std::size_t>(i)],
                                             set.scenarios[static_cast<std::size_t>(j)], spec);
            d[static_cast<std::size_t>(i) * n + j] = v;
            d[static_cast<std::size_t>(j) * n + i] = v;
        }
    return d;
}

// ---------------------------------------------------------------------------
// Worst-case expectation over a finite-support Wasserstein ball.
//
// The transportation program
//     min_m  sum_{k,j} v_j m_{kj}
//     s.t.   sum_j m_{kj} = p_k,   m >= 0,   sum_{k,j} d_{kj} m_{kj} <= rho
// has the one-dimensional concave dual
//     max_{lambda >= 0}  -rho*lambda + sum_k p_k * min_j (v_j + lambda*d_kj).
// Each inner min is the lower envelope of |Omega| lines in lambda, so the dual
// objective is piecewise linear with derivative D(lambda) - rho, where
// D(lambda) = sum_k p_k * d_{k, j_k(lambda)} is non-increasing and piecewise
// constant. The optimum sits at the envelope breakpoint where D crosses rho.
// The sweep below walks breakpoints from lambda = +inf downward (D starts at
// zero there, so small radii terminate after few events) and then rebuilds the
// optimal mass transport at the crossing: every source ships to its tied
// minimizers, split so the budget is spent exactly.
// ---------------------------------------------------------------------------

WorstCaseSolver::WorstCaseSolver(std::vector<double> weights, std::vector<double> distances)
    : n_(static_cast<int>(weights.size())), weights_(std::move(weights)),
      distances_(std::move(distances)) {
    if (n_ == 0) throw std::invalid_argument("worst case: empty scenario set");
    if (distances_.size() != static_cast<std::size_t>(n_) * n_)
        throw std::invalid_argument("worst case: distance matrix size mismatch");
    for (int k = 0; k < n_; ++k) {
        if (weights_[static_cast<std::size_t>(k)] < 0.0)
            throw std::invalid_argument("worst case: negative scenario weight");
        if (distances_[static_cast<std::size_t>(k) * n_ + k] != 0.0)
            throw std::invalid_argument("worst case: distance diagonal must be zero");
        for (int j = 0; j < n_; ++j) {
            const double dkj = distances_[static_cast<std::size_t>(k) * n_ + j];
            const double djk = distances_[static_cast<std::size_t>(j) * n_ + k];
            if (dkj < 0.0 || !std::isfinite(dkj))
                throw std::invalid_argument("worst case: invalid distance entry");
            if (std::abs(dkj - djk) > 1e-9 * (1.0 + std::abs(dkj)))
                throw std::invalid_argument("worst case: distance matrix not symmetric");
        }
    }
    slope_order_.resize(static_cast<std::size_t>(n_) * n_);
    for (int k = 0; k < n_; ++k) {
        int* row = slope_order_.data() + static_cast<std::size_t>(k) * n_;
        std::iota(row, row + n_, 0);
        const double* dk = distances_.data() + static_cast<std::size_t>(k) * n_;
        std::sort(row, row + n_, [dk](int a, int b) {
            if (dk[a] != dk[b]) return dk[a] > dk[b];
            return a < b;
        });
    }
    piece_dest_.resize(static_cast<std::size_t>(n_) * n_);
    piece_from_.resize(static_cast<std::size_t>(n_) * n_);
    hull_begin_.resize(static_cast<std::size_t>(n_));
    hull_end_.resize(static_cast<std::size_t>(n_));
}

WorstCaseResult WorstCaseSolver::evaluate(const std::vector<double>& values, double rho) const {
    if (static_cast<int>(values.size()) != n_)
        throw std::invalid_argument("worst case: value vector size mismatch");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("worst case: non-finite value");
    if (rho < 0.0) throw std::invalid_argument("worst case: rho must be >= 0");

    double empirical = 0.0;
    for (int k = 0; k < n_; ++k) empirical += weights_[static_cast<std::size_t>(k)] * values[static_cast<std::size_t>(k)];
    if (rho == 0.0 || n_ == 1) return {empirical, weights_, 0.0};

    // Lower envelope of lines (slope d_kj, intercept v_j) per source, built in
    // descending slope order so each added line extends the hull to the right.
    for (int k = 0; k < n_; ++k) {
        const double* dk = distances_.data() + static_cast<std::size_t>(k) * n_;
        const int* order = slope_order_.data() + static_cast<std::size_t>(k) * n_;
        const int base = k * n_;
        int top = -1; // index into [base, base+top] of the hull stack
        for (int r = 0; r < n_; ++r) {
            const int j = order[r];
            const double s = dk[j];
            const double b = values[static_cast<std::size_t>(j)];
            double from = -std::numeric_limits<double>::infinity();
            bool keep = true;
            while (top >= 0) {
                const int jt = piece_dest_[static_cast<std::size_t>(base + top)];
                const double st = dk[jt];
                const double bt = values[static_cast<std::size_t>(jt)];
                if (s == st) {
                    if (b >= bt) { keep = false; break; }
                    --top;
                    continue;
                }
                const double x = (b - bt) / (st - s);
                if (x <= piece_from_[static_cast<std::size_t>(base + top)]) {
                    --top;
                    continue;
                }
                from = x;
                break;
            }
            if (!keep) continue;
            ++top;
            piece_dest_[static_cast<std::size_t>(base + top)] = j;
            piece_from_[static_cast<std::size_t>(base + top)] = from;
        }
        // Trim to lambda >= 0: the last piece starting at or before 0 becomes
        // the first piece.
        int first = 0;
        while (first < top && piece_from_[static_cast<std::size_t>(base + first + 1)] <= 0.0)
            ++first;
        piece_from_[static_cast<std::size_t>(base + first)] = 0.0;
        hull_begin_[static_cast<std::size_t>(k)] = base + first;
        hull_end_[static_cast<std::size_t>(k)] = base + top + 1;
    }

    // Descending sweep over breakpoints until the transport load D crosses rho.
    std::vector<int> active(static_cast<std::size_t>(n_));
    double load = 0.0;
    std::priority_queue<std::pair<double, int>> events;
    for (int k = 0; k < n_; ++k) {
        const int last = hull_end_[static_cast<std::size_t>(k)] - 1;
        active[static_cast<std::size_t>(k)] = last;
        load += weights_[static_cast<std::size_t>(k)] *
                distances_[static_cast<std::size_t>(k) * n_ +
                           piece_dest_[static_cast<std::size_t>(last)]];
        if (last > hull_begin_[static_cast<std::size_t>(k)])
            events.emplace(piece_from_[static_cast<std::size_t>(last)], k);
    }

    double lambda_star = 0.0;
    bool budget_tight = false;
    while (!events.empty()) {
        const auto [lambda, k] = events.top();
        events.pop();
        const int p = active[static_cast<std::size_t>(k)];
        const double* dk = distances_.data() + static_cast<std::size_t>(k) * n_;
        const double step =
            weights_[static_cast<std::size_t>(k)] *
            (dk[piece_dest_[static_cast<std::size_t>(p - 1)]] -
             dk[piece_dest_[static_cast<std::size_t>(p)]]);
        if (load + step > rho) {
            lambda_star = lambda;
            budget_tight = true;
            break;
        }
        load += step;
        active[static_cast<std::size_t>(k)] = p - 1;
        if (p - 1 > hull_begin_[static_cast<std::size_t>(k)])
            events.emplace(piece_from_[static_cast<std::size_t>(p - 1)], k);
    }

    // Rebuild the optimal transport at lambda*: each source may ship only to
    // minimizers of v_j + lambda* d_kj; when the budget binds it is spent
    // exactly (any such split attains the dual optimum).
    std::vector<double> q(static_cast<std::size_t>(n_), 0.0);
    std::vector<int> lo(static_cast<std::size_t>(n_)), hi(static_cast<std::size_t>(n_));
    double cost_floor = 0.0;
    for (int k = 0; k < n_; ++k) {
        const double* dk = distances_.data() + static_cast<std::size_t>(k) * n_;
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n_; ++j)
            best = std::min(best, values[static_cast<std::size_t>(j)] + lambda_star * dk[j]);
        const double tol = 1e-9 * (1.0 + std::abs(best));
        int jlo = -1, jhi = -1;
        for (int j = 0; j < n_; ++j) {
            if (values[static_cast<std::size_t>(j)] + lambda_star * dk[j] > best + tol) continue;
            if (jlo < 0 || dk[j] < dk[jlo]) jlo = j;
            if (jhi < 0 || dk[j] > dk[jhi]) jhi = j;
        }
        lo[static_cast<std::size_t>(k)] = jlo;
        hi[static_cast<std::size_t>(k)] = jhi;
        cost_floor += weights_[static_cast<std::size_t>(k)] * dk[jlo];
    }
    double budget = budget_tight ? std::max(0.0, rho - cost_floor) : 0.0;
    double cost_used = 0.0;
    for (int k = 0; k < n_; ++k) {
        const double* dk = distances_.data() + static_cast<std::size_t>(k) * n_;
        const double w = weights_[static_cast<std::size_t>(k)];
        const int jlo = lo[static_cast<std::size_t>(k)];
        const int jhi = hi[static_cast<std::size_t>(k)];
        const double span = dk[jhi] - dk[jlo];
        if (budget > 0.0 && span > 0.0) {
            const double spend = std::min(budget, w * span);
            const double moved = spend / span;
            q[static_cast<std::size_t>(jhi)] += moved;
            q[static_cast<std::size_t>(jlo)] += w - moved;
            cost_used += w * dk[jlo] + spend;
            budget -= spend;
        } else {
            q[static_cast<std::size_t>(jlo)] += w;
            cost_used += w * dk[jlo];
        }
    }
    double value = 0.0;
    for (int j = 0; j < n_; ++j) value += q[static_cast<std::size_t>(j)] * values[static_cast<std::size_t>(j)];
    return {value, std::move(q), cost_used};
}

WorstCaseResult worst_case_expectation(const std::vector<double>& values,
                                       const std::vector<double>& weights,
                                       const std::vector<double>& distances, double rho) {
    if (values.size() != weights.size())
        throw std::invalid_argument("worst case: values/weights size mismatch");
    return WorstCaseSolver(weights, distances).evaluate(values, rho);
}

WorstCaseResult worst_case_expectation(const std::vector<double>& values, const ScenarioSet& set,
                                       const std::vector<double>& distances, double rho) {
    return worst_case_expectation(values, set.weights(), distances, rho);
}

std::vector<double> scenario_revenue(const Plan& plan, const Scenario& scenario,
                                     const PlanningInstance& instance,
                                     const StateTrajectory& trajectory) {
    std::vector<double> revenue(static_cast<std::size_t>(plan.horizon), 0.0);
    std::vector<double> remaining;
    const double kappa = instance.interaction_yield_gain;
    for (int t = 0; t < plan.horizon; ++t) {
        if (instance.demand_cap_enabled) {
            remaining.resize(instance.crops.size());
            for (std::size_t c = 0; c < instance.crops.size(); ++c)
                remaining[c] = scenario.dm(static_cast<int>(c), t);
        }
        double rt = 0.0;
        for (int u = 0; u < plan.num_units; ++u) {
            const int c = plan.at(u, t);
            if (c == Plan::kFallow) continue;
            const auto& unit = instance.units[static_cast<std::size_t>(u)];
            const auto& crop = instance.crops[static_cast<std::size_t>(c)];
            const double area = instance.planting_area(u, c);
            const double eta = std::clamp(trajectory.interaction_for_period(u, t), -kEtaClamp,
                                          kEtaClamp);
            const double produced = scenario.yf(c, t) * unit.productivity_factor *
                                    crop.baseline_yield * (1.0 + kappa * eta) * area;
            const double price = scenario.pr(c, t);
            if (instance.demand_cap_enabled) {
                const double sold = std::min(produced, remaining[static_cast<std::size_t>(c)]);
                remaining[static_cast<std::size_t>(c)] -= sold;
                rt += price * sold + instance.salvage_fraction * price * (produced - sold);
            } else {
                rt += price * produced;
            }
            rt -= scenario.co(c, t) * area;
        }
        revenue[static_cast<std::size_t>(t)] = rt;
    }
    return revenue;
}

std::vector<double> scenario_totals(const Plan& plan, const PlanningInstance& instance,
                                    const StateTrajectory& trajectory, const ScenarioSet& set) {
    std::vector<double> totals;
    totals.reserve(set.scenarios.size());
    for (const auto& s : set.scenarios) {
        const auto per_period = scenario_revenue(plan, s, instance, trajectory);
        totals.push_back(std::accumulate(per_period.begin(), per_period.end(), 0.0));
    }
    return totals;
}

WorstCaseResult robust_value(const Plan& plan, const PlanningInstance& instance,
                             const StateTrajectory& trajectory, const ScenarioSet& set,
                             double rho) {
    const auto totals = scenario_totals(plan, instance, trajectory, set);
    const auto spec = AmbiguitySpec::defaults(instance, rho);
    return worst_case_expectation(totals, set, distance_matrix(set, spec), rho);
}

bool scenario_feasible(const Plan& plan, const Scenario& scenario,
                       const PlanningInstance& instance) {
    for (int t = 0; t < plan.horizon; ++t) {
        if (!capacity_violation(plan, instance, t).empty()) return false;
        if (water_violation(plan, instance, t, scenario.water_limit_factor)) return false;
    }
    if (instance.revenue_floor) {
        const auto w = build_adjacency(instance.units);
        const auto trajectory = build_trajectory(plan, instance, w);
        const auto per_period = scenario_revenue(plan, scenario, instance, trajectory);
        if (std::accumulate(per_period.begin(), per_period.end(), 0.0) < *instance.revenue_floor)
            return false;
    }
    return true;
}

} // namespace mlrcpf
