#include "mlrcpf/optimizer.hpp"

#include "mlrcpf/parallel.hpp"
#include "mlrcpf/rng.hpp"
#include "mlrcpf/spatial.hpp"
#include "mlrcpf/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mlrcpf {

namespace {

// Maximal runs of consecutive non-legume plantings of at least `window`
// periods on one unit, as (start, end) inclusive period indices.
std::vector<std::pair<int, int>> legume_window_breaches(const Plan& plan,
                                                        const PlanningInstance& in, int unit,
                                                        int window) {
    std::vector<std::pair<int, int>> runs;
    int run_start = -1;
    for (int t = 0; t <= plan.horizon; ++t) {
        const bool extends =
            t < plan.horizon && plan.planted(unit, t) &&
            in.crops[static_cast<std::size_t>(plan.at(unit, t))].category != CropCategory::legume;
        if (extends) {
            if (run_start < 0) run_start = t;
        } else {
            if (run_start >= 0 && t - run_start >= window) runs.emplace_back(run_start, t - 1);
            run_start = -1;
        }
    }
    return runs;
}

// Precomputed read-only evaluation tables shared by the solvers.
struct EvalContext {
    const PlanningInstance& in;
    const ScenarioSet& set;
    int num_units, num_crops, horizon, num_scenarios;
    std::vector<std::vector<int>> neighbors;
    std::vector<std::vector<int>> admissible;
    std::vector<char> adm_mask;    // num_units * num_crops
    std::vector<double> water_eff; // per period: limit * min scenario factor
    std::vector<double> weights;
    std::vector<double> distances; // num_scenarios^2 ground distances
    std::vector<double> area;      // num_units * num_crops
    std::vector<double> yield_qty; // num_units * num_crops: gamma * Ybar * area

    EvalContext(const PlanningInstance& instance, const ScenarioSet& scenarios)
        : in(instance), set(scenarios) {
        num_units = static_cast<int>(in.units.size());
        num_crops = static_cast<int>(in.crops.size());
        horizon = in.horizon;
        num_scenarios = static_cast<int>(set.scenarios.size());
        set.check(num_crops, horizon);

        neighbors = build_adjacency(in.units).neighbor_lists();
        admissible = admissible_actions(in, 0);
        adm_mask.assign(static_cast<std::size_t>(num_units) * num_crops, 0);
        for (int u = 0; u < num_units; ++u)
            for (int c : admissible[static_cast<std::size_t>(u)])
                adm_mask[static_cast<std::size_t>(u) * num_crops + c] = 1;

        double min_factor = std::numeric_limits<double>::infinity();
        for (const auto& s : set.scenarios) min_factor = std::min(min_factor, s.water_limit_factor);
        water_eff.resize(static_cast<std::size_t>(horizon));
        for (int t = 0; t < horizon; ++t)
            water_eff[static_cast<std::size_t>(t)] =
                in.water_limits[static_cast<std::size_t>(t)] * min_factor;

        weights = set.weights();
        distances = distance_matrix(set, AmbiguitySpec::defaults(in, 0.0));

        area.resize(static_cast<std::size_t>(num_units) * num_crops);
        yield_qty.resize(static_cast<std::size_t>(num_units) * num_crops);
        for (int u = 0; u < num_units; ++u)
            for (int c = 0; c < num_crops; ++c) {
                const double a = in.planting_area(u, c);
                area[static_cast<std::size_t>(u) * num_crops + c] = a;
                yield_qty[static_cast<std::size_t>(u) * num_crops + c] =
                    in.units[static_cast<std::size_t>(u)].productivity_factor *
                    in.crops[static_cast<std::size_t>(c)].baseline_yield * a;
            }
    }

    double water_need_of(int u, int c) const {
        return in.units[static_cast<std::size_t>(u)].irrigated_flag
                   ? in.crops[static_cast<std::size_t>(c)].water_need
                   : 0.0;
    }

    double water_usage(const Plan& plan, int t) const {
        double used = 0.0;
        for (int u = 0; u < num_units; ++u)
            if (plan.planted(u, t)) used += water_need_of(u, plan.at(u, t));
        return used;
    }

    // Period revenue under every scenario, written to out[0..num_scenarios).
    // Mirrors scenario_revenue: same unit order, same demand drawdown.
    void period_revenue(const Plan& plan, int t, double* out) const {
        struct Planted {
            int crop;
            double qty; // scenario-independent part of production
            double area;
        };
        std::vector<Planted> planted;
        planted.reserve(static_cast<std::size_t>(num_units));
        const double kappa = in.interaction_yield_gain;
        for (int u = 0; u < num_units; ++u) {
            const int c = plan.at(u, t);
            if (c == Plan::kFallow) continue;
            double eta = 0.0;
            for (int j : neighbors[static_cast<std::size_t>(u)]) {
                const int cj = plan.at(j, t);
                if (cj != Plan::kFallow) eta += in.interaction.at(c, cj);
            }
            eta = std::clamp(eta, -kEtaClamp, kEtaClamp);
            planted.push_back({c,
                               yield_qty[static_cast<std::size_t>(u) * num_crops + c] *
                                   (1.0 + kappa * eta),
                               area[static_cast<std::size_t>(u) * num_crops + c]});
        }
        if (!in.demand_cap_enabled) {
            std::vector<double> qty_sum(static_cast<std::size_t>(num_crops), 0.0);
            std::vector<double> area_sum(static_cast<std::size_t>(num_crops), 0.0);
            std::vector<int> touched;
            std::vector<char> seen(static_cast<std::size_t>(num_crops), 0);
            for (const auto& p : planted) {
                if (!seen[static_cast<std::size_t>(p.crop)]) {
                    seen[static_cast<std::size_t>(p.crop)] = 1;
                    touched.push_back(p.crop);
                }
                qty_sum[static_cast<std::size_t>(p.crop)] += p.qty;
                area_sum[static_cast<std::size_t>(p.crop)] += p.area;
            }
            for (int s = 0; s < num_scenarios; ++s) {
                const auto& sc = set.scenarios[static_cast<std::size_t>(s)];
                double rt = 0.0;
                for (int c : touched)
                    rt += sc.pr(c, t) * sc.yf(c, t) * qty_sum[static_cast<std::size_t>(c)] -
                          sc.co(c, t) * area_sum[static_cast<std::size_t>(c)];
                out[s] = rt;
            }
        } else {
            std::vector<double> remaining(static_cast<std::size_t>(num_crops), 0.0);
            for (int s = 0; s < num_scenarios; ++s) {
                const auto& sc = set.scenarios[static_cast<std::size_t>(s)];
                for (const auto& p : planted)
                    remaining[static_cast<std::size_t>(p.crop)] = sc.dm(p.crop, t);
                double rt = 0.0;
                for (const auto& p : planted) {
                    const double produced = sc.yf(p.crop, t) * p.qty;
                    const double sold =
                        std::min(produced, remaining[static_cast<std::size_t>(p.crop)]);
                    remaining[static_cast<std::size_t>(p.crop)] -= sold;
                    rt += sc.pr(p.crop, t) * (sold + in.salvage_fraction * (produced - sold)) -
                          sc.co(p.crop, t) * p.area;
                }
                out[s] = rt;
            }
        }
    }

    // Rotation-stress sum over the horizon for one unit (penalty mode only).
    double unit_stress(const Plan& plan, int u) const {
        double r = 0.0, sum = 0.0;
        std::optional<int> last;
        const auto hist = in.planting_history.find(in.units[static_cast<std::size_t>(u)].id);
        if (hist != in.planting_history.end()) {
            const int c = in.crop_index(hist->second);
            if (c >= 0) last = c;
        }
        for (int t = 0; t < horizon; ++t) {
            const int chosen = plan.at(u, t);
            double delta;
            if (chosen != Plan::kFallow && last &&
                in.crops[static_cast<std::size_t>(chosen)].category ==
                    in.crops[static_cast<std::size_t>(*last)].category)
                delta = 1.0;
            else if (chosen != Plan::kFallow &&
                     in.crops[static_cast<std::size_t>(chosen)].category == CropCategory::legume)
                delta = -2.0;
            else if (chosen == Plan::kFallow)
                delta = -1.0;
            else
                delta = 0.0;
            r = std::max(0.0, r + delta);
            sum += r;
            if (chosen != Plan::kFallow) last = chosen;
        }
        return sum;
    }
};

// Unit order and crop ranks for the lexicographic plan encoding used in
// deterministic tie-breaks: (unit id, period, crop id), fallow first.
struct LexOrder {
    std::vector<int> unit_order;
    std::vector<int> crop_rank;

    explicit LexOrder(const PlanningInstance& in) {
        unit_order.resize(in.units.size());
        std::iota(unit_order.begin(), unit_order.end(), 0);
        std::sort(unit_order.begin(), unit_order.end(), [&](int a, int b) {
            return in.units[static_cast<std::size_t>(a)].id <
                   in.units[static_cast<std::size_t>(b)].id;
        });
        std::vector<int> by_id(in.crops.size());
        std::iota(by_id.begin(), by_id.end(), 0);
        std::sort(by_id.begin(), by_id.end(), [&](int a, int b) {
            return in.crops[static_cast<std::size_t>(a)].id <
                   in.crops[static_cast<std::size_t>(b)].id;
        });
        crop_rank.resize(in.crops.size());
        for (std::size_t r = 0; r < by_id.size(); ++r)
            crop_rank[static_cast<std::size_t>(by_id[r])] = static_cast<int>(r);
    }

    bool less(const Plan& a, const Plan& b) const {
        for (int u : unit_order)
            for (int t = 0; t < a.horizon; ++t) {
                const int ca = a.at(u, t), cb = b.at(u, t);
                const int ra = ca == Plan::kFallow ? -1 : crop_rank[static_cast<std::size_t>(ca)];
                const int rb = cb == Plan::kFallow ? -1 : crop_rank[static_cast<std::size_t>(cb)];
                if (ra != rb) return ra < rb;
            }
        return false;
    }
};

struct Move {
    bool valid = false;
    int count = 0; // changed slots
    int unit[2] = {0, 0};
    int period[2] = {0, 0};
    int before[2] = {0, 0};
    int after[2] = {0, 0};
    int periods_touched = 0;
    int touched[2] = {0, 0};
};

struct RunOutcome {
    Plan plan;
    double objective = -std::numeric_limits<double>::infinity();
    double robust = 0.0;
    std::vector<IterationLogEntry> log;
};

class Annealer {
  public:
    Annealer(const EvalContext& ctx, const SolverConfig& cfg, std::uint64_t seed,
             const Plan& initial)
        : ctx_(ctx), cfg_(cfg), rng_(seed), solver_(ctx.weights, ctx.distances), plan_(initial),
          period_rev_(static_cast<std::size_t>(ctx.horizon) * ctx.num_scenarios, 0.0),
          totals_(static_cast<std::size_t>(ctx.num_scenarios), 0.0), cand_totals_(totals_),
          water_use_(static_cast<std::size_t>(ctx.horizon), 0.0),
          cand_row_{std::vector<double>(static_cast<std::size_t>(ctx.num_scenarios)),
                    std::vector<double>(static_cast<std::size_t>(ctx.num_scenarios))} {
        for (int t = 0; t < ctx_.horizon; ++t) {
            ctx_.period_revenue(plan_, t,
                                &period_rev_[static_cast<std::size_t>(t) * ctx_.num_scenarios]);
            for (int s = 0; s < ctx_.num_scenarios; ++s)
                totals_[static_cast<std::size_t>(s)] +=
                    period_rev_[static_cast<std::size_t>(t) * ctx_.num_scenarios + s];
            water_use_[static_cast<std::size_t>(t)] = ctx_.water_usage(plan_, t);
        }
        if (cfg_.rotation_penalty_weight != 0.0) {
            stress_.resize(static_cast<std::size_t>(ctx_.num_units));
            for (int u = 0; u < ctx_.num_units; ++u) {
                stress_[static_cast<std::size_t>(u)] = ctx_.unit_stress(plan_, u);
                stress_total_ += stress_[static_cast<std::size_t>(u)];
            }
        }
        current_robust_ = solver_.evaluate(totals_, cfg_.rho).value;
        current_obj_ = current_robust_ - cfg_.rotation_penalty_weight * stress_total_;
    }

    RunOutcome run() {
        RunOutcome best;
        best.plan = plan_;
        best.objective = current_obj_;
        best.robust = current_robust_;
        best.log.reserve(static_cast<std::size_t>(cfg_.max_iterations));

        double temp = cfg_.initial_temperature > 0.0 ? cfg_.initial_temperature
                                                     : calibrate_temperature();
        for (int iter = 0; iter < cfg_.max_iterations; ++iter) {
            const bool accepted = step(temp);
            if (accepted && current_obj_ > best.objective) {
                best.objective = current_obj_;
                best.robust = current_robust_;
                best.plan = plan_;
            }
            best.log.push_back({iter, temp, current_obj_, best.objective, accepted});
            temp *= cfg_.cooling_rate;
        }
        return best;
    }

  private:
    Move propose(Rng& rng) {
        Move mv;
        const double wsum =
            cfg_.move_weights.reassign + cfg_.move_weights.swap + cfg_.move_weights.rotate;
        double pick = rng.next_double() * wsum;
        int kind = 0; // reassign
        if (pick >= cfg_.move_weights.reassign) {
            pick -= cfg_.move_weights.reassign;
            kind = pick < cfg_.move_weights.swap ? 1 : 2;
        }
        if (kind == 1 && ctx_.num_units < 2) kind = 0;
        if (kind == 2 && ctx_.horizon < 2) kind = 0;

        if (kind == 0) {
            const int u =
                static_cast<int>(rng.next_below(static_cast<std::uint64_t>(ctx_.num_units)));
            const int t =
                static_cast<int>(rng.next_below(static_cast<std::uint64_t>(ctx_.horizon)));
            const auto& menu = ctx_.admissible[static_cast<std::size_t>(u)];
            const int k = static_cast<int>(rng.next_below(menu.size() + 1));
            const int next = k == static_cast<int>(menu.size()) ? Plan::kFallow
                                                                : menu[static_cast<std::size_t>(k)];
            if (next == plan_.at(u, t)) return mv;
            mv.valid = true;
            mv.count = 1;
            mv.unit[0] = u;
            mv.period[0] = t;
            mv.before[0] = plan_.at(u, t);
            mv.after[0] = next;
            mv.periods_touched = 1;
            mv.touched[0] = t;
        } else if (kind == 1) {
            const int t =
                static_cast<int>(rng.next_below(static_cast<std::uint64_t>(ctx_.horizon)));
            const int u1 =
                static_cast<int>(rng.next_below(static_cast<std::uint64_t>(ctx_.num_units)));
            int u2 =
                static_cast<int>(rng.next_below(static_cast<std::uint64_t>(ctx_.num_units - 1)));
            if (u2 >= u1) ++u2;
            const int c1 = plan_.at(u1, t), c2 = plan_.at(u2, t);
            if (c1 == c2) return mv;
            mv.valid = true;
            mv.count = 2;
            mv.unit[0] = u1;
            mv.period[0] = t;
            mv.before[0] = c1;
            mv.after[0] = c2;
            mv.unit[1] = u2;
            mv.period[1] = t;
            mv.before[1] = c2;
            mv.after[1] = c1;
            mv.periods_touched = 1;
            mv.touched[0] = t;
        } else {
            const int u =
                static_cast<int>(rng.next_below(static_cast<std::uint64_t>(ctx_.num_units)));
            const int t =
                static_cast<int>(rng.next_below(static_cast<std::uint64_t>(ctx_.horizon - 1)));
            const int c1 = plan_.at(u, t), c2 = plan_.at(u, t + 1);
            if (c1 == c2) return mv;
            mv.valid = true;
            mv.count = 2;
            mv.unit[0] = u;
            mv.period[0] = t;
            mv.before[0] = c1;
            mv.after[0] = c2;
            mv.unit[1] = u;
            mv.period[1] = t + 1;
            mv.before[1] = c2;
            mv.after[1] = c1;
            mv.periods_touched = 2;
            mv.touched[0] = t;
            mv.touched[1] = t + 1;
        }
        return mv;
    }

    void apply(const Move& mv) {
        for (int i = 0; i < mv.count; ++i) plan_.set(mv.unit[i], mv.period[i], mv.after[i]);
    }
    void revert(const Move& mv) {
        for (int i = 0; i < mv.count; ++i) plan_.set(mv.unit[i], mv.period[i], mv.before[i]);
    }

    // Hard feasibility of the applied move; the plan already reflects it.
    bool move_feasible(const Move& mv) const {
        for (int i = 0; i < mv.count; ++i) {
            const int c = mv.after[i];
            if (c == Plan::kFallow) continue;
            const int u = mv.unit[i], t = mv.period[i];
            if (!ctx_.adm_mask[static_cast<std::size_t>(u) * ctx_.num_crops + c]) return false;
            const int tau = ctx_.in.crops[static_cast<std::size_t>(c)].replant_interval;
            for (int delta = 1; delta < tau; ++delta) {
                if (t - delta >= 0 && plan_.at(u, t - delta) == c) return false;
                if (t + delta < ctx_.horizon && plan_.at(u, t + delta) == c) return false;
            }
        }
        for (int i = 0; i < mv.periods_touched; ++i) {
            const int t = mv.touched[i];
            if (ctx_.water_usage(plan_, t) > ctx_.water_eff[static_cast<std::size_t>(t)])
                return false;
        }
        if (ctx_.in.legume_window) {
            for (int i = 0; i < mv.count; ++i)
                if (!legume_window_breaches(plan_, ctx_.in, mv.unit[i], *ctx_.in.legume_window)
                         .empty())
                    return false;
        }
        return true;
    }

    // Candidate objective after the applied move; fills the scratch rows.
    double candidate_objective(const Move& mv, double* robust_out, double* stress_out) {
        cand_totals_ = totals_;
        for (int i = 0; i < mv.periods_touched; ++i) {
            const int t = mv.touched[i];
            ctx_.period_revenue(plan_, t, cand_row_[i].data());
            const double* old_row = &period_rev_[static_cast<std::size_t>(t) * ctx_.num_scenarios];
            for (int s = 0; s < ctx_.num_scenarios; ++s)
                cand_totals_[static_cast<std::size_t>(s)] +=
                    cand_row_[i][static_cast<std::size_t>(s)] - old_row[s];
        }
        const double robust = solver_.evaluate(cand_totals_, cfg_.rho).value;
        double stress_total = stress_total_;
        if (cfg_.rotation_penalty_weight != 0.0) {
            for (int i = 0; i < mv.count; ++i) {
                if (i == 1 && mv.unit[1] == mv.unit[0]) break;
                stress_total += ctx_.unit_stress(plan_, mv.unit[i]) -
                                stress_[static_cast<std::size_t>(mv.unit[i])];
            }
        }
        *robust_out = robust;
        *stress_out = stress_total;
        return robust - cfg_.rotation_penalty_weight * stress_total;
    }

    void commit(const Move& mv, double obj, double robust, double stress_total) {
        for (int i = 0; i < mv.periods_touched; ++i) {
            const int t = mv.touched[i];
            std::copy(cand_row_[i].begin(), cand_row_[i].end(),
                      period_rev_.begin() + static_cast<std::ptrdiff_t>(t) * ctx_.num_scenarios);
            water_use_[static_cast<std::size_t>(t)] = ctx_.water_usage(plan_, t);
        }
        totals_ = cand_totals_;
        if (cfg_.rotation_penalty_weight != 0.0) {
            for (int i = 0; i < mv.count; ++i)
                stress_[static_cast<std::size_t>(mv.unit[i])] = ctx_.unit_stress(plan_, mv.unit[i]);
            stress_total_ = stress_total;
        }
        current_obj_ = obj;
        current_robust_ = robust;
    }

    bool step(double temp) {
        Move mv = propose(rng_);
        if (!mv.valid) return false;
        apply(mv);
        if (!move_feasible(mv)) {
            revert(mv);
            return false;
        }
        double robust = 0.0, stress_total = 0.0;
        const double obj = candidate_objective(mv, &robust, &stress_total);
        const double delta = obj - current_obj_;
        if (delta >= 0.0 || rng_.next_double() < std::exp(delta / temp)) {
            commit(mv, obj, robust, stress_total);
            return true;
        }
        revert(mv);
        return false;
    }

    // Mean absolute objective delta over probe moves from the initial plan.
    double calibrate_temperature() {
        Rng probe(derive_seed(cfg_.seed, 0xca1b));
        double sum = 0.0;
        int hits = 0;
        for (int k = 0; k < 64; ++k) {
            Move mv = propose(probe);
            if (!mv.valid) continue;
            apply(mv);
            if (move_feasible(mv)) {
                double robust = 0.0, stress_total = 0.0;
                const double obj = candidate_objective(mv, &robust, &stress_total);
                sum += std::abs(obj - current_obj_);
                ++hits;
            }
            revert(mv);
        }
        const double floor = 1e-6 * (1.0 + std::abs(current_obj_));
        return hits > 0 ? std::max(sum / hits, floor) : std::max(1.0, floor);
    }

    const EvalContext& ctx_;
    const SolverConfig& cfg_;
    Rng rng_;
    WorstCaseSolver solver_;
    Plan plan_;
    std::vector<double> period_rev_;
    std::vector<double> totals_;
    std::vector<double> cand_totals_;
    std::vector<double> water_use_;
    std::vector<double> cand_row_[2];
    std::vector<double> stress_;
    double stress_total_ = 0.0;
    double current_obj_ = 0.0;
    double current_robust_ = 0.0;
};

void check_config(const SolverConfig& cfg) {
    if (!(cfg.cooling_rate > 0.0 && cfg.cooling_rate < 1.0))
        throw std::invalid_argument("cooling_rate must lie in (0, 1)");
    if (cfg.max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
    if (cfg.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    if (cfg.rho < 0.0) throw std::invalid_argument("rho must be >= 0");
    const auto& mw = cfg.move_weights;
    if (mw.reassign < 0.0 || mw.swap < 0.0 || mw.rotate < 0.0 ||
        mw.reassign + mw.swap + mw.rotate <= 0.0)
        throw std::invalid_argument("move weights must be non-negative with a positive sum");
}

std::string period_label(int t) { return "period " + std::to_string(t + 1); }

} // namespace

PlanningInstance interactions_off(const PlanningInstance& instance) {
    PlanningInstance out = instance;
    out.interaction = InteractionMatrix::zero(static_cast<int>(instance.crops.size()));
    out.interaction_yield_gain = 0.0;
    return out;
}

std::vector<Violation> feasible(const Plan& plan, const PlanningInstance& instance) {
    std::vector<Violation> out;
    if (plan.num_units != static_cast<int>(instance.units.size()) ||
        plan.horizon != instance.horizon) {
        out.push_back({"plan", "plan_shape",
                       "plan dimensions do not match the instance (units " +
                           std::to_string(plan.num_units) + ", horizon " +
                           std::to_string(plan.horizon) + ")"});
        return out;
    }
    for (int u = 0; u < plan.num_units; ++u) {
        const auto& unit = instance.units[static_cast<std::size_t>(u)];
        for (int t = 0; t < plan.horizon; ++t) {
            const int c = plan.at(u, t);
            if (c == Plan::kFallow) continue;
            const auto& crop = instance.crops[static_cast<std::size_t>(c)];
            if (std::find(crop.allowed_land_types.begin(), crop.allowed_land_types.end(),
                          unit.land_type) == crop.allowed_land_types.end())
                out.push_back({unit.id, "admissible_crop",
                               crop.id + " not admissible on land type " +
                                   to_string(unit.land_type) + " at " + period_label(t)});
        }
    }
    for (int t = 0; t < plan.horizon; ++t) {
        for (int u : capacity_violation(plan, instance, t))
            out.push_back({instance.units[static_cast<std::size_t>(u)].id, "capacity",
                           "planted area exceeds unit capacity at " + period_label(t)});
        if (const auto excess = water_violation(plan, instance, t))
            out.push_back({period_label(t), "water",
                           "irrigation demand exceeds the limit by " + std::to_string(*excess) +
                               " m3"});
    }
    for (const auto& v : rotation_legal(plan, instance))
        out.push_back({instance.units[static_cast<std::size_t>(v.unit)].id, "rotation_interval",
                       instance.crops[static_cast<std::size_t>(v.crop)].id +
                           " replanted within its replant interval at " + period_label(v.period)});
    if (instance.legume_window) {
        for (int u = 0; u < plan.num_units; ++u)
            for (const auto& [a, b] :
                 legume_window_breaches(plan, instance, u, *instance.legume_window))
                out.push_back({instance.units[static_cast<std::size_t>(u)].id, "legume_window",
                               "periods " + std::to_string(a + 1) + ".." + std::to_string(b + 1) +
                                   " planted without a legume"});
    }
    return out;
}

std::vector<Violation> feasible(const Plan& plan, const PlanningInstance& instance,
                                const ScenarioSet& set) {
    auto out = feasible(plan, instance);
    if (!out.empty() && out[0].rule == "plan_shape") return out;
    for (std::size_t s = 0; s < set.scenarios.size(); ++s) {
        const auto& sc = set.scenarios[s];
        if (sc.water_limit_factor != 1.0) {
            for (int t = 0; t < plan.horizon; ++t)
                if (const auto excess = water_violation(plan, instance, t, sc.water_limit_factor))
                    out.push_back({"scenario " + std::to_string(s), "scenario_water",
                                   "water limit exceeded by " + std::to_string(*excess) +
                                       " m3 at " + period_label(t)});
        }
    }
    if (instance.revenue_floor) {
        const auto w = build_adjacency(instance.units);
        const auto tr = build_trajectory(plan, instance, w);
        const auto totals = scenario_totals(plan, instance, tr, set);
        for (std::size_t s = 0; s < totals.size(); ++s)
            if (totals[s] < *instance.revenue_floor)
                out.push_back({"scenario " + std::to_string(s), "scenario_revenue_floor",
                               "total revenue " + std::to_string(totals[s]) + " below the floor"});
    }
    return out;
}

PlanMetrics evaluate(const Plan& plan, const PlanningInstance& instance, const ScenarioSet& set,
                     double rho) {
    const auto violations = feasible(plan, instance, set);
    if (!violations.empty())
        throw std::invalid_argument("evaluate: infeasible plan\n" +
                                    format_violations(violations));
    const auto w = build_adjacency(instance.units);
    const auto tr = build_trajectory(plan, instance, w);

    const int num_scenarios = static_cast<int>(set.scenarios.size());
    const int years = (instance.horizon + 1) / 2;
    std::vector<double> totals(static_cast<std::size_t>(num_scenarios), 0.0);
    std::vector<double> annual(static_cast<std::size_t>(num_scenarios) * years, 0.0);
    for (int s = 0; s < num_scenarios; ++s) {
        const auto per_period =
            scenario_revenue(plan, set.scenarios[static_cast<std::size_t>(s)], instance, tr);
        for (int t = 0; t < instance.horizon; ++t) {
            totals[static_cast<std::size_t>(s)] += per_period[static_cast<std::size_t>(t)];
            annual[static_cast<std::size_t>(s) * years + t / 2] +=
                per_period[static_cast<std::size_t>(t)];
        }
    }

    PlanMetrics m;
    const auto weights = set.weights();
    for (int s = 0; s < num_scenarios; ++s)
        m.total_expected_profit +=
            weights[static_cast<std::size_t>(s)] * totals[static_cast<std::size_t>(s)];
    m.worst_case_profit =
        worst_case_expectation(totals, set,
                               distance_matrix(set, AmbiguitySpec::defaults(instance, rho)), rho)
            .value;
    double mean = 0.0;
    for (int s = 0; s < num_scenarios; ++s)
        for (int y = 0; y < years; ++y)
            mean += weights[static_cast<std::size_t>(s)] *
                    annual[static_cast<std::size_t>(s) * years + y] / years;
    double var = 0.0;
    for (int s = 0; s < num_scenarios; ++s)
        for (int y = 0; y < years; ++y) {
            const double dev = annual[static_cast<std::size_t>(s) * years + y] - mean;
            var += weights[static_cast<std::size_t>(s)] * dev * dev / years;
        }
    m.volatility = std::sqrt(var);

    int legume = 0, total = 0;
    for (int u = 0; u < plan.num_units; ++u)
        for (int t = 0; t < plan.horizon; ++t) {
            const int c = plan.at(u, t);
            if (c == Plan::kFallow) continue;
            ++total;
            if (instance.crops[static_cast<std::size_t>(c)].category == CropCategory::legume)
                ++legume;
        }
    m.legume_ratio = total == 0 ? 0.0 : static_cast<double>(legume) / total;
    return m;
}

SolveResult brute_force_optimize(const PlanningInstance& instance, const ScenarioSet& set,
                                 double rho, double max_candidates) {
    const EvalContext ctx(instance, set);
    double log10_count = 0.0;
    for (int u = 0; u < ctx.num_units; ++u)
        log10_count +=
            ctx.horizon * std::log10(1.0 + static_cast<double>(
                                               ctx.admissible[static_cast<std::size_t>(u)].size()));
    if (log10_count > std::log10(max_candidates)) {
        std::ostringstream msg;
        msg << "oracle refused: ~10^" << log10_count << " candidate plans over " << ctx.num_units
            << " units x " << ctx.horizon << " periods exceeds the guard of " << max_candidates;
        throw std::invalid_argument(msg.str());
    }

    struct Search {
        const EvalContext& ctx;
        double rho;
        WorstCaseSolver solver;
        LexOrder lex;
        Plan plan;
        std::vector<double> cum;   // (horizon + 1) x scenarios prefix totals
        std::vector<double> row;   // scratch period revenues
        std::vector<double> water; // per-period running usage
        Plan best_plan;
        double best_value = -std::numeric_limits<double>::infinity();
        bool have_best = false;

        Search(const EvalContext& c, double r)
            : ctx(c), rho(r), solver(c.weights, c.distances), lex(c.in),
              plan(c.num_units, c.horizon),
              cum(static_cast<std::size_t>(c.horizon + 1) * c.num_scenarios, 0.0),
              row(static_cast<std::size_t>(c.num_scenarios)),
              water(static_cast<std::size_t>(c.horizon), 0.0), best_plan(plan) {}

        void leaf() {
            if (ctx.in.legume_window) {
                for (int u = 0; u < ctx.num_units; ++u)
                    if (!legume_window_breaches(plan, ctx.in, u, *ctx.in.legume_window).empty())
                        return;
            }
            const double* totals = &cum[static_cast<std::size_t>(ctx.horizon) * ctx.num_scenarios];
            if (ctx.in.revenue_floor) {
                for (int s = 0; s < ctx.num_scenarios; ++s)
                    if (totals[s] < *ctx.in.revenue_floor) return;
            }
            std::vector<double> v(totals, totals + ctx.num_scenarios);
            const double value = solver.evaluate(v, rho).value;
            if (!have_best || value > best_value ||
                (value == best_value && lex.less(plan, best_plan))) {
                have_best = true;
                best_value = value;
                best_plan = plan;
            }
        }

        void descend(int idx) {
            if (idx == ctx.num_units * ctx.horizon) {
                leaf();
                return;
            }
            const int t = idx / ctx.num_units;
            const int u = idx % ctx.num_units;
            try_choice(idx, t, u, Plan::kFallow);
            for (int c : ctx.admissible[static_cast<std::size_t>(u)]) try_choice(idx, t, u, c);
        }

        void try_choice(int idx, int t, int u, int c) {
            double wn = 0.0;
            if (c != Plan::kFallow) {
                const int tau = ctx.in.crops[static_cast<std::size_t>(c)].replant_interval;
                for (int delta = 1; delta < tau; ++delta)
                    if (t - delta >= 0 && plan.at(u, t - delta) == c) return;
                wn = ctx.water_need_of(u, c);
                if (water[static_cast<std::size_t>(t)] + wn >
                    ctx.water_eff[static_cast<std::size_t>(t)])
                    return;
            }
            plan.set(u, t, c);
            water[static_cast<std::size_t>(t)] += wn;
            if (u == ctx.num_units - 1) {
                ctx.period_revenue(plan, t, row.data());
                for (int s = 0; s < ctx.num_scenarios; ++s)
                    cum[static_cast<std::size_t>(t + 1) * ctx.num_scenarios + s] =
                        cum[static_cast<std::size_t>(t) * ctx.num_scenarios + s] +
                        row[static_cast<std::size_t>(s)];
            }
            descend(idx + 1);
            water[static_cast<std::size_t>(t)] -= wn;
            plan.set(u, t, Plan::kFallow);
        }
    };

    Search search(ctx, rho);
    search.descend(0);
    if (!search.have_best) throw std::runtime_error("oracle found no feasible plan");

    SolveResult result;
    result.plan = search.best_plan;
    result.robust_value = search.best_value;
    result.metrics = evaluate(search.best_plan, instance, set, rho);
    return result;
}

SolveResult local_search_optimize(const PlanningInstance& instance, const ScenarioSet& set,
                                  const SolverConfig& config, const Plan& initial) {
    check_config(config);
    const EvalContext ctx(instance, set);
    {
        const auto violations = feasible(initial, instance, set);
        if (!violations.empty())
            throw std::invalid_argument("local search: infeasible initial plan\n" +
                                        format_violations(violations));
    }

    std::vector<RunOutcome> outcomes(static_cast<std::size_t>(config.restarts));
    parallel_for_index(config.restarts, [&](int r) {
        Annealer annealer(ctx, config, derive_seed(config.seed, static_cast<std::uint64_t>(r) + 1),
                          initial);
        outcomes[static_cast<std::size_t>(r)] = annealer.run();
    });

    int pick = 0;
    for (int r = 1; r < config.restarts; ++r)
        if (outcomes[static_cast<std::size_t>(r)].objective >
            outcomes[static_cast<std::size_t>(pick)].objective)
            pick = r;

    SolveResult result;
    result.plan = std::move(outcomes[static_cast<std::size_t>(pick)].plan);
    result.robust_value = outcomes[static_cast<std::size_t>(pick)].robust;
    result.log = std::move(outcomes[static_cast<std::size_t>(pick)].log);
    result.metrics = evaluate(result.plan, instance, set, config.rho);
    return result;
}

SolveResult local_search_optimize(const PlanningInstance& instance, const ScenarioSet& set,
                                  const SolverConfig& config) {
    return local_search_optimize(instance, set, config,
                                 Plan(static_cast<int>(instance.units.size()), instance.horizon));
}

Plan baseline_deterministic(const PlanningInstance& instance, const SolverConfig& config) {
    const PlanningInstance det = interactions_off(instance);
    const ScenarioSet nominal = ScenarioSet::nominal(det);
    SolverConfig cfg = config;
    cfg.rho = 0.0;
    return local_search_optimize(det, nominal, cfg).plan;
}

std::vector<SweepPoint> sensitivity_sweep(const PlanningInstance& instance,
                                          const ScenarioSet& set, const Plan& base_plan,
                                          const std::vector<double>& rho_grid, SweepMode mode,
                                          const SolverConfig& config) {
    if (rho_grid.empty()) throw std::invalid_argument("sweep: empty rho grid");
    for (std::size_t i = 0; i < rho_grid.size(); ++i) {
        if (rho_grid[i] < 0.0) throw std::invalid_argument("sweep: negative rho");
        if (i > 0 && rho_grid[i] < rho_grid[i - 1])
            throw std::invalid_argument("sweep: rho grid must be ascending");
    }

    std::vector<SweepPoint> points;
    points.reserve(rho_grid.size());
    if (mode == SweepMode::fixed_plan) {
        const auto violations = feasible(base_plan, instance, set);
        if (!violations.empty())
            throw std::invalid_argument("sweep: infeasible plan\n" +
                                        format_violations(violations));
        const auto w = build_adjacency(instance.units);
        const auto tr = build_trajectory(base_plan, instance, w);
        const auto totals = scenario_totals(base_plan, instance, tr, set);
        const WorstCaseSolver solver(set.weights(),
                                     distance_matrix(set, AmbiguitySpec::defaults(instance, 0.0)));
        for (double rho : rho_grid) points.push_back({rho, solver.evaluate(totals, rho).value});
    } else {
        for (double rho : rho_grid) {
            SolverConfig cfg = config;
            cfg.rho = rho;
            const auto solved = local_search_optimize(instance, set, cfg, base_plan);
            points.push_back({rho, solved.robust_value});
        }
    }
    return points;
}

} // namespace mlrcpf
