// io.hpp — instance/plan serialization, the synthetic case study, SVG
// allocation maps, and writers for metrics, sweeps, and iteration logs.
//
// File formats (all seeded stages reproduce byte-identical output):
//   instance  JSON document, schema version 1, unknown fields rejected
//   plan      CSV `unit,period,crop,area` (1-based periods, fallow omitted)
//   states    JSON rows of (unit, period, last_crop, rotation_stress,
//             interaction_potential) for periods 1..horizon+1
//   maps      SVG, one rect per grid cell, legend by crop category
//   metrics   JSON in raw CNY with an explicit unit field
//   sweep     CSV `rho,worst_case_profit`
//   log       CSV `iter,temperature,current_value,best_value,accepted`

#pragma once

#include "mlrcpf/core.hpp"
#include "mlrcpf/optimizer.hpp"
#include "mlrcpf/temporal.hpp"
#include "mlrcpf/uncertainty.hpp"

#include <optional>
#include <string>

namespace mlrcpf {

inline constexpr int kInstanceSchemaVersion = 1;

// Instance document: the planning instance plus the optional scenario
// generation block carried alongside it.
struct InstanceDocument {
    PlanningInstance instance;
    std::optional<ScenarioGenSpec> scenario_spec;
};

// Parses and schema-checks an instance document. Unknown or missing fields
// raise std::runtime_error naming the field and its context; the instance is
// then validated and every violation is reported in one error.
InstanceDocument parse_instance_document(const std::string& text, const std::string& origin);
InstanceDocument load_instance_document(const std::string& path);
PlanningInstance load_instance(const std::string& path);

std::string instance_to_text(const PlanningInstance& instance,
                             const std::optional<ScenarioGenSpec>& scenario_spec = std::nullopt);
void save_instance(const PlanningInstance& instance, const std::string& path,
                   const std::optional<ScenarioGenSpec>& scenario_spec = std::nullopt);

// Synthetic case study: 54 units (26 open-field dry across flat, terraced,
// and hillside plots; 8 irrigated; 16 standard greenhouses; 4 smart
// greenhouses), 1201 mu total, 41 crops over 14 periods, with a
// complementarity/competition interaction matrix and a 2023 planting history.
PlanningInstance generate_case_study(std::uint64_t seed);

std::string plan_to_csv(const Plan& plan, const PlanningInstance& instance);
Plan plan_from_csv(const std::string& text, const PlanningInstance& instance,
                   const std::string& origin);
Plan load_plan(const std::string& path, const PlanningInstance& instance);

std::string states_to_text(const StateTrajectory& trajectory, const PlanningInstance& instance);

// Writes the plan table and the per-(unit, period) state document.
void export_plan(const Plan& plan, const StateTrajectory& trajectory,
                 const PlanningInstance& instance, const std::string& csv_path,
                 const std::string& states_path);

// Allocation map for one period (0-based index). Cells are colored by crop
// category; byte output is deterministic. Throws std::out_of_range for a
// period outside the horizon.
std::string render_map_svg(const Plan& plan, const PlanningInstance& instance, int period);
void render_map(const Plan& plan, const PlanningInstance& instance, int period,
                const std::string& path);

std::string metrics_to_text(const PlanMetrics& metrics, double rho, int scenario_count,
                            std::uint64_t seed);
// Table 1 presentation: values in 10^4 CNY.
std::string metrics_to_human(const PlanMetrics& metrics);

std::string sweep_to_csv(const std::vector<SweepPoint>& points);
std::string iteration_log_to_csv(const std::vector<IterationLogEntry>& log);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace mlrcpf
