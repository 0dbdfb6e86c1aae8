#include "mlrcpf/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mlrcpf {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

// Shortest round-trip decimal representation.
std::string fmt_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (const auto& item : obj.items())
        if (!allowed.count(item.key())) fail("unknown field '" + item.key() + "' in " + where);
}

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) fail(where + " must be an object");
    if (!obj.contains(key)) fail("missing field '" + std::string(key) + "' in " + where);
    return obj.at(key);
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where + " must be a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where + " must be an integer");
    return v.get<int>();
}

bool as_bool(const json& v, const std::string& where) {
    if (!v.is_boolean()) fail(where + " must be a boolean");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string()) fail(where + " must be a string");
    return v.get<std::string>();
}

LandUnit parse_unit(const json& j, const std::string& where) {
    reject_unknown(j, {"id", "land_type", "area", "productivity_factor", "fertility_level",
                       "irrigated", "cells"},
                   where);
    LandUnit u;
    u.id = as_string(require(j, "id", where), where + ".id");
    const std::string type = as_string(require(j, "land_type", where), where + ".land_type");
    const auto lt = land_type_from_string(type);
    if (!lt) fail("unknown land_type '" + type + "' in " + where);
    u.land_type = *lt;
    u.area = as_number(require(j, "area", where), where + ".area");
    u.productivity_factor =
        as_number(require(j, "productivity_factor", where), where + ".productivity_factor");
    u.fertility_level =
        as_int(require(j, "fertility_level", where), where + ".fertility_level");
    u.irrigated_flag = as_bool(require(j, "irrigated", where), where + ".irrigated");
    const json& cells = require(j, "cells", where);
    if (!cells.is_array()) fail(where + ".cells must be an array");
    for (const auto& cell : cells) {
        if (!cell.is_array() || cell.size() != 2)
            fail(where + ".cells entries must be [row, col] pairs");
        u.cells.push_back({as_int(cell[0], where + ".cells.row"),
                           as_int(cell[1], where + ".cells.col")});
    }
    std::sort(u.cells.begin(), u.cells.end());
    u.cells.erase(std::unique(u.cells.begin(), u.cells.end()), u.cells.end());
    return u;
}

Crop parse_crop(const json& j, const std::string& where) {
    reject_unknown(j, {"id", "category", "baseline_yield", "baseline_price", "baseline_cost",
                       "water_need", "replant_interval", "allowed_land_types",
                       "area_per_planting"},
                   where);
    Crop c;
    c.id = as_string(require(j, "id", where), where + ".id");
    const std::string cat = as_string(require(j, "category", where), where + ".category");
    const auto cc = crop_category_from_string(cat);
    if (!cc) fail("unknown category '" + cat + "' in " + where);
    c.category = *cc;
    c.baseline_yield = as_number(require(j, "baseline_yield", where), where + ".baseline_yield");
    c.baseline_price = as_number(require(j, "baseline_price", where), where + ".baseline_price");
    c.baseline_cost = as_number(require(j, "baseline_cost", where), where + ".baseline_cost");
    c.water_need = as_number(require(j, "water_need", where), where + ".water_need");
    c.replant_interval =
        as_int(require(j, "replant_interval", where), where + ".replant_interval");
    const json& allowed = require(j, "allowed_land_types", where);
    if (!allowed.is_array()) fail(where + ".allowed_land_types must be an array");
    for (const auto& entry : allowed) {
        const std::string name = as_string(entry, where + ".allowed_land_types");
        const auto lt = land_type_from_string(name);
        if (!lt) fail("unknown land_type '" + name + "' in " + where + ".allowed_land_types");
        c.allowed_land_types.push_back(*lt);
    }
    if (j.contains("area_per_planting"))
        c.area_per_planting =
            as_number(j.at("area_per_planting"), where + ".area_per_planting");
    return c;
}

ScenarioGenSpec parse_scenario_spec(const json& j) {
    reject_unknown(j, {"yield_radius", "price_radius", "cost_radius", "demand_growth_min",
                       "demand_growth_max", "count"},
                   "scenario_spec");
    ScenarioGenSpec spec;
    if (j.contains("yield_radius"))
        spec.yield_radius = as_number(j.at("yield_radius"), "scenario_spec.yield_radius");
    if (j.contains("price_radius"))
        spec.price_radius = as_number(j.at("price_radius"), "scenario_spec.price_radius");
    if (j.contains("cost_radius"))
        spec.cost_radius = as_number(j.at("cost_radius"), "scenario_spec.cost_radius");
    if (j.contains("demand_growth_min"))
        spec.demand_growth_min =
            as_number(j.at("demand_growth_min"), "scenario_spec.demand_growth_min");
    if (j.contains("demand_growth_max"))
        spec.demand_growth_max =
            as_number(j.at("demand_growth_max"), "scenario_spec.demand_growth_max");
    if (j.contains("count")) spec.count = as_int(j.at("count"), "scenario_spec.count");
    return spec;
}

const char* category_color(CropCategory c) {
    switch (c) {
    case CropCategory::cereal: return "#d9b44a";
    case CropCategory::legume: return "#5a9e54";
    case CropCategory::vegetable: return "#c4613c";
    case CropCategory::fungus: return "#7d5fa8";
    }
    return "#000000";
}

constexpr const char* kFallowColor = "#ded9cd";

} // namespace

InstanceDocument parse_instance_document(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(origin + ": " + e.what());
    }
    if (!doc.is_object()) fail(origin + ": document must be a JSON object");
    reject_unknown(doc,
                   {"version", "horizon", "water_limits", "units", "crops", "interaction",
                    "interaction_yield_gain", "salvage_fraction", "demand_cap_enabled",
                    "legume_window", "revenue_floor", "planting_history", "scenario_spec"},
                   origin);
    const int version = as_int(require(doc, "version", origin), origin + ".version");
    if (version != kInstanceSchemaVersion)
        fail(origin + ": unsupported schema version " + std::to_string(version));

    InstanceDocument out;
    PlanningInstance& in = out.instance;
    in.horizon = as_int(require(doc, "horizon", origin), origin + ".horizon");

    const json& wl = require(doc, "water_limits", origin);
    if (!wl.is_array()) fail(origin + ".water_limits must be an array");
    for (std::size_t i = 0; i < wl.size(); ++i)
        in.water_limits.push_back(
            as_number(wl[i], origin + ".water_limits[" + std::to_string(i) + "]"));

    const json& units = require(doc, "units", origin);
    if (!units.is_array()) fail(origin + ".units must be an array");
    for (std::size_t i = 0; i < units.size(); ++i)
        in.units.push_back(parse_unit(units[i], "unit[" + std::to_string(i) + "]"));

    const json& crops = require(doc, "crops", origin);
    if (!crops.is_array()) fail(origin + ".crops must be an array");
    for (std::size_t i = 0; i < crops.size(); ++i)
        in.crops.push_back(parse_crop(crops[i], "crop[" + std::to_string(i) + "]"));

    const json& inter = require(doc, "interaction", origin);
    reject_unknown(inter, {"crop_order", "entries"}, "interaction");
    const json& order = require(inter, "crop_order", "interaction");
    const json& entries = require(inter, "entries", "interaction");
    if (!order.is_array() || order.size() != in.crops.size())
        fail("interaction.crop_order must list every crop exactly once");
    std::map<std::string, int> row_of;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::string id = as_string(order[i], "interaction.crop_order");
        if (!row_of.emplace(id, static_cast<int>(i)).second)
            fail("interaction.crop_order repeats crop '" + id + "'");
    }
    const int n = static_cast<int>(in.crops.size());
    if (!entries.is_array() || static_cast<int>(entries.size()) != n)
        fail("interaction.entries must be a dense " + std::to_string(n) + "x" +
             std::to_string(n) + " matrix");
    in.interaction = InteractionMatrix::zero(n);
    for (int a = 0; a < n; ++a) {
        const auto it_a = row_of.find(in.crops[static_cast<std::size_t>(a)].id);
        if (it_a == row_of.end())
            fail("interaction.crop_order is missing crop '" +
                 in.crops[static_cast<std::size_t>(a)].id + "'");
        const json& row = entries[static_cast<std::size_t>(it_a->second)];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            fail("interaction.entries row " + std::to_string(it_a->second) + " has wrong length");
        for (int b = 0; b < n; ++b) {
            const auto it_b = row_of.find(in.crops[static_cast<std::size_t>(b)].id);
            in.interaction.at(a, b) = as_number(row[static_cast<std::size_t>(it_b->second)],
                                                "interaction.entries");
        }
    }

    if (doc.contains("interaction_yield_gain"))
        in.interaction_yield_gain =
            as_number(doc.at("interaction_yield_gain"), origin + ".interaction_yield_gain");
    if (doc.contains("salvage_fraction"))
        in.salvage_fraction = as_number(doc.at("salvage_fraction"), origin + ".salvage_fraction");
    if (doc.contains("demand_cap_enabled"))
        in.demand_cap_enabled =
            as_bool(doc.at("demand_cap_enabled"), origin + ".demand_cap_enabled");
    if (doc.contains("legume_window") && !doc.at("legume_window").is_null())
        in.legume_window = as_int(doc.at("legume_window"), origin + ".legume_window");
    if (doc.contains("revenue_floor") && !doc.at("revenue_floor").is_null())
        in.revenue_floor = as_number(doc.at("revenue_floor"), origin + ".revenue_floor");
    if (doc.contains("planting_history")) {
        const json& hist = doc.at("planting_history");
        if (!hist.is_object()) fail(origin + ".planting_history must be an object");
        for (const auto& item : hist.items())
            in.planting_history[item.key()] =
                as_string(item.value(), origin + ".planting_history." + item.key());
    }
    if (doc.contains("scenario_spec"))
        out.scenario_spec = parse_scenario_spec(doc.at("scenario_spec"));

    const auto violations = validate_instance(in);
    if (!violations.empty())
        fail(origin + ": instance failed validation\n" + format_violations(violations));
    return out;
}

InstanceDocument load_instance_document(const std::string& path) {
    return parse_instance_document(read_text_file(path), path);
}

PlanningInstance load_instance(const std::string& path) {
    return load_instance_document(path).instance;
}

std::string instance_to_text(const PlanningInstance& in,
                             const std::optional<ScenarioGenSpec>& scenario_spec) {
    json doc;
    doc["version"] = kInstanceSchemaVersion;
    doc["horizon"] = in.horizon;
    doc["water_limits"] = in.water_limits;
    doc["interaction_yield_gain"] = in.interaction_yield_gain;
    doc["salvage_fraction"] = in.salvage_fraction;
    doc["demand_cap_enabled"] = in.demand_cap_enabled;
    if (in.legume_window) doc["legume_window"] = *in.legume_window;
    if (in.revenue_floor) doc["revenue_floor"] = *in.revenue_floor;

    json units = json::array();
    for (const auto& u : in.units) {
        json ju;
        ju["id"] = u.id;
        ju["land_type"] = to_string(u.land_type);
        ju["area"] = u.area;
        ju["productivity_factor"] = u.productivity_factor;
        ju["fertility_level"] = u.fertility_level;
        ju["irrigated"] = u.irrigated_flag;
        json cells = json::array();
        for (const auto& cell : u.cells) cells.push_back({cell.row, cell.col});
        ju["cells"] = std::move(cells);
        units.push_back(std::move(ju));
    }
    doc["units"] = std::move(units);

    json crops = json::array();
    for (const auto& c : in.crops) {
        json jc;
        jc["id"] = c.id;
        jc["category"] = to_string(c.category);
        jc["baseline_yield"] = c.baseline_yield;
        jc["baseline_price"] = c.baseline_price;
        jc["baseline_cost"] = c.baseline_cost;
        jc["water_need"] = c.water_need;
        jc["replant_interval"] = c.replant_interval;
        json allowed = json::array();
        for (const auto lt : c.allowed_land_types) allowed.push_back(to_string(lt));
        jc["allowed_land_types"] = std::move(allowed);
        if (c.area_per_planting) jc["area_per_planting"] = *c.area_per_planting;
        crops.push_back(std::move(jc));
    }
    doc["crops"] = std::move(crops);

    json order = json::array();
    for (const auto& c : in.crops) order.push_back(c.id);
    json entries = json::array();
    const int n = static_cast<int>(in.crops.size());
    for (int a = 0; a < n; ++a) {
        json row = json::array();
        for (int b = 0; b < n; ++b) row.push_back(in.interaction.at(a, b));
        entries.push_back(std::move(row));
    }
    doc["interaction"] = {{"crop_order", std::move(order)}, {"entries", std::move(entries)}};

    if (!in.planting_history.empty()) {
        json hist;
        for (const auto& [unit, crop] : in.planting_history) hist[unit] = crop;
        doc["planting_history"] = std::move(hist);
    }
    if (scenario_spec) {
        doc["scenario_spec"] = {{"yield_radius", scenario_spec->yield_radius},
                                {"price_radius", scenario_spec->price_radius},
                                {"cost_radius", scenario_spec->cost_radius},
                                {"demand_growth_min", scenario_spec->demand_growth_min},
                                {"demand_growth_max", scenario_spec->demand_growth_max},
                                {"count", scenario_spec->count}};
    }
    return doc.dump(2) + "\n";
}

void save_instance(const PlanningInstance& in, const std::string& path,
                   const std::optional<ScenarioGenSpec>& scenario_spec) {
    write_text_file(path, instance_to_text(in, scenario_spec));
}

std::string plan_to_csv(const Plan& plan, const PlanningInstance& in) {
    std::ostringstream out;
    out << "unit,period,crop,area\n";
    for (int u = 0; u < plan.num_units; ++u)
        for (int t = 0; t < plan.horizon; ++t) {
            const int c = plan.at(u, t);
            if (c == Plan::kFallow) continue;
            out << in.units[static_cast<std::size_t>(u)].id << ',' << (t + 1) << ','
                << in.crops[static_cast<std::size_t>(c)].id << ','
                << fmt_double(in.planting_area(u, c)) << '\n';
        }
    return out.str();
}

Plan plan_from_csv(const std::string& text, const PlanningInstance& in,
                   const std::string& origin) {
    std::istringstream stream(text);
    std::string line;
    if (!std::getline(stream, line)) fail(origin + ": empty plan file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "unit,period,crop,area")
        fail(origin + ": unexpected header '" + line + "'");
    Plan plan(static_cast<int>(in.units.size()), in.horizon);
    int lineno = 1;
    while (std::getline(stream, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            const auto comma = line.find(',', pos);
            fields.push_back(line.substr(pos, comma == std::string::npos ? comma : comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (fields.size() != 4)
            fail(origin + ":" + std::to_string(lineno) + ": expected 4 fields");
        const int u = in.unit_index(fields[0]);
        if (u < 0) fail(origin + ":" + std::to_string(lineno) + ": unknown unit '" + fields[0] + "'");
        int period = 0;
        try {
            period = std::stoi(fields[1]);
        } catch (...) {
            fail(origin + ":" + std::to_string(lineno) + ": bad period '" + fields[1] + "'");
        }
        if (period < 1 || period > in.horizon)
            fail(origin + ":" + std::to_string(lineno) + ": period " + fields[1] +
                 " outside 1.." + std::to_string(in.horizon));
        const int c = in.crop_index(fields[2]);
        if (c < 0) fail(origin + ":" + std::to_string(lineno) + ": unknown crop '" + fields[2] + "'");
        if (plan.at(u, period - 1) != Plan::kFallow)
            fail(origin + ":" + std::to_string(lineno) + ": duplicate assignment for unit '" +
                 fields[0] + "' period " + fields[1]);
        plan.set(u, period - 1, c);
    }
    return plan;
}

Plan load_plan(const std::string& path, const PlanningInstance& in) {
    return plan_from_csv(read_text_file(path), in, path);
}

std::string states_to_text(const StateTrajectory& tr, const PlanningInstance& in) {
    json rows = json::array();
    for (int u = 0; u < tr.num_units; ++u)
        for (int t = 0; t <= tr.horizon; ++t) {
            const auto& s = tr.at(u, t);
            json row;
            row["unit"] = in.units[static_cast<std::size_t>(u)].id;
            row["period"] = t + 1; // state entering this period
            row["last_crop"] =
                s.last_crop ? json(in.crops[static_cast<std::size_t>(*s.last_crop)].id)
                            : json(nullptr);
            row["rotation_stress"] = s.rotation_stress;
            row["interaction_potential"] = s.interaction_potential;
            rows.push_back(std::move(row));
        }
    json doc;
    doc["version"] = 1;
    doc["horizon"] = tr.horizon;
    doc["states"] = std::move(rows);
    return doc.dump(2) + "\n";
}

void export_plan(const Plan& plan, const StateTrajectory& tr, const PlanningInstance& in,
                 const std::string& csv_path, const std::string& states_path) {
    write_text_file(csv_path, plan_to_csv(plan, in));
    write_text_file(states_path, states_to_text(tr, in));
}

std::string render_map_svg(const Plan& plan, const PlanningInstance& in, int period) {
    if (period < 0 || period >= plan.horizon)
        throw std::out_of_range("render_map: period " + std::to_string(period + 1) +
                                " outside 1.." + std::to_string(plan.horizon));
    int min_row = 1 << 30, max_row = -(1 << 30), min_col = 1 << 30, max_col = -(1 << 30);
    for (const auto& u : in.units)
        for (const auto& cell : u.cells) {
            min_row = std::min(min_row, cell.row);
            max_row = std::max(max_row, cell.row);
            min_col = std::min(min_col, cell.col);
            max_col = std::max(max_col, cell.col);
        }
    constexpr int cell_px = 16, margin = 8, legend_h = 40;
    const int grid_w = (max_col - min_col + 1) * cell_px;
    const int grid_h = (max_row - min_row + 1) * cell_px;
    const int width = grid_w + 2 * margin;
    const int height = grid_h + 2 * margin + legend_h;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"#f7f5f0\"/>\n";
    for (std::size_t u = 0; u < in.units.size(); ++u) {
        const int c = plan.at(static_cast<int>(u), period);
        const char* color = c == Plan::kFallow
                                ? kFallowColor
                                : category_color(in.crops[static_cast<std::size_t>(c)].category);
        svg << "<g><title>" << in.units[u].id << ": "
            << (c == Plan::kFallow ? "fallow" : in.crops[static_cast<std::size_t>(c)].id)
            << "</title>\n";
        for (const auto& cell : in.units[u].cells) {
            const int x = margin + (cell.col - min_col) * cell_px;
            const int y = margin + (cell.row - min_row) * cell_px;
            svg << "<rect class=\"cell\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_px
                << "\" height=\"" << cell_px << "\" fill=\"" << color
                << "\" stroke=\"#6b655c\" stroke-width=\"0.6\"/>\n";
        }
        svg << "</g>\n";
    }
    const std::pair<const char*, const char*> legend[] = {
        {"cereal", category_color(CropCategory::cereal)},
        {"legume", category_color(CropCategory::legume)},
        {"vegetable", category_color(CropCategory::vegetable)},
        {"fungus", category_color(CropCategory::fungus)},
        {"fallow", kFallowColor},
    };
    int x = margin;
    const int ly = grid_h + 2 * margin + 10;
    for (const auto& [label, color] : legend) {
        svg << "<rect x=\"" << x << "\" y=\"" << ly << "\" width=\"14\" height=\"14\" fill=\""
            << color << "\" stroke=\"#6b655c\" stroke-width=\"0.6\"/>\n";
        svg << "<text x=\"" << (x + 18) << "\" y=\"" << (ly + 12)
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#3a362f\">" << label
            << "</text>\n";
        x += 18 + 12 * static_cast<int>(std::string(label).size()) / 2 + 26;
    }
    svg << "</svg>\n";
    return svg.str();
}

void render_map(const Plan& plan, const PlanningInstance& in, int period,
                const std::string& path) {
    write_text_file(path, render_map_svg(plan, in, period));
}

std::string metrics_to_text(const PlanMetrics& m, double rho, int scenario_count,
                            std::uint64_t seed) {
    json doc;
    doc["unit"] = "CNY";
    doc["rho"] = rho;
    doc["scenario_count"] = scenario_count;
    doc["seed"] = seed;
    doc["total_expected_profit"] = m.total_expected_profit;
    doc["worst_case_profit"] = m.worst_case_profit;
    doc["volatility"] = m.volatility;
    doc["legume_ratio"] = m.legume_ratio;
    return doc.dump(2) + "\n";
}

std::string metrics_to_human(const PlanMetrics& m) {
    char buf[256];
    std::ostringstream out;
    std::snprintf(buf, sizeof(buf), "total expected profit: %10.1f (10^4 CNY)\n",
                  m.total_expected_profit / 1e4);
    out << buf;
    std::snprintf(buf, sizeof(buf), "worst-case profit:     %10.1f (10^4 CNY)\n",
                  m.worst_case_profit / 1e4);
    out << buf;
    std::snprintf(buf, sizeof(buf), "volatility:            %10.1f (10^4 CNY)\n",
                  m.volatility / 1e4);
    out << buf;
    std::snprintf(buf, sizeof(buf), "legume ratio:          %9.1f%%\n", m.legume_ratio * 100.0);
    out << buf;
    return out.str();
}

std::string sweep_to_csv(const std::vector<SweepPoint>& points) {
    std::ostringstream out;
    out << "rho,worst_case_profit\n";
    for (const auto& p : points)
        out << fmt_double(p.rho) << ',' << fmt_double(p.worst_case_profit) << '\n';
    return out.str();
}

std::string iteration_log_to_csv(const std::vector<IterationLogEntry>& log) {
    std::ostringstream out;
    out << "iter,temperature,current_value,best_value,accepted\n";
    for (const auto& e : log)
        out << e.iteration << ',' << fmt_double(e.temperature) << ','
            << fmt_double(e.current_value) << ',' << fmt_double(e.best_value) << ','
            << (e.accepted ? 1 : 0) << '\n';
    return out.str();
}

std::string read_text_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) fail("cannot open file: " + path);
    std::ostringstream out;
    out << file.rdbuf();
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) fail("cannot write file: " + path);
    file << content;
    if (!file) fail("write failed: " + path);
}

} // namespace mlrcpf
