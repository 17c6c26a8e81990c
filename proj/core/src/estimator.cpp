#include "slicekit/estimator.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "slicekit/error.hpp"
#include "slicekit/flow_model.hpp"

namespace slicekit {

Estimate estimate_plan(const ToolpathPlan& plan, const PrintProfile& profile, double material_density,
                       const MachineProfile& machine) {
    const FlowParameters& flow = profile.flow;
    const double bead = print_area(flow) * flow.extrusion_multiplier();

    Estimate est;
    double z = 0.0;  // homed
    for (std::size_t layer = 0; layer < plan.layer_count(); ++layer) {
        LayerEstimate le{layer, plan.layer_z[layer], 0.0, 0.0};
        for (const ToolMove& m : plan.layer(layer)) {
            switch (m.kind) {
                case MoveKind::Travel:
                case MoveKind::Extrude: {
                    const double feed = m.kind == MoveKind::Extrude ? cap_feedrate(m.feedrate, flow, machine)
                                                                    : cap_travel_feedrate(m.feedrate, machine);
                    const double path = std::hypot(m.xy_length(), m.z - z);
                    z = m.z;
                    le.time_s += path / feed;
                    if (m.kind == MoveKind::Extrude) le.extruded_volume += m.xy_length() * bead;
                    break;
                }
                case MoveKind::Retract:
                case MoveKind::Unretract:
                    if (profile.retraction_distance > 0.0) le.time_s += profile.retraction_distance / m.feedrate;
                    break;
            }
        }
        est.motion_time_s += le.time_s;
        est.extruded_volume += le.extruded_volume;
        est.per_layer.push_back(le);
    }
    est.heatup_s = profile.heatup_allowance;
    est.build_time = (est.motion_time_s + est.heatup_s) / 60.0;
    est.filament_length = est.extruded_volume / filament_cross_section(flow);
    est.mass = est.extruded_volume * material_density;
    return est;
}

Estimate estimate_gcode(const GCodeProgram& program, const PrintProfile& profile, double material_density) {
    const MachineState state = simulate_state(program);
    Estimate est;
    est.motion_time_s = state.time_s;
    // The allowance covers the heat-and-wait, so only programs that wait pay it.
    const bool heats = std::any_of(program.commands.begin(), program.commands.end(), [](const GCodeCommand& c) {
        return c.opcode == Opcode::M109 && c.arg('S').value_or(0.0) > 0.0;
    });
    est.heatup_s = heats ? profile.heatup_allowance : 0.0;
    est.build_time = (est.motion_time_s + est.heatup_s) / 60.0;
    est.filament_length = state.extruded;
    est.extruded_volume = state.extruded * filament_cross_section(profile.flow);
    est.mass = est.extruded_volume * material_density;
    return est;
}

BreakEven break_even(const CostModel& model, long long max_units) {
    if (max_units < 1) throw Error(ErrorCode::InvalidArgument, "max_units must be at least 1");
    for (double v : {model.printer_unit_cost, model.traditional_setup_cost, model.traditional_unit_cost}) {
        if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::InvalidArgument, "costs must be non-negative");
    }
    BreakEven table;
    table.rows.reserve(static_cast<std::size_t>(max_units));
    for (long long n = 1; n <= max_units; ++n) {
        const double units = static_cast<double>(n);
        BreakEvenRow row{n, units * model.printer_unit_cost,
                         model.traditional_setup_cost + units * model.traditional_unit_cost};
        if (!table.crossover && row.traditional_cost <= row.printing_cost) table.crossover = n;
        table.rows.push_back(row);
    }
    return table;
}

namespace {

std::string fixed(double v, int digits) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
    std::string s(buf.data(), ptr);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

std::string dimensions(const Box3& bounds) {
    const Vec3 e = bounds.extent();
    return fixed(e.x, 1) + "x" + fixed(e.y, 1) + "x" + fixed(e.z, 1);
}

}  // namespace

std::string format_estimate_table(const Estimate& estimate, const Box3& bounds) {
    std::ostringstream out;
    const std::string dims = dimensions(bounds);
    const std::size_t w = std::max<std::size_t>(dims.size(), 14) + 2;
    auto pad = [](std::string s, std::size_t width) {
        s.resize(std::max(width, s.size()), ' ');
        return s;
    };
    out << pad("Dimension (mm)", w) << pad("Material Usage (gm)", 21) << "Built Time (min)\n";
    out << pad(dims, w) << pad(fixed(estimate.mass, 2), 21) << fixed(estimate.build_time, 1) << '\n';
    out << "filament " << fixed(estimate.filament_length, 1) << " mm, volume " << fixed(estimate.extruded_volume, 1)
        << " mm^3, motion " << fixed(estimate.motion_time_s, 1) << " s + heat-up " << fixed(estimate.heatup_s, 1)
        << " s\n";
    return out.str();
}

std::string estimate_to_json(const Estimate& estimate, const Box3& bounds) {
    const Vec3 e = bounds.extent();
    nlohmann::json doc;
    doc["dimensions_mm"] = {e.x, e.y, e.z};
    doc["mass_g"] = estimate.mass;
    doc["build_time_min"] = estimate.build_time;
    doc["motion_time_s"] = estimate.motion_time_s;
    doc["heatup_s"] = estimate.heatup_s;
    doc["filament_length_mm"] = estimate.filament_length;
    doc["extruded_volume_mm3"] = estimate.extruded_volume;
    nlohmann::json layers = nlohmann::json::array();
    for (const LayerEstimate& l : estimate.per_layer) {
        layers.push_back({{"index", l.index}, {"z", l.z}, {"time_s", l.time_s}, {"volume_mm3", l.extruded_volume}});
    }
    doc["layers"] = std::move(layers);
    return doc.dump(2) + "\n";
}

std::string break_even_csv(const BreakEven& table) {
    std::string out = "units,printing_cost,traditional_cost\n";
    for (const BreakEvenRow& r : table.rows) {
        out += std::to_string(r.units) + ',' + fixed(r.printing_cost, 2) + ',' + fixed(r.traditional_cost, 2) + '\n';
    }
    return out;
}

std::string break_even_svg(const BreakEven& table) {
    constexpr double kWidth = 640, kHeight = 400, kLeft = 70, kRight = 20, kTop = 30, kBottom = 50;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const double max_n = table.rows.empty() ? 1.0 : static_cast<double>(table.rows.back().units);
    double max_cost = 0.0;
    for (const BreakEvenRow& r : table.rows) max_cost = std::max({max_cost, r.printing_cost, r.traditional_cost});
    if (max_cost <= 0.0) max_cost = 1.0;

    auto px = [&](double n) { return fixed(kLeft + plot_w * (max_n > 1 ? (n - 1) / (max_n - 1) : 0.5), 2); };
    auto py = [&](double c) { return fixed(kTop + plot_h * (1.0 - c / max_cost), 2); };

    // Both curves are straight lines; a polyline through a sample keeps files small.
    const std::size_t stride = std::max<std::size_t>(1, table.rows.size() / 200);
    auto polyline = [&](bool printing) {
        std::string pts;
        for (std::size_t i = 0; i < table.rows.size(); i += stride) {
            const BreakEvenRow& r = table.rows[i];
            pts += px(static_cast<double>(r.units)) + ',' + py(printing ? r.printing_cost : r.traditional_cost) + ' ';
        }
        if (!table.rows.empty() && (table.rows.size() - 1) % stride != 0) {
            const BreakEvenRow& r = table.rows.back();
            pts += px(static_cast<double>(r.units)) + ',' + py(printing ? r.printing_cost : r.traditional_cost) + ' ';
        }
        if (!pts.empty()) pts.pop_back();
        return pts;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "  <line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
        << kTop + plot_h << "\" stroke=\"black\"/>\n";
    svg << "  <line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
        << "\" stroke=\"black\"/>\n";
    svg << "  <text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15
        << "\" text-anchor=\"middle\" font-size=\"12\">units produced (1.." << fixed(max_n, 0) << ")</text>\n";
    svg << "  <text x=\"15\" y=\"" << kTop + plot_h / 2 << "\" font-size=\"12\" transform=\"rotate(-90 15 "
        << kTop + plot_h / 2 << ")\" text-anchor=\"middle\">total cost (max " << fixed(max_cost, 2) << ")</text>\n";
    svg << "  <polyline id=\"printing\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"" << polyline(true)
        << "\"/>\n";
    svg << "  <polyline id=\"traditional\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\""
        << polyline(false) << "\"/>\n";
    svg << "  <text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 15
        << "\" font-size=\"12\" fill=\"#1f77b4\">3D printing</text>\n";
    svg << "  <text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 30
        << "\" font-size=\"12\" fill=\"#d62728\">traditional</text>\n";
    if (table.crossover) {
        const BreakEvenRow& r = table.rows[static_cast<std::size_t>(*table.crossover - 1)];
        svg << "  <circle id=\"crossover\" cx=\"" << px(static_cast<double>(r.units)) << "\" cy=\""
            << py(r.traditional_cost) << "\" r=\"4\" fill=\"black\"/>\n";
        svg << "  <text x=\"" << px(static_cast<double>(r.units)) << "\" y=\"" << py(r.traditional_cost)
            << "\" dx=\"6\" dy=\"-6\" font-size=\"12\">n* = " << r.units << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace slicekit
