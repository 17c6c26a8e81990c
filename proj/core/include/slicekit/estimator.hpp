#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slicekit/gcode.hpp"
#include "slicekit/geometry.hpp"
#include "slicekit/machine.hpp"
#include "slicekit/profile.hpp"
#include "slicekit/toolpath.hpp"

namespace slicekit {

struct LayerEstimate {
    std::size_t index = 0;
    double z = 0.0;
    double time_s = 0.0;
    double extruded_volume = 0.0;  // mm^3
};

/// Build estimate in catalogue units: minutes, millimeters, grams.
struct Estimate {
    double build_time = 0.0;       // min, heat-up allowance included
    double motion_time_s = 0.0;    // moves and retractions only
    double heatup_s = 0.0;
    double filament_length = 0.0;  // mm of raw filament
    double extruded_volume = 0.0;  // mm^3
    double mass = 0.0;             // g
    std::vector<LayerEstimate> per_layer;  // plan estimates only
};

/// Time is move length over the capped feedrate (layer changes count their
/// Z travel), plus retraction and unretraction at retraction speed, plus the
/// profile's heat-up allowance. Volume is extruded length x bead area x
/// extrusion multiplier. `material_density` is g/mm^3.
Estimate estimate_plan(const ToolpathPlan& plan, const PrintProfile& profile, double material_density,
                       const MachineProfile& machine = {});

/// The same quantities from a kinematic replay of a program.
Estimate estimate_gcode(const GCodeProgram& program, const PrintProfile& profile, double material_density);

struct CostModel {
    double printer_unit_cost = 0.0;
    double traditional_setup_cost = 0.0;
    double traditional_unit_cost = 0.0;
};

struct BreakEvenRow {
    long long units = 0;
    double printing_cost = 0.0;
    double traditional_cost = 0.0;
};

struct BreakEven {
    std::vector<BreakEvenRow> rows;  // n = 1 .. max_units
    std::optional<long long> crossover;  // first n where traditional <= printing
};

/// Printing costs a flat amount per unit; traditional manufacturing pays a
/// setup cost once. Throws InvalidArgument on negative costs or max_units < 1.
BreakEven break_even(const CostModel& model, long long max_units);

std::string format_estimate_table(const Estimate& estimate, const Box3& bounds);
std::string estimate_to_json(const Estimate& estimate, const Box3& bounds);
std::string break_even_csv(const BreakEven& table);
std::string break_even_svg(const BreakEven& table);

}  // namespace slicekit
