#pragma once

#include "slicekit/flow_model.hpp"
#include "slicekit/machine.hpp"

namespace slicekit {

enum class OutlineDirection { CounterClockwise, Clockwise };

/// Process settings for one print. Layer height and extrusion width live in
/// `flow` so the bead geometry has a single source.
struct PrintProfile {
    FlowParameters flow{0.48, 0.2, 0.4};
    double infill_percent = 20.0;
    int perimeter_count = 2;
    int top_layers = 3;
    int bottom_layers = 3;
    double infill_angle = 45.0;  // degrees; alternates sign per layer
    OutlineDirection outline_direction = OutlineDirection::CounterClockwise;
    double print_speed = 100.0;           // mm/s
    double travel_speed = 150.0;          // mm/s
    double retraction_distance = 2.0;     // mm of filament
    double retraction_speed = 40.0;       // mm/s
    double retraction_min_travel = 2.0;   // mm; shorter travels skip retraction
    double nozzle_temp = 200.0;           // C
    double bed_temp = 60.0;               // C
    double heatup_allowance = 180.0;      // s added to build time estimates
    Material material;

    double layer_height() const { return flow.layer_height(); }
    double extrusion_width() const { return flow.extrusion_width(); }

    /// Throws Error(InvalidProfile) naming the first offending field.
    void validate() const;
};

}  // namespace slicekit
