#pragma once

#include <string>

#include "slicekit/geometry.hpp"

namespace slicekit {

/// Printer envelope. Defaults describe the Delta printer: 180 x 180 x 320 mm
/// build volume, 80-150 mm/s print speeds, 50-200 micron layers.
struct MachineProfile {
    Vec3 build_volume{180.0, 180.0, 320.0};
    double min_speed = 80.0;   // mm/s
    double max_speed = 150.0;  // mm/s
    double min_layer = 0.05;   // mm
    double max_layer = 0.2;    // mm

    Vec2 bed_center() const { return {build_volume.x / 2.0, build_volume.y / 2.0}; }

    /// Throws Error(InvalidProfile) on non-positive or inverted ranges.
    void validate() const;

    friend bool operator==(const MachineProfile&, const MachineProfile&) = default;
};

struct Material {
    std::string name = "PLA";
    double density = 1.24;     // g/cm^3
    double min_temp = 180.0;   // C
    double max_temp = 200.0;   // C

    double density_g_per_mm3() const { return density * 1e-3; }

    void validate() const;

    friend bool operator==(const Material&, const Material&) = default;
};

}  // namespace slicekit
