#pragma once

#include "slicekit/machine.hpp"

namespace slicekit {

/// Bead and filament geometry for one extrusion setup. Construction enforces
/// the physical invariants, so every instance is printable geometry.
///
/// The bead is modeled as a plain width x height rectangle. Real beads have
/// rounded flanks, so volumes computed here run roughly 7% high.
class FlowParameters {
public:
    static constexpr double kDefaultFilamentDiameter = 1.75;
    static constexpr double kDefaultMaxMeltRate = 10.0;  // mm^3/s, PLA hotend

    /// Throws Error(InvalidFlowParameters) when any invariant fails:
    ///   0 < layer_height <= 0.8 * nozzle_diameter
    ///   extrusion_width >= nozzle_diameter
    ///   0 < extrusion_multiplier <= 2, filament_diameter > 0, max_melt_rate > 0
    FlowParameters(double extrusion_width, double layer_height, double nozzle_diameter,
                   double filament_diameter = kDefaultFilamentDiameter,
                   double extrusion_multiplier = 1.0,
                   double max_melt_rate = kDefaultMaxMeltRate);

    double extrusion_width() const { return extrusion_width_; }
    double layer_height() const { return layer_height_; }
    double nozzle_diameter() const { return nozzle_diameter_; }
    double filament_diameter() const { return filament_diameter_; }
    double extrusion_multiplier() const { return extrusion_multiplier_; }
    double max_melt_rate() const { return max_melt_rate_; }

    FlowParameters with_layer_height(double h) const;
    FlowParameters with_extrusion_width(double w) const;
    FlowParameters with_multiplier(double m) const;
    FlowParameters with_max_melt_rate(double rate) const;

    friend bool operator==(const FlowParameters&, const FlowParameters&) = default;

private:
    double extrusion_width_;
    double layer_height_;
    double nozzle_diameter_;
    double filament_diameter_;
    double extrusion_multiplier_;
    double max_melt_rate_;
};

/// Bead cross-section, extrusion width x layer height (mm^2).
double print_area(const FlowParameters& flow);

/// Volumetric melt flow at a given print speed (mm^3/s).
double melt_volume_rate(double print_speed, const FlowParameters& flow);

/// Fastest speed the hotend can feed: melt capacity over bead area (mm/s).
double max_print_speed(const FlowParameters& flow);

/// Clamp an extrusion feedrate into [min_speed, min(max_speed, melt cap)].
/// Throws InfeasibleFlow when the melt cap is below the machine minimum,
/// and InvalidArgument for non-positive requests.
double cap_feedrate(double requested, const FlowParameters& flow, const MachineProfile& machine);

/// Travel moves carry no plastic, so only the machine range applies.
double cap_travel_feedrate(double requested, const MachineProfile& machine);

/// Cross-section of the raw filament (mm^2).
double filament_cross_section(const FlowParameters& flow);

/// Millimeters of filament pushed per millimeter of XY bead, including the
/// extrusion multiplier.
double extrusion_feed_per_mm(const FlowParameters& flow);

}  // namespace slicekit
