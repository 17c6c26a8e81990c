#include "slicekit/flow_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "slicekit/error.hpp"

namespace slicekit {

namespace {

[[noreturn]] void reject(const std::string& what) {
    throw Error(ErrorCode::InvalidFlowParameters, "invalid flow parameters: " + what);
}

bool finite_all(std::initializer_list<double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

FlowParameters::FlowParameters(double extrusion_width, double layer_height, double nozzle_diameter,
                               double filament_diameter, double extrusion_multiplier,
                               double max_melt_rate)
    : extrusion_width_(extrusion_width),
      layer_height_(layer_height),
      nozzle_diameter_(nozzle_diameter),
      filament_diameter_(filament_diameter),
      extrusion_multiplier_(extrusion_multiplier),
      max_melt_rate_(max_melt_rate) {
    if (!finite_all({extrusion_width, layer_height, nozzle_diameter, filament_diameter,
                     extrusion_multiplier, max_melt_rate})) {
        reject("non-finite value");
    }
    if (nozzle_diameter <= 0.0) reject("nozzle_diameter must be positive");
    if (layer_height <= 0.0 || layer_height > 0.8 * nozzle_diameter) {
        std::ostringstream msg;
        msg << "layer_height " << layer_height << " must be in (0, " << 0.8 * nozzle_diameter
            << "] for a " << nozzle_diameter << " mm nozzle";
        reject(msg.str());
    }
    if (extrusion_width < nozzle_diameter) {
        std::ostringstream msg;
        msg << "extrusion_width " << extrusion_width << " is narrower than the nozzle ("
            << nozzle_diameter << ")";
        reject(msg.str());
    }
    if (extrusion_multiplier <= 0.0 || extrusion_multiplier > 2.0) {
        reject("extrusion_multiplier must be in (0, 2]");
    }
    if (filament_diameter <= 0.0) reject("filament_diameter must be positive");
    if (max_melt_rate <= 0.0) reject("max_melt_rate must be positive");
}

FlowParameters FlowParameters::with_layer_height(double h) const {
    return {extrusion_width_, h, nozzle_diameter_, filament_diameter_, extrusion_multiplier_,
            max_melt_rate_};
}

FlowParameters FlowParameters::with_extrusion_width(double w) const {
    return {w, layer_height_, nozzle_diameter_, filament_diameter_, extrusion_multiplier_,
            max_melt_rate_};
}

FlowParameters FlowParameters::with_multiplier(double m) const {
    return {extrusion_width_, layer_height_, nozzle_diameter_, filament_diameter_, m,
            max_melt_rate_};
}

FlowParameters FlowParameters::with_max_melt_rate(double rate) const {
    return {extrusion_width_, layer_height_, nozzle_diameter_, filament_diameter_,
            extrusion_multiplier_, rate};
}

double print_area(const FlowParameters& flow) {
    return flow.extrusion_width() * flow.layer_height();
}

double melt_volume_rate(double print_speed, const FlowParameters& flow) {
    if (!(print_speed >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "print speed must be non-negative");
    }
    return print_speed * print_area(flow);
}

double max_print_speed(const FlowParameters& flow) {
    return flow.max_melt_rate() / print_area(flow);
}

double cap_feedrate(double requested, const FlowParameters& flow, const MachineProfile& machine) {
    if (!(requested > 0.0) || !std::isfinite(requested)) {
        throw Error(ErrorCode::InvalidArgument, "requested feedrate must be positive");
    }
    const double melt_cap = max_print_speed(flow);
    if (melt_cap < machine.min_speed) {
        std::ostringstream msg;
        msg << "melt capacity allows at most " << melt_cap << " mm/s but the machine prints no "
            << "slower than " << machine.min_speed << " mm/s";
        throw Error(ErrorCode::InfeasibleFlow, msg.str());
    }
    const double upper = std::min(machine.max_speed, melt_cap);
    return std::clamp(requested, machine.min_speed, upper);
}

double cap_travel_feedrate(double requested, const MachineProfile& machine) {
    if (!(requested > 0.0) || !std::isfinite(requested)) {
        throw Error(ErrorCode::InvalidArgument, "requested feedrate must be positive");
    }
    return std::clamp(requested, machine.min_speed, machine.max_speed);
}

double filament_cross_section(const FlowParameters& flow) {
    const double d = flow.filament_diameter();
    return std::numbers::pi * d * d / 4.0;
}

double extrusion_feed_per_mm(const FlowParameters& flow) {
    return flow.extrusion_multiplier() * print_area(flow) / filament_cross_section(flow);
}

}  // namespace slicekit
