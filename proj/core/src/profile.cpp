#include "slicekit/profile.hpp"

#include <cmath>
#include <sstream>

#include "slicekit/error.hpp"

namespace slicekit {

namespace {

[[noreturn]] void reject(const std::string& field, const std::string& why) {
    throw Error(ErrorCode::InvalidProfile, field + ": " + why);
}

void require_positive(const std::string& field, double v) {
    if (!std::isfinite(v) || v <= 0.0) reject(field, "must be positive");
}

void require_non_negative(const std::string& field, double v) {
    if (!std::isfinite(v) || v < 0.0) reject(field, "must be non-negative");
}

}  // namespace

void MachineProfile::validate() const {
    require_positive("build_x", build_volume.x);
    require_positive("build_y", build_volume.y);
    require_positive("build_z", build_volume.z);
    require_positive("min_speed", min_speed);
    require_positive("max_speed", max_speed);
    require_positive("min_layer", min_layer);
    require_positive("max_layer", max_layer);
    if (min_speed > max_speed) reject("min_speed", "exceeds max_speed");
    if (min_layer > max_layer) reject("min_layer", "exceeds max_layer");
}

void Material::validate() const {
    require_positive("density", density);
    if (!std::isfinite(min_temp) || !std::isfinite(max_temp) || min_temp > max_temp) {
        reject("min_temp", "temperature range is empty");
    }
}

void PrintProfile::validate() const {
    material.validate();
    if (!std::isfinite(infill_percent) || infill_percent < 0.0 || infill_percent > 100.0) {
        reject("infill_percent", "must be in [0, 100]");
    }
    if (perimeter_count < 1) reject("perimeter_count", "must be at least 1");
    if (top_layers < 0) reject("top_layers", "must be non-negative");
    if (bottom_layers < 0) reject("bottom_layers", "must be non-negative");
    if (!std::isfinite(infill_angle)) reject("infill_angle", "must be finite");
    require_positive("print_speed", print_speed);
    require_positive("travel_speed", travel_speed);
    require_non_negative("retraction_distance", retraction_distance);
    require_positive("retraction_speed", retraction_speed);
    require_non_negative("retraction_min_travel", retraction_min_travel);
    require_non_negative("bed_temp", bed_temp);
    require_non_negative("heatup_allowance", heatup_allowance);
    if (!std::isfinite(nozzle_temp) || nozzle_temp < material.min_temp ||
        nozzle_temp > material.max_temp) {
        std::ostringstream msg;
        msg << nozzle_temp << " C is outside the " << material.name << " range ["
            << material.min_temp << ", " << material.max_temp << "]";
        reject("nozzle_temp", msg.str());
    }
}

}  // namespace slicekit
