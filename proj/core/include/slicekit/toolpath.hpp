#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "slicekit/geometry.hpp"
#include "slicekit/machine.hpp"
#include "slicekit/profile.hpp"
#include "slicekit/slicer.hpp"

namespace slicekit {

/// Plan coordinates are snapped to the emitter's 5-decimal grid so an emitted
/// program replays exactly the geometry that was planned.
inline constexpr double kPlanGrid = 1e-5;

enum class MoveKind { Extrude, Travel, Retract, Unretract };

struct ToolMove {
    MoveKind kind = MoveKind::Travel;
    Vec2 start;
    Vec2 end;
    double z = 0.0;
    double feedrate = 0.0;  // mm/s; retraction speed for Retract/Unretract
    double width = 0.0;     // Extrude only

    double xy_length() const { return distance(start, end); }
};

struct ToolpathPlan {
    std::vector<ToolMove> moves;
    std::vector<std::size_t> layer_starts;  // index of each layer's first move
    std::vector<double> layer_z;
    PrintProfile profile;
    std::vector<std::string> warnings;

    std::size_t layer_count() const { return layer_starts.size(); }
    std::span<const ToolMove> layer(std::size_t index) const;
};

/// A solid island: counter-clockwise outer ring and clockwise holes.
struct Region {
    Polygon outer;
    std::vector<Polygon> holes;
};

std::vector<Region> islands_of(const ContourTree& tree);

/// Shrink a region by `inward` mm. Miter joins are clamped to `miter_limit`
/// mm from the source corner; regions that vanish are dropped.
std::vector<Region> offset_region(const Region& region, double inward, double miter_limit);

struct PerimeterLoop {
    Polygon points;
    bool is_hole = false;
    int perimeter_index = 0;  // 0 = outermost
    std::size_t island = 0;
};

struct PerimeterResult {
    std::vector<PerimeterLoop> loops;
    bool collapsed = false;  // contours existed but every loop vanished
};

/// Loop i is the contour inset by (i + 0.5) * extrusion_width. Outer loops
/// run in `direction`, hole loops the opposite way.
PerimeterResult generate_perimeters(const ContourTree& tree, int perimeter_count, double extrusion_width,
                                    OutlineDirection direction = OutlineDirection::CounterClockwise);

struct InfillRegion {
    std::size_t island = 0;
    Region region;
};

/// Area left for infill inside the innermost perimeter.
std::vector<InfillRegion> infill_regions(const ContourTree& tree, int perimeter_count, double extrusion_width);

/// Rectilinear raster at angle_deg with spacing width / (percent / 100),
/// clipped to the region. Lines sit at half a spacing from the region's
/// extreme in the perpendicular direction.
std::vector<Segment2> generate_infill(const Region& region, double infill_percent, double extrusion_width,
                                      double angle_deg);

enum class LayerFill { Solid, Sparse };

LayerFill assign_solid_layers(std::size_t layer_index, std::size_t total_layers, int top_count, int bottom_count);

struct IslandPaths {
    std::vector<PerimeterLoop> loops;
    std::vector<Segment2> infill;
};

struct LinkOptions {
    double z = 0.0;
    double width = 0.4;
    double extrude_feedrate = 100.0;
    double travel_feedrate = 150.0;
    double retract_feedrate = 40.0;
    double retraction_threshold = 2.0;
    Vec2 start{};  // nozzle position before the layer
};

/// Order one layer: islands nearest-first from the start position; inside an
/// island, perimeters outermost first and then infill. Travels longer than
/// the threshold are wrapped in Retract/Unretract.
ToolpathPlan order_and_link(const std::vector<IslandPaths>& islands, const LinkOptions& options);

/// Full pipeline from sliced layers to a linked, capped plan.
ToolpathPlan plan_print(const LayerStack& stack, const PrintProfile& profile, const MachineProfile& machine = {},
                        unsigned threads = 0);

}  // namespace slicekit
