#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "slicekit/geometry.hpp"
#include "slicekit/machine.hpp"
#include "slicekit/mesh_io.hpp"
#include "slicekit/profile.hpp"

namespace slicekit {

/// Planes sit at the middle of each layer, never at its bottom.
inline constexpr double kLayerSampleFraction = 0.5;
/// A plane this close to a vertex is nudged up by kPlaneNudge.
inline constexpr double kVertexOnPlaneTolerance = 1e-9;
inline constexpr double kPlaneNudge = 1e-7;
/// Segment endpoints closer than this chain together.
inline constexpr double kStitchTolerance = 1e-4;

struct Contour {
    Polygon points;   // closure implicit; first point != last point
    bool is_hole = false;
    std::optional<std::size_t> parent;  // holes only: enclosing outer contour
    int depth = 0;                      // containment depth; even = outer
    double signed_area = 0.0;           // > 0 outer (CCW), < 0 hole (CW)
};

/// Contours of one layer with their even-odd nesting.
struct ContourTree {
    std::vector<Contour> contours;

    /// Sum of signed areas: net solid cross-section.
    double net_area() const;
    std::vector<std::size_t> outer_indices() const;
    std::vector<std::size_t> holes_of(std::size_t outer) const;
};

struct Layer {
    double z = 0.0;
    ContourTree contours;
    std::vector<std::string> warnings;  // open contours and similar
};

struct LayerStack {
    std::vector<Layer> layers;
    double layer_height = 0.0;
};

/// z_k = z_min + (k + 0.5) * layer_height for k < ceil(height / layer_height).
/// Throws LayerHeightOutOfRange outside [machine.min_layer, machine.max_layer].
std::vector<double> compute_layer_planes(const Box3& bounds, double layer_height,
                                         const MachineProfile& machine = {});

/// One segment per triangle crossing the plane, oriented so the solid lies to
/// the left (outer boundaries run counter-clockwise).
std::vector<Segment2> slice_mesh_at(const TriangleMesh& mesh, double z);

struct StitchResult {
    std::vector<Polygon> loops;        // closed, collinear runs merged
    std::vector<Polygon> open_chains;  // chains that could not close within eps
};

StitchResult stitch_segments(const std::vector<Segment2>& segments, double eps = kStitchTolerance);

/// Nest closed polygons by containment depth and reorient them (outer CCW,
/// hole CW). Throws SelfIntersectingContour.
ContourTree build_contour_tree(std::vector<Polygon> polygons);

/// Slice every plane. Layers are computed independently, possibly on several
/// threads, and the stack is identical regardless of thread count.
LayerStack slice_all(const TriangleMesh& mesh, const PrintProfile& profile,
                     const MachineProfile& machine = {}, unsigned threads = 0);

}  // namespace slicekit
