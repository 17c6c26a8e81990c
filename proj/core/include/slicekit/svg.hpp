#pragma once

#include <span>
#include <string>

#include "slicekit/geometry.hpp"
#include "slicekit/slicer.hpp"
#include "slicekit/toolpath.hpp"

namespace slicekit {

struct SvgOptions {
    double margin = 2.0;  // mm around the view box
    bool show_travel = true;
};

/// One layer as an SVG document in millimeter units, Y pointing up.
///
/// All contours share a single `<path id="contours">` with the even-odd fill
/// rule, one subpath per contour and one coordinate pair per contour point,
/// so holes render as holes. Moves, when given, are drawn on top: extrusions
/// as solid lines, travels dashed. `view` fixes the canvas so every layer of
/// a part lines up.
std::string render_layer_svg(const Layer& layer, std::span<const ToolMove> moves, const Box2& view,
                             const SvgOptions& options = {});

}  // namespace slicekit
