#include <regex>
#include <string>

#include <gtest/gtest.h>

#include "slicekit/primitives.hpp"
#include "slicekit/slicer.hpp"
#include "slicekit/svg.hpp"
#include "test_support.hpp"

using namespace slicekit;

namespace {

std::string contour_path(const std::string& svg) {
    const auto start = svg.find("id=\"contours\"");
    const auto d = svg.find(" d=\"", start) + 4;
    return svg.substr(d, svg.find('"', d) - d);
}

std::size_t count_commands(const std::string& d, char letter) {
    std::size_t n = 0;
    for (char c : d) n += c == letter;
    return n;
}

}  // namespace

TEST(Svg, PathPointCountEqualsContourPointCount) {
    const LayerStack stack = slice_all(normalize_placement(make_icosphere(10.0, 3)), PrintProfile{});
    const Layer& layer = stack.layers[stack.layers.size() / 2];
    std::size_t points = 0;
    for (const Contour& c : layer.contours.contours) points += c.points.size();
    const std::string d = contour_path(render_layer_svg(layer, {}, {{80, 80}, {100, 100}}));
    EXPECT_EQ(count_commands(d, 'M') + count_commands(d, 'L'), points);
    EXPECT_EQ(count_commands(d, 'M'), layer.contours.contours.size());
    EXPECT_EQ(count_commands(d, 'Z'), layer.contours.contours.size());
}

TEST(Svg, HolesUseEvenOddSubpaths) {
    const LayerStack stack = slice_all(test::square_tube(20, 8, 1), PrintProfile{});
    const std::string svg = render_layer_svg(stack.layers[0], {}, {{-10, -10}, {10, 10}});
    EXPECT_NE(svg.find("fill-rule=\"evenodd\""), std::string::npos);
    EXPECT_EQ(count_commands(contour_path(svg), 'M'), 2u);
}

TEST(Svg, CoordinatesFlipYIntoTheCanvas) {
    Layer layer;
    layer.contours = build_contour_tree({{{0, 0}, {10, 0}, {10, 10}, {0, 10}}});
    const std::string svg = render_layer_svg(layer, {}, {{0, 0}, {10, 10}}, {1.0, true});
    EXPECT_NE(svg.find("viewBox=\"0 0 12.000 12.000\""), std::string::npos);
    // (0, 0) is bottom left: x = margin, y = height - margin.
    EXPECT_NE(contour_path(svg).find("1.000 11.000"), std::string::npos);
}

TEST(Svg, ToolpathOverlay) {
    const TriangleMesh cube = normalize_placement(make_box({10, 10, 2}));
    const LayerStack stack = slice_all(cube, PrintProfile{});
    const ToolpathPlan plan = plan_print(stack, PrintProfile{});
    const std::string svg = render_layer_svg(stack.layers[3], plan.layer(3), {{85, 85}, {95, 95}});
    std::size_t extrusions = 0;
    for (const ToolMove& m : plan.layer(3)) extrusions += m.kind == MoveKind::Extrude;
    const std::regex bead("stroke=\"#d35400\"");
    EXPECT_EQ(static_cast<std::size_t>(std::distance(std::sregex_iterator(svg.begin(), svg.end(), bead),
                                                     std::sregex_iterator())),
              extrusions);
    EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
    EXPECT_EQ(svg, render_layer_svg(stack.layers[3], plan.layer(3), {{85, 85}, {95, 95}}));
}
