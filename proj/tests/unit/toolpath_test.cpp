#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <gtest/gtest.h>

#include "slicekit/primitives.hpp"
#include "slicekit/slicer.hpp"
#include "slicekit/toolpath.hpp"
#include "test_support.hpp"

using namespace slicekit;
using slicekit::test::square_region;

namespace {

ContourTree tree_of(std::vector<Polygon> polys) { return build_contour_tree(std::move(polys)); }

double total_length(const std::vector<Segment2>& segs) {
    double sum = 0.0;
    for (const Segment2& s : segs) sum += distance(s.a, s.b);
    return sum;
}

// Exact length of horizontal chords of a convex polygon, for the raster-sum
// oracle: sum over scan lines of the clipped chord.
double chord(const Polygon& convex, double y) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < convex.size(); ++i) {
        const Vec2 a = convex[i], b = convex[(i + 1) % convex.size()];
        if ((a.y - y) * (b.y - y) > 0 || a.y == b.y) continue;
        const double x = a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return hi > lo ? hi - lo : 0.0;
}

bool on_grid(double v) { return std::abs(v * 1e5 - std::round(v * 1e5)) < 1e-6; }

}  // namespace

TEST(Perimeters, LoopsAreInsetByHalfWidthSteps) {
    const ContourTree tree = tree_of({{{0, 0}, {10, 0}, {10, 10}, {0, 10}}});
    const PerimeterResult r = generate_perimeters(tree, 3, 0.4);
    ASSERT_EQ(r.loops.size(), 3u);
    EXPECT_FALSE(r.collapsed);
    for (const PerimeterLoop& loop : r.loops) {
        const double inset = (loop.perimeter_index + 0.5) * 0.4;
        const Box2 b = bounding_box(loop.points);
        EXPECT_NEAR(b.min.x, inset, 1e-9);
        EXPECT_NEAR(b.max.y, 10 - inset, 1e-9);
        EXPECT_GT(signed_area(loop.points), 0.0);
        EXPECT_NEAR(signed_area(loop.points), std::pow(10 - 2 * inset, 2), 1e-9);
    }
}

TEST(Perimeters, HoleLoopsRunOpposite) {
    const ContourTree tree = tree_of({{{0, 0}, {20, 0}, {20, 20}, {0, 20}}, {{6, 6}, {14, 6}, {14, 14}, {6, 14}}});
    for (OutlineDirection dir : {OutlineDirection::CounterClockwise, OutlineDirection::Clockwise}) {
        const PerimeterResult r = generate_perimeters(tree, 2, 0.5, dir);
        int holes = 0;
        for (const PerimeterLoop& loop : r.loops) {
            const bool ccw = signed_area(loop.points) > 0;
            const bool outer_ccw = dir == OutlineDirection::CounterClockwise;
            EXPECT_EQ(ccw, loop.is_hole ? !outer_ccw : outer_ccw);
            if (loop.is_hole) {
                ++holes;
                // Hole loops grow outward from the hole.
                const Box2 b = bounding_box(loop.points);
                EXPECT_NEAR(b.min.x, 6 - (loop.perimeter_index + 0.5) * 0.5, 1e-9);
            }
        }
        EXPECT_EQ(holes, 2);
    }
}

TEST(Perimeters, ThinSliverCollapses) {
    const ContourTree tree = tree_of({{{0, 0}, {10, 0}, {10, 0.3}, {0, 0.3}}});
    const PerimeterResult r = generate_perimeters(tree, 2, 0.48);
    EXPECT_TRUE(r.loops.empty());
    EXPECT_TRUE(r.collapsed);
}

TEST(Offset, RegionWithHoleShrinksBothWays) {
    Region ring = square_region(20);
    ring.holes.push_back({{5, 5}, {5, 15}, {15, 15}, {15, 5}});
    const auto out = offset_region(ring, 1.0, 2.0);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_NEAR(signed_area(out[0].outer), 18 * 18, 1e-9);
    ASSERT_EQ(out[0].holes.size(), 1u);
    EXPECT_NEAR(signed_area(out[0].holes[0]), -12 * 12, 1e-9);
}

TEST(Offset, DumbbellSplitsIntoTwoIslands) {
    // Two 10 mm squares joined by a 1 mm neck.
    const Region dumbbell{{{0, 0}, {10, 0}, {10, 4.5}, {15, 4.5}, {15, 0}, {25, 0}, {25, 10}, {15, 10},
                           {15, 5.5}, {10, 5.5}, {10, 10}, {0, 10}},
                          {}};
    EXPECT_EQ(offset_region(dumbbell, 0.2, 0.4).size(), 1u);
    EXPECT_EQ(offset_region(dumbbell, 0.7, 1.4).size(), 2u);
}

TEST(Infill, ZeroPercentIsEmpty) {
    EXPECT_TRUE(generate_infill(square_region(20), 0.0, 0.4, 45.0).empty());
}

TEST(Infill, SolidSpacingEqualsWidth) {
    const auto lines = generate_infill(square_region(10), 100.0, 0.5, 0.0);
    ASSERT_EQ(lines.size(), 20u);
    std::vector<double> ys;
    for (const Segment2& s : lines) {
        EXPECT_DOUBLE_EQ(s.a.y, s.b.y);
        ys.push_back(s.a.y);
    }
    std::sort(ys.begin(), ys.end());
    EXPECT_NEAR(ys.front(), 0.25, 1e-12);
    for (std::size_t i = 1; i < ys.size(); ++i) EXPECT_NEAR(ys[i] - ys[i - 1], 0.5, 1e-9);
}

TEST(Infill, SparseLengthMatchesRasterOracle) {
    // Rotated square (diamond) at 0 degrees: sum the exact chords at the same
    // scan positions the generator uses.
    const Polygon diamond{{10, 0}, {20, 10}, {10, 20}, {0, 10}};
    const double width = 0.4, spacing = width / 0.2;
    double oracle = 0.0;
    for (double y = spacing / 2; y < 20; y += spacing) oracle += chord(diamond, y);
    const double got = total_length(generate_infill({diamond, {}}, 20.0, width, 0.0));
    EXPECT_NEAR(got, oracle, 1e-9);
    // Area x density / width is the continuous estimate.
    EXPECT_NEAR(got, 200.0 * 0.2 / width, 0.05 * 100.0);
}

TEST(Infill, TwentyPercentSquareIsAboutTwoHundredMillimeters) {
    for (double angle : {0.0, 45.0, -45.0, 10.0}) {
        const double len = total_length(generate_infill(square_region(20), 20.0, 0.4, angle));
        EXPECT_NEAR(len, 200.0, 10.0) << angle;
    }
}

TEST(Infill, LinesFollowTheAngle) {
    for (double angle : {45.0, -45.0, 30.0}) {
        const double a = angle * std::numbers::pi / 180.0;
        for (const Segment2& s : generate_infill(square_region(20), 30.0, 0.4, angle)) {
            const Vec2 d = s.b - s.a;
            EXPECT_NEAR(std::abs(cross(d, {std::cos(a), std::sin(a)})), 0.0, 1e-9 * length(d));
        }
    }
}

TEST(Infill, StaysOutOfHoles) {
    Region ring = square_region(20);
    ring.holes.push_back({{5, 5}, {5, 15}, {15, 15}, {15, 5}});
    const auto lines = generate_infill(ring, 50.0, 0.4, 45.0);
    ASSERT_FALSE(lines.empty());
    for (const Segment2& s : lines) {
        const Vec2 mid = (s.a + s.b) * 0.5;
        EXPECT_TRUE(point_in_polygon(mid, ring.outer));
        EXPECT_FALSE(point_in_polygon(mid, ring.holes[0]));
    }
}

TEST(Infill, RegionIsInsideInnermostPerimeter) {
    const ContourTree tree = tree_of({{{0, 0}, {10, 0}, {10, 10}, {0, 10}}});
    const auto regions = infill_regions(tree, 2, 0.5);
    ASSERT_EQ(regions.size(), 1u);
    const Box2 b = bounding_box(regions[0].region.outer);
    EXPECT_NEAR(b.min.x, 1.0, 1e-9);
    EXPECT_NEAR(b.max.x, 9.0, 1e-9);
}

TEST(SolidLayers, TopAndBottomBands) {
    EXPECT_EQ(assign_solid_layers(0, 10, 3, 3), LayerFill::Solid);
    EXPECT_EQ(assign_solid_layers(2, 10, 3, 3), LayerFill::Solid);
    EXPECT_EQ(assign_solid_layers(3, 10, 3, 3), LayerFill::Sparse);
    EXPECT_EQ(assign_solid_layers(6, 10, 3, 3), LayerFill::Sparse);
    EXPECT_EQ(assign_solid_layers(7, 10, 3, 3), LayerFill::Solid);
    EXPECT_EQ(assign_solid_layers(5, 10, 0, 0), LayerFill::Sparse);
}

TEST(Linking, IslandOrderMatchesBruteForceTour) {
    // Five short segments on a line, stored out of order. Either end of a
    // segment may be entered, so search all 5! orders times 2^5 directions.
    const std::vector<double> xs{30, 10, 40, 0, 20};
    std::vector<IslandPaths> islands;
    for (double x : xs) islands.push_back({{}, {Segment2{{x, 0}, {x, 0.5}}}});
    LinkOptions opt;
    opt.start = {-5, 0};

    std::vector<std::size_t> perm(xs.size()), best;
    std::iota(perm.begin(), perm.end(), 0);
    double best_len = std::numeric_limits<double>::infinity();
    do {
        for (unsigned flips = 0; flips < (1u << xs.size()); ++flips) {
            Vec2 at = opt.start;
            double len = 0.0;
            for (std::size_t k = 0; k < perm.size(); ++k) {
                const bool up = !((flips >> k) & 1u);
                len += distance(at, {xs[perm[k]], up ? 0.0 : 0.5});
                at = {xs[perm[k]], up ? 0.5 : 0.0};
            }
            if (len < best_len) {
                best_len = len;
                best = perm;
            }
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    const ToolpathPlan plan = order_and_link(islands, opt);
    std::vector<double> visited;
    double travel = 0.0;
    for (const ToolMove& m : plan.moves) {
        if (m.kind == MoveKind::Extrude) visited.push_back(m.start.x);
        if (m.kind == MoveKind::Travel) travel += m.xy_length();
    }
    ASSERT_EQ(visited.size(), 5u);
    for (std::size_t i = 0; i < best.size(); ++i) EXPECT_EQ(visited[i], xs[best[i]]);
    EXPECT_NEAR(travel, best_len, 1e-12);
}

TEST(Linking, LongTravelsAreRetracted) {
    std::vector<IslandPaths> islands{{{}, {Segment2{{0, 0}, {1, 0}}}}, {{}, {Segment2{{1.5, 0}, {2.5, 0}}}},
                                     {{}, {Segment2{{10, 0}, {11, 0}}}}};
    LinkOptions opt;
    opt.retraction_threshold = 2.0;
    const ToolpathPlan plan = order_and_link(islands, opt);
    std::vector<MoveKind> kinds;
    for (const ToolMove& m : plan.moves) kinds.push_back(m.kind);
    const std::vector<MoveKind> want{MoveKind::Extrude, MoveKind::Travel, MoveKind::Extrude, MoveKind::Retract,
                                     MoveKind::Travel,  MoveKind::Unretract, MoveKind::Extrude};
    EXPECT_EQ(kinds, want);
}

TEST(Linking, PerimetersOutermostFirstThenInfill) {
    const ContourTree tree = tree_of({{{0, 0}, {10, 0}, {10, 10}, {0, 10}}});
    const PerimeterResult perims = generate_perimeters(tree, 3, 0.4);
    IslandPaths island{perims.loops, generate_infill(infill_regions(tree, 3, 0.4)[0].region, 20, 0.4, 45)};
    std::reverse(island.loops.begin(), island.loops.end());
    const ToolpathPlan plan = order_and_link({island}, LinkOptions{});
    // Track bead distance from the center; perimeters step inward, then infill.
    std::vector<double> inset;
    for (const ToolMove& m : plan.moves) {
        if (m.kind != MoveKind::Extrude) continue;
        inset.push_back(std::min({m.start.x, m.start.y, 10 - m.start.x, 10 - m.start.y}));
    }
    ASSERT_GE(inset.size(), 12u);
    for (int i = 0; i < 12; ++i) EXPECT_NEAR(inset[i], (i / 4 + 0.5) * 0.4, 1e-9) << i;
    for (std::size_t i = 12; i < inset.size(); ++i) EXPECT_GE(inset[i], 1.2 - 1e-9);
}

TEST(PlanPrint, CoordinatesSitOnTheEmitGrid) {
    const TriangleMesh sphere = normalize_placement(make_icosphere(8.0, 3));
    const ToolpathPlan plan = plan_print(slice_all(sphere, PrintProfile{}), PrintProfile{});
    ASSERT_FALSE(plan.moves.empty());
    for (const ToolMove& m : plan.moves) {
        EXPECT_TRUE(on_grid(m.start.x) && on_grid(m.start.y) && on_grid(m.end.x) && on_grid(m.end.y) && on_grid(m.z));
    }
}

TEST(PlanPrint, OneBlockPerLayerWithRisingZ) {
    const LayerStack stack = slice_all(normalize_placement(make_box({10, 10, 3})), PrintProfile{});
    const ToolpathPlan plan = plan_print(stack, PrintProfile{});
    ASSERT_EQ(plan.layer_count(), stack.layers.size());
    for (std::size_t k = 0; k < plan.layer_count(); ++k) {
        const auto moves = plan.layer(k);
        ASSERT_FALSE(moves.empty());
        EXPECT_EQ(moves.front().kind == MoveKind::Travel || moves.front().kind == MoveKind::Retract, true);
        for (const ToolMove& m : moves) EXPECT_EQ(m.z, plan.layer_z[k]);
        if (k > 0) EXPECT_GT(plan.layer_z[k], plan.layer_z[k - 1]);
    }
}

TEST(PlanPrint, FeedratesAreCapped) {
    PrintProfile fast;
    fast.print_speed = 400.0;
    fast.travel_speed = 400.0;
    const ToolpathPlan plan = plan_print(slice_all(normalize_placement(make_box({5, 5, 1})), fast), fast);
    for (const ToolMove& m : plan.moves) {
        if (m.kind == MoveKind::Extrude) EXPECT_DOUBLE_EQ(m.feedrate, 10.0 / 0.096);
        if (m.kind == MoveKind::Travel) EXPECT_EQ(m.feedrate, 150.0);
    }
}

TEST(PlanPrint, DeterministicAcrossThreadCounts) {
    const LayerStack stack = slice_all(normalize_placement(make_icosphere(9.0, 3)), PrintProfile{});
    const ToolpathPlan a = plan_print(stack, PrintProfile{}, MachineProfile{}, 1);
    const ToolpathPlan b = plan_print(stack, PrintProfile{}, MachineProfile{}, 8);
    ASSERT_EQ(a.moves.size(), b.moves.size());
    for (std::size_t i = 0; i < a.moves.size(); ++i) {
        EXPECT_EQ(a.moves[i].start, b.moves[i].start);
        EXPECT_EQ(a.moves[i].end, b.moves[i].end);
    }
}
