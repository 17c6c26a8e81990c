// Inward polygon offsetting backed by Boost.Geometry's buffer: edges are
// shifted along their normals, reflex corners get clamped miter joins, and the
// self-overlaps the shift creates are removed by the library's traversal.

// The default integer rescaling in overlay moves offset edges by ~1e-6 mm.
#define BOOST_GEOMETRY_NO_ROBUSTNESS
#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>

#include <algorithm>

#include "slicekit/toolpath.hpp"

namespace bg = boost::geometry;

namespace slicekit {

namespace {

using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint, /*ClockWise=*/false, /*Closed=*/true>;
using BgMulti = bg::model::multi_polygon<BgPolygon>;

void append_ring(const Polygon& ring, BgPolygon::ring_type& out) {
    out.clear();
    for (const Vec2& p : ring) out.emplace_back(p.x, p.y);
    if (!ring.empty()) out.emplace_back(ring.front().x, ring.front().y);
}

Polygon to_ring(const BgPolygon::ring_type& ring) {
    Polygon out;
    out.reserve(ring.size());
    for (const BgPoint& p : ring) out.push_back({p.x(), p.y()});
    if (out.size() > 1 && out.front() == out.back()) out.pop_back();
    return out;
}

}  // namespace

std::vector<Region> offset_region(const Region& region, double inward, double miter_limit) {
    if (region.outer.size() < 3) return {};
    BgPolygon source;
    append_ring(region.outer, source.outer());
    for (const Polygon& hole : region.holes) {
        if (hole.size() < 3) continue;
        source.inners().emplace_back();
        append_ring(hole, source.inners().back());
    }
    bg::correct(source);

    if (inward <= 0.0) return {region};

    // Boost measures the miter limit in multiples of the offset distance.
    const double ratio = std::max(1.0, miter_limit / inward);
    BgMulti result;
    bg::buffer(source, result, bg::strategy::buffer::distance_symmetric<double>(-inward),
               bg::strategy::buffer::side_straight(), bg::strategy::buffer::join_miter(ratio),
               bg::strategy::buffer::end_flat(), bg::strategy::buffer::point_square());

    std::vector<Region> out;
    for (const BgPolygon& poly : result) {
        Region r;
        r.outer = to_ring(poly.outer());
        if (r.outer.size() < 3 || signed_area(r.outer) <= 0.0) continue;
        for (const auto& inner : poly.inners()) {
            Polygon hole = to_ring(inner);
            if (hole.size() >= 3) r.holes.push_back(std::move(hole));
        }
        out.push_back(std::move(r));
    }
    // Deterministic order: by lowest-left outer vertex.
    auto anchor = [](const Region& r) {
        return *std::min_element(r.outer.begin(), r.outer.end(), [](Vec2 a, Vec2 b) {
            return a.x < b.x || (a.x == b.x && a.y < b.y);
        });
    };
    std::sort(out.begin(), out.end(), [&](const Region& a, const Region& b) {
        const Vec2 pa = anchor(a);
        const Vec2 pb = anchor(b);
        return pa.x < pb.x || (pa.x == pb.x && pa.y < pb.y);
    });
    return out;
}

}  // namespace slicekit
