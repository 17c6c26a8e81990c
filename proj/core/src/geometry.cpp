#include "slicekit/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace slicekit {

double signed_area(std::span<const Vec2> ring) {
    const std::size_t n = ring.size();
    if (n < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = ring[i];
        const Vec2 b = ring[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    return 0.5 * twice;
}

double perimeter_length(std::span<const Vec2> ring) {
    const std::size_t n = ring.size();
    if (n < 2) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += distance(ring[i], ring[(i + 1) % n]);
    return total;
}

Box2 bounding_box(std::span<const Vec2> ring) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    Box2 box{{inf, inf}, {-inf, -inf}};
    for (const Vec2& p : ring) {
        box.min.x = std::min(box.min.x, p.x);
        box.min.y = std::min(box.min.y, p.y);
        box.max.x = std::max(box.max.x, p.x);
        box.max.y = std::max(box.max.y, p.y);
    }
    return box;
}

bool point_in_polygon(Vec2 p, std::span<const Vec2> ring) {
    bool inside = false;
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = ring[i];
        const Vec2 b = ring[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

namespace {

double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_touch(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    const double d1 = orient(q1, q2, p1);
    const double d2 = orient(q1, q2, p2);
    const double d3 = orient(p1, p2, q1);
    const double d4 = orient(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return true;
    }
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

}  // namespace

bool has_self_intersection(std::span<const Vec2> ring) {
    const std::size_t n = ring.size();
    if (n < 4) return false;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto min_x = [&](std::size_t e) { return std::min(ring[e].x, ring[(e + 1) % n].x); };
    auto max_x = [&](std::size_t e) { return std::max(ring[e].x, ring[(e + 1) % n].x); };
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return min_x(a) < min_x(b); });

    for (std::size_t oi = 0; oi < n; ++oi) {
        const std::size_t e = order[oi];
        const double reach = max_x(e);
        for (std::size_t oj = oi + 1; oj < n && min_x(order[oj]) <= reach; ++oj) {
            const std::size_t f = order[oj];
            const bool adjacent = (e + 1) % n == f || (f + 1) % n == e;
            if (adjacent) continue;
            if (segments_touch(ring[e], ring[(e + 1) % n], ring[f], ring[(f + 1) % n])) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace slicekit
