#include "slicekit/slicer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "parallel.hpp"
#include "slicekit/error.hpp"

namespace slicekit {

double ContourTree::net_area() const {
    double total = 0.0;
    for (const Contour& c : contours) total += c.signed_area;
    return total;
}

std::vector<std::size_t> ContourTree::outer_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < contours.size(); ++i) {
        if (!contours[i].is_hole) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> ContourTree::holes_of(std::size_t outer) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < contours.size(); ++i) {
        if (contours[i].is_hole && contours[i].parent == outer) out.push_back(i);
    }
    return out;
}

std::vector<double> compute_layer_planes(const Box3& bounds, double layer_height,
                                         const MachineProfile& machine) {
    constexpr double kSlack = 1e-12;
    if (!std::isfinite(layer_height) || layer_height < machine.min_layer - kSlack ||
        layer_height > machine.max_layer + kSlack) {
        std::ostringstream msg;
        msg << "layer height " << layer_height << " mm is outside the machine resolution ["
            << machine.min_layer << ", " << machine.max_layer << "] mm";
        throw Error(ErrorCode::LayerHeightOutOfRange, msg.str());
    }
    const double height = bounds.max.z - bounds.min.z;
    if (!(height > 0.0)) return {};
    const auto count = static_cast<std::size_t>(std::ceil(height / layer_height - 1e-9));
    std::vector<double> planes;
    planes.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        planes.push_back(bounds.min.z + (static_cast<double>(k) + kLayerSampleFraction) * layer_height);
    }
    return planes;
}

namespace {

double nudged_plane(const TriangleMesh& mesh, double z) {
    for (int attempt = 0; attempt < 16; ++attempt) {
        const bool touches = std::any_of(mesh.vertices.begin(), mesh.vertices.end(), [&](const Vec3& v) {
            return std::abs(v.z - z) <= kVertexOnPlaneTolerance;
        });
        if (!touches) break;
        z += kPlaneNudge;
    }
    return z;
}

}  // namespace

std::vector<Segment2> slice_mesh_at(const TriangleMesh& mesh, double z) {
    std::vector<Segment2> segments;
    if (!std::isfinite(z) || mesh.empty()) return segments;
    const double plane = nudged_plane(mesh, z);

    // Interpolate along an edge in canonical vertex order so neighbouring
    // triangles produce bit-identical crossing points.
    auto crossing = [&](std::uint32_t i, std::uint32_t j) {
        if (i > j) std::swap(i, j);
        const Vec3 a = mesh.vertices[i];
        const Vec3 b = mesh.vertices[j];
        const double t = (plane - a.z) / (b.z - a.z);
        return Vec2{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    };

    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& idx = mesh.triangles[t];
        const std::array<double, 3> d = {mesh.vertices[idx[0]].z - plane, mesh.vertices[idx[1]].z - plane,
                                         mesh.vertices[idx[2]].z - plane};
        const int above = (d[0] > 0) + (d[1] > 0) + (d[2] > 0);
        const int below = (d[0] < 0) + (d[1] < 0) + (d[2] < 0);
        if (above == 0 || below == 0 || above + below != 3) continue;

        // The lone vertex is the one on the minority side.
        const bool lone_above = above == 1;
        int lone = 0;
        for (int c = 0; c < 3; ++c) {
            if ((d[c] > 0) == lone_above) lone = c;
        }
        const std::uint32_t v0 = idx[lone];
        const std::uint32_t v1 = idx[(lone + 1) % 3];
        const std::uint32_t v2 = idx[(lone + 2) % 3];
        Vec2 p = crossing(v0, v1);
        Vec2 q = crossing(v0, v2);
        if (p == q) continue;

        const auto c = mesh.corners(t);
        const Vec3 n = cross(c[1] - c[0], c[2] - c[0]);
        const Vec2 along{-n.y, n.x};  // z-axis cross normal: solid on the left
        if (dot(q - p, along) < 0) std::swap(p, q);
        segments.push_back({p, q});
    }
    return segments;
}

namespace {

struct GridKey {
    std::int64_t x, y;
    friend bool operator==(const GridKey&, const GridKey&) = default;
};

struct GridHash {
    std::size_t operator()(const GridKey& k) const noexcept {
        return std::hash<std::int64_t>{}(k.x) * 0x9e3779b97f4a7c15ull ^ std::hash<std::int64_t>{}(k.y);
    }
};

class PointIndex {
public:
    explicit PointIndex(double cell) : cell_(cell) {}

    void insert(Vec2 p, std::size_t id) { cells_[key(p)].push_back(id); }

    /// Lowest id whose point is within eps of p and accepted by the filter.
    template <typename Point, typename Accept>
    std::optional<std::size_t> nearest_id(Vec2 p, double eps, Point point_of, Accept accept) const {
        const GridKey home = key(p);
        std::optional<std::size_t> best;
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                const auto it = cells_.find({home.x + dx, home.y + dy});
                if (it == cells_.end()) continue;
                for (std::size_t id : it->second) {
                    if (!accept(id) || distance(point_of(id), p) > eps) continue;
                    if (!best || id < *best) best = id;
                }
            }
        }
        return best;
    }

private:
    GridKey key(Vec2 p) const {
        return {static_cast<std::int64_t>(std::floor(p.x / cell_)),
                static_cast<std::int64_t>(std::floor(p.y / cell_))};
    }

    double cell_;
    std::unordered_map<GridKey, std::vector<std::size_t>, GridHash> cells_;
};

Polygon simplify_loop(Polygon loop, double eps) {
    bool changed = true;
    while (changed && loop.size() >= 3) {
        changed = false;
        Polygon out;
        out.reserve(loop.size());
        const std::size_t n = loop.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 prev = out.empty() ? loop[(i + n - 1) % n] : out.back();
            const Vec2 cur = loop[i];
            const Vec2 next = loop[(i + 1) % n];
            if (distance(prev, cur) <= eps) {
                changed = true;
                continue;
            }
            const double chord = distance(prev, next);
            const double offset = std::abs(cross(cur - prev, next - prev));
            if (offset <= 1e-9 * std::max(chord, 1e-12)) {
                changed = true;
                continue;
            }
            out.push_back(cur);
        }
        loop = std::move(out);
    }
    return loop;
}

}  // namespace

StitchResult stitch_segments(const std::vector<Segment2>& segments, double eps) {
    StitchResult result;
    const std::size_t n = segments.size();
    if (n == 0) return result;

    PointIndex starts(eps);
    PointIndex ends(eps);
    for (std::size_t i = 0; i < n; ++i) {
        starts.insert(segments[i].a, i);
        ends.insert(segments[i].b, i);
    }
    // A plane grazing a vertex cuts slivers shorter than the weld distance;
    // their neighbours already meet within eps, so the slivers are dropped.
    std::vector<bool> used(n, false);
    for (std::size_t i = 0; i < n; ++i) used[i] = distance(segments[i].a, segments[i].b) <= eps;
    auto unused = [&](std::size_t id) { return !used[id]; };
    auto start_of = [&](std::size_t id) { return segments[id].a; };
    auto end_of = [&](std::size_t id) { return segments[id].b; };

    for (std::size_t seed = 0; seed < n; ++seed) {
        if (used[seed]) continue;
        used[seed] = true;
        Polygon chain{segments[seed].a, segments[seed].b};
        bool closed = false;
        while (true) {
            if (chain.size() >= 4 && distance(chain.back(), chain.front()) <= eps) {
                chain.pop_back();
                closed = true;
                break;
            }
            if (auto next = starts.nearest_id(chain.back(), eps, start_of, unused)) {
                used[*next] = true;
                chain.push_back(segments[*next].b);
                continue;
            }
            // Inconsistently wound facets leave reversed segments.
            if (auto next = ends.nearest_id(chain.back(), eps, end_of, unused)) {
                used[*next] = true;
                chain.push_back(segments[*next].a);
                continue;
            }
            break;
        }
        if (closed) {
            Polygon loop = simplify_loop(std::move(chain), eps);
            if (loop.size() >= 3) result.loops.push_back(std::move(loop));
            continue;
        }
        // Grow the open chain backwards so the report shows all of it.
        while (true) {
            if (auto prev = ends.nearest_id(chain.front(), eps, end_of, unused)) {
                used[*prev] = true;
                chain.insert(chain.begin(), segments[*prev].a);
                continue;
            }
            if (auto prev = starts.nearest_id(chain.front(), eps, start_of, unused)) {
                used[*prev] = true;
                chain.insert(chain.begin(), segments[*prev].b);
                continue;
            }
            break;
        }
        result.open_chains.push_back(std::move(chain));
    }
    return result;
}

ContourTree build_contour_tree(std::vector<Polygon> polygons) {
    std::erase_if(polygons, [](const Polygon& p) { return p.size() < 3; });
    const std::size_t n = polygons.size();

    std::vector<double> area(n);
    std::vector<Box2> box(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (has_self_intersection(polygons[i])) {
            std::ostringstream msg;
            msg << "contour " << i << " with " << polygons[i].size() << " points intersects itself near ("
                << polygons[i].front().x << ", " << polygons[i].front().y << ")";
            throw Error(ErrorCode::SelfIntersectingContour, msg.str());
        }
        area[i] = std::abs(signed_area(polygons[i]));
        box[i] = bounding_box(polygons[i]);
    }

    // j can contain i only if it is strictly larger, ties broken by index.
    auto larger = [&](std::size_t j, std::size_t i) {
        return area[j] > area[i] || (area[j] == area[i] && j < i);
    };
    auto contains = [&](std::size_t j, std::size_t i) {
        const Vec2 probe = polygons[i].front();
        return box[j].overlaps(box[i]) && point_in_polygon(probe, polygons[j]);
    };

    ContourTree tree;
    tree.contours.resize(n);
    std::vector<std::optional<std::size_t>> tightest(n);
    for (std::size_t i = 0; i < n; ++i) {
        int depth = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || !larger(j, i) || !contains(j, i)) continue;
            ++depth;
            if (!tightest[i] || area[j] < area[*tightest[i]]) tightest[i] = j;
        }
        tree.contours[i].depth = depth;
    }
    for (std::size_t i = 0; i < n; ++i) {
        Contour& c = tree.contours[i];
        c.is_hole = c.depth % 2 == 1;
        c.points = std::move(polygons[i]);
        const double a = signed_area(c.points);
        if ((c.is_hole && a > 0) || (!c.is_hole && a < 0)) std::reverse(c.points.begin(), c.points.end());
        c.signed_area = signed_area(c.points);
        if (c.is_hole) c.parent = tightest[i];
    }
    return tree;
}

LayerStack slice_all(const TriangleMesh& mesh, const PrintProfile& profile, const MachineProfile& machine,
                     unsigned threads) {
    LayerStack stack;
    stack.layer_height = profile.layer_height();
    const Box3 bounds = mesh_bounds(mesh);
    const std::vector<double> planes = compute_layer_planes(bounds, stack.layer_height, machine);
    stack.layers.resize(planes.size());

    detail::parallel_for(planes.size(), threads, [&](std::size_t k) {
        Layer& layer = stack.layers[k];
        layer.z = planes[k];
        StitchResult stitched = stitch_segments(slice_mesh_at(mesh, planes[k]));
        for (const Polygon& chain : stitched.open_chains) {
            std::ostringstream msg;
            msg << "open contour of " << chain.size() << " points at z=" << planes[k];
            layer.warnings.push_back(msg.str());
        }
        try {
            layer.contours = build_contour_tree(std::move(stitched.loops));
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "layer " << k << " (z=" << planes[k] << "): " << e.what();
            throw Error(e.code(), msg.str());
        }
    });
    return stack;
}

}  // namespace slicekit
