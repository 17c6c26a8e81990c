#include "slicekit/toolpath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "parallel.hpp"
#include "slicekit/error.hpp"
#include "slicekit/flow_model.hpp"

namespace slicekit {

std::span<const ToolMove> ToolpathPlan::layer(std::size_t index) const {
    const std::size_t begin = layer_starts.at(index);
    const std::size_t end = index + 1 < layer_starts.size() ? layer_starts[index + 1] : moves.size();
    return std::span<const ToolMove>(moves).subspan(begin, end - begin);
}

std::vector<Region> islands_of(const ContourTree& tree) {
    std::vector<Region> islands;
    for (std::size_t outer : tree.outer_indices()) {
        Region r;
        r.outer = tree.contours[outer].points;
        for (std::size_t hole : tree.holes_of(outer)) r.holes.push_back(tree.contours[hole].points);
        islands.push_back(std::move(r));
    }
    return islands;
}

namespace {

// Miter tips may reach this many extrusion widths from the source corner.
constexpr double kMiterWidths = 2.0;

void orient(Polygon& ring, bool counter_clockwise) {
    if ((signed_area(ring) > 0) != counter_clockwise) std::reverse(ring.begin(), ring.end());
}

}  // namespace

PerimeterResult generate_perimeters(const ContourTree& tree, int perimeter_count, double extrusion_width,
                                    OutlineDirection direction) {
    if (perimeter_count < 1) throw Error(ErrorCode::InvalidArgument, "perimeter_count must be at least 1");
    if (!(extrusion_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "extrusion_width must be positive");

    const bool outer_ccw = direction == OutlineDirection::CounterClockwise;
    PerimeterResult result;
    const std::vector<Region> islands = islands_of(tree);
    for (std::size_t island = 0; island < islands.size(); ++island) {
        for (int i = 0; i < perimeter_count; ++i) {
            const double inset = (i + 0.5) * extrusion_width;
            const auto shrunk = offset_region(islands[island], inset, kMiterWidths * extrusion_width);
            if (shrunk.empty()) break;
            for (const Region& r : shrunk) {
                PerimeterLoop outer{r.outer, false, i, island};
                orient(outer.points, outer_ccw);
                result.loops.push_back(std::move(outer));
                for (const Polygon& h : r.holes) {
                    PerimeterLoop hole{h, true, i, island};
                    orient(hole.points, !outer_ccw);
                    result.loops.push_back(std::move(hole));
                }
            }
        }
    }
    result.collapsed = !tree.contours.empty() && result.loops.empty();
    return result;
}

std::vector<InfillRegion> infill_regions(const ContourTree& tree, int perimeter_count, double extrusion_width) {
    std::vector<InfillRegion> out;
    const std::vector<Region> islands = islands_of(tree);
    const double inset = perimeter_count * extrusion_width;
    for (std::size_t island = 0; island < islands.size(); ++island) {
        for (Region& r : offset_region(islands[island], inset, kMiterWidths * extrusion_width)) {
            out.push_back({island, std::move(r)});
        }
    }
    return out;
}

std::vector<Segment2> generate_infill(const Region& region, double infill_percent, double extrusion_width,
                                      double angle_deg) {
    if (!(infill_percent >= 0.0 && infill_percent <= 100.0)) {
        throw Error(ErrorCode::InvalidArgument, "infill_percent must be in [0, 100]");
    }
    if (!(extrusion_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "extrusion_width must be positive");
    std::vector<Segment2> lines;
    if (infill_percent == 0.0 || region.outer.size() < 3) return lines;

    const double spacing = extrusion_width / (infill_percent / 100.0);
    const double theta = angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    auto to_frame = [&](Vec2 p) { return Vec2{p.x * c + p.y * s, -p.x * s + p.y * c}; };
    auto from_frame = [&](Vec2 p) { return Vec2{p.x * c - p.y * s, p.x * s + p.y * c}; };

    std::vector<Polygon> rings;
    rings.reserve(region.holes.size() + 1);
    for (const Polygon* src : [&] {
             std::vector<const Polygon*> all{&region.outer};
             for (const Polygon& h : region.holes) all.push_back(&h);
             return all;
         }()) {
        Polygon r;
        r.reserve(src->size());
        for (const Vec2& p : *src) r.push_back(to_frame(p));
        rings.push_back(std::move(r));
    }

    double v_min = std::numeric_limits<double>::infinity();
    double v_max = -v_min;
    for (const Vec2& p : rings.front()) {
        v_min = std::min(v_min, p.y);
        v_max = std::max(v_max, p.y);
    }

    std::vector<double> hits;
    for (std::size_t k = 0;; ++k) {
        const double v = v_min + (static_cast<double>(k) + 0.5) * spacing;
        if (v >= v_max) break;
        hits.clear();
        for (const Polygon& ring : rings) {
            const std::size_t n = ring.size();
            for (std::size_t i = 0; i < n; ++i) {
                const Vec2 a = ring[i];
                const Vec2 b = ring[(i + 1) % n];
                if ((a.y > v) == (b.y > v)) continue;
                hits.push_back(a.x + (v - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        }
        std::sort(hits.begin(), hits.end());
        for (std::size_t i = 0; i + 1 < hits.size(); i += 2) {
            if (hits[i + 1] - hits[i] <= 1e-9) continue;
            lines.push_back({from_frame({hits[i], v}), from_frame({hits[i + 1], v})});
        }
    }
    return lines;
}

LayerFill assign_solid_layers(std::size_t layer_index, std::size_t total_layers, int top_count, int bottom_count) {
    const auto bottom = static_cast<std::size_t>(std::max(bottom_count, 0));
    const auto top = static_cast<std::size_t>(std::max(top_count, 0));
    if (layer_index < bottom) return LayerFill::Solid;
    if (layer_index + top >= total_layers) return LayerFill::Solid;
    return LayerFill::Sparse;
}

namespace {

bool lex_less(Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

struct NearestVertex {
    double dist = std::numeric_limits<double>::infinity();
    std::size_t index = 0;
};

NearestVertex nearest_vertex(const Polygon& ring, Vec2 from) {
    NearestVertex best;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const double d = distance(ring[i], from);
        if (d < best.dist || (d == best.dist && lex_less(ring[i], ring[best.index]))) best = {d, i};
    }
    return best;
}

class Linker {
public:
    explicit Linker(const LinkOptions& options) : opt_(options), pos_(options.start) {}

    void travel_to(Vec2 target) {
        if (target == pos_) return;
        const double len = distance(pos_, target);
        const bool retract = len > opt_.retraction_threshold;
        if (retract) moves_.push_back({MoveKind::Retract, pos_, pos_, opt_.z, opt_.retract_feedrate, 0.0});
        moves_.push_back({MoveKind::Travel, pos_, target, opt_.z, opt_.travel_feedrate, 0.0});
        if (retract) {
            moves_.push_back({MoveKind::Unretract, target, target, opt_.z, opt_.retract_feedrate, 0.0});
        }
        pos_ = target;
    }

    void extrude_to(Vec2 target) {
        if (target == pos_) return;
        moves_.push_back({MoveKind::Extrude, pos_, target, opt_.z, opt_.extrude_feedrate, opt_.width});
        pos_ = target;
    }

    void loop(const Polygon& ring) {
        if (ring.size() < 3) return;
        const std::size_t start = nearest_vertex(ring, pos_).index;
        travel_to(ring[start]);
        for (std::size_t step = 1; step <= ring.size(); ++step) extrude_to(ring[(start + step) % ring.size()]);
    }

    void line(Vec2 a, Vec2 b) {
        travel_to(a);
        extrude_to(b);
    }

    Vec2 position() const { return pos_; }
    std::vector<ToolMove> take() { return std::move(moves_); }

private:
    LinkOptions opt_;
    Vec2 pos_;
    std::vector<ToolMove> moves_;
};

/// Distance from `from` to where the island would be entered, plus an
/// order-independent tie-break anchor.
std::pair<double, Vec2> island_entry(const IslandPaths& island, Vec2 from) {
    double best = std::numeric_limits<double>::infinity();
    Vec2 anchor{best, best};
    int first_index = std::numeric_limits<int>::max();
    for (const PerimeterLoop& l : island.loops) first_index = std::min(first_index, l.perimeter_index);
    auto consider = [&](Vec2 p) {
        const double d = distance(p, from);
        if (d < best || (d == best && lex_less(p, anchor))) {
            best = d;
            anchor = p;
        }
    };
    for (const PerimeterLoop& l : island.loops) {
        if (l.perimeter_index != first_index) continue;
        for (const Vec2& p : l.points) consider(p);
    }
    if (island.loops.empty()) {
        for (const Segment2& s : island.infill) {
            consider(s.a);
            consider(s.b);
        }
    }
    return {best, anchor};
}

void link_island(const IslandPaths& island, Linker& linker) {
    std::vector<const PerimeterLoop*> loops;
    for (const PerimeterLoop& l : island.loops) loops.push_back(&l);
    std::stable_sort(loops.begin(), loops.end(), [](const PerimeterLoop* a, const PerimeterLoop* b) {
        return a->perimeter_index < b->perimeter_index;
    });
    std::vector<bool> done(loops.size(), false);
    for (std::size_t emitted = 0; emitted < loops.size(); ++emitted) {
        // Greedy within the lowest remaining perimeter index.
        std::optional<std::size_t> pick;
        NearestVertex pick_near;
        for (std::size_t i = 0; i < loops.size(); ++i) {
            if (done[i]) continue;
            if (pick && loops[i]->perimeter_index != loops[*pick]->perimeter_index) break;
            const NearestVertex nv = nearest_vertex(loops[i]->points, linker.position());
            if (!pick || nv.dist < pick_near.dist ||
                (nv.dist == pick_near.dist &&
                 lex_less(loops[i]->points[nv.index], loops[*pick]->points[pick_near.index]))) {
                pick = i;
                pick_near = nv;
            }
        }
        done[*pick] = true;
        linker.loop(loops[*pick]->points);
    }

    std::vector<bool> used(island.infill.size(), false);
    for (std::size_t emitted = 0; emitted < island.infill.size(); ++emitted) {
        const Vec2 at = linker.position();
        std::size_t pick = 0;
        bool reverse = false;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < island.infill.size(); ++i) {
            if (used[i]) continue;
            const double da = distance(island.infill[i].a, at);
            const double db = distance(island.infill[i].b, at);
            if (da < best) {
                best = da;
                pick = i;
                reverse = false;
            }
            if (db < best) {
                best = db;
                pick = i;
                reverse = true;
            }
        }
        used[pick] = true;
        const Segment2& s = island.infill[pick];
        if (reverse) linker.line(s.b, s.a); else linker.line(s.a, s.b);
    }
}

double snap(double v) {
    constexpr double kScale = 1e5;  // 1 / kPlanGrid, exact
    const double s = std::round(v * kScale) / kScale;
    return s == 0.0 ? 0.0 : s;  // no negative zero
}

Vec2 snap(Vec2 p) { return {snap(p.x), snap(p.y)}; }

Polygon snapped_ring(const Polygon& ring) {
    Polygon out;
    out.reserve(ring.size());
    for (const Vec2& p : ring) {
        const Vec2 q = snap(p);
        if (out.empty() || !(out.back() == q)) out.push_back(q);
    }
    while (out.size() > 1 && out.front() == out.back()) out.pop_back();
    return out;
}

}  // namespace

ToolpathPlan order_and_link(const std::vector<IslandPaths>& islands, const LinkOptions& options) {
    Linker linker(options);
    std::vector<bool> visited(islands.size(), false);
    for (std::size_t round = 0; round < islands.size(); ++round) {
        std::optional<std::size_t> pick;
        std::pair<double, Vec2> pick_key;
        for (std::size_t i = 0; i < islands.size(); ++i) {
            if (visited[i]) continue;
            const auto key = island_entry(islands[i], linker.position());
            if (!pick || key.first < pick_key.first ||
                (key.first == pick_key.first && lex_less(key.second, pick_key.second))) {
                pick = i;
                pick_key = key;
            }
        }
        visited[*pick] = true;
        link_island(islands[*pick], linker);
    }
    ToolpathPlan plan;
    plan.moves = linker.take();
    plan.layer_starts = {0};
    plan.layer_z = {options.z};
    return plan;
}

ToolpathPlan plan_print(const LayerStack& stack, const PrintProfile& profile, const MachineProfile& machine,
                        unsigned threads) {
    profile.validate();
    const double width = profile.extrusion_width();
    const double extrude_feed = cap_feedrate(profile.print_speed, profile.flow, machine);
    const double travel_feed = cap_travel_feedrate(profile.travel_speed, machine);
    const std::size_t total = stack.layers.size();

    struct LayerWork {
        std::vector<IslandPaths> islands;
        bool collapsed = false;
    };
    std::vector<LayerWork> work(total);
    detail::parallel_for(total, threads, [&](std::size_t k) {
        const ContourTree& tree = stack.layers[k].contours;
        const bool solid = assign_solid_layers(k, total, profile.top_layers, profile.bottom_layers) == LayerFill::Solid;
        const double density = solid ? 100.0 : profile.infill_percent;
        const double angle = (k % 2 == 0) ? profile.infill_angle : -profile.infill_angle;

        LayerWork& w = work[k];
        w.islands.resize(islands_of(tree).size());
        PerimeterResult perims = generate_perimeters(tree, profile.perimeter_count, width, profile.outline_direction);
        w.collapsed = perims.collapsed;
        for (PerimeterLoop& loop : perims.loops) {
            loop.points = snapped_ring(loop.points);
            if (loop.points.size() >= 3) w.islands[loop.island].loops.push_back(std::move(loop));
        }
        for (const InfillRegion& region : infill_regions(tree, profile.perimeter_count, width)) {
            for (const Segment2& s : generate_infill(region.region, density, width, angle)) {
                const Segment2 q{snap(s.a), snap(s.b)};
                if (!(q.a == q.b)) w.islands[region.island].infill.push_back(q);
            }
        }
    });

    ToolpathPlan plan;
    plan.profile = profile;
    Vec2 position{};
    for (std::size_t k = 0; k < total; ++k) {
        LinkOptions options;
        options.z = snap(stack.layers[k].z);
        options.width = width;
        options.extrude_feedrate = extrude_feed;
        options.travel_feedrate = travel_feed;
        options.retract_feedrate = profile.retraction_speed;
        options.retraction_threshold = profile.retraction_min_travel;
        options.start = position;

        ToolpathPlan layer = order_and_link(work[k].islands, options);
        plan.layer_starts.push_back(plan.moves.size());
        plan.layer_z.push_back(options.z);
        if (!layer.moves.empty() && layer.moves.front().kind == MoveKind::Extrude) {
            // The layer change rides on a travel; make sure there is one.
            plan.moves.push_back({MoveKind::Travel, position, position, options.z, travel_feed, 0.0});
        }
        for (const ToolMove& m : layer.moves) plan.moves.push_back(m);
        if (!layer.moves.empty()) position = layer.moves.back().end;

        if (work[k].collapsed) {
            std::ostringstream msg;
            msg << "layer " << k << " (z=" << options.z << "): perimeters collapse under offset, layer left empty";
            plan.warnings.push_back(msg.str());
        }
        for (const std::string& w : stack.layers[k].warnings) plan.warnings.push_back(w);
    }
    return plan;
}

}  // namespace slicekit
