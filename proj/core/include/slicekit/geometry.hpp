#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace slicekit {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
    friend bool operator==(Vec3 a, Vec3 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double length(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return length(b - a); }

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(Vec3 a) { return std::sqrt(dot(a, a)); }

/// Axis-aligned box in millimeters.
struct Box3 {
    Vec3 min;
    Vec3 max;

    Vec3 extent() const { return max - min; }
    friend bool operator==(const Box3&, const Box3&) = default;
};

struct Box2 {
    Vec2 min;
    Vec2 max;

    bool overlaps(const Box2& o) const {
        return min.x <= o.max.x && o.min.x <= max.x && min.y <= o.max.y && o.min.y <= max.y;
    }
};

struct Segment2 {
    Vec2 a;
    Vec2 b;
};

/// Closed polygon; the closing edge from back() to front() is implicit.
using Polygon = std::vector<Vec2>;

/// Shoelace area; positive for counter-clockwise rings.
double signed_area(std::span<const Vec2> ring);
double perimeter_length(std::span<const Vec2> ring);
Box2 bounding_box(std::span<const Vec2> ring);

/// Even-odd crossing test. Points exactly on the boundary may land on either
/// side.
bool point_in_polygon(Vec2 p, std::span<const Vec2> ring);

/// True when two non-adjacent edges of the ring touch or cross.
bool has_self_intersection(std::span<const Vec2> ring);

}  // namespace slicekit
