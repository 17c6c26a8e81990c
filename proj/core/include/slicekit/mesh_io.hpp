#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "slicekit/geometry.hpp"
#include "slicekit/machine.hpp"

namespace slicekit {

/// Vertices closer than this (per axis) are merged into one index.
inline constexpr double kWeldTolerance = 1e-6;
/// Triangles with smaller area are degenerate and dropped by clean_mesh.
inline constexpr double kDegenerateArea = 1e-9;

/// Indexed triangle mesh in millimeters. Normals are always recomputed from
/// the vertex winding; normals stored in the source file are ignored.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
    std::vector<Vec3> facet_normals;

    bool empty() const { return triangles.empty(); }
    std::array<Vec3, 3> corners(std::size_t triangle) const;
    double triangle_area(std::size_t triangle) const;
};

struct MeshReport {
    std::size_t triangle_count = 0;
    bool is_watertight = false;
    std::size_t non_manifold_edge_count = 0;   // undirected edges used by more than 2 triangles
    std::size_t boundary_edge_count = 0;       // edges used exactly once
    std::size_t inconsistent_edge_count = 0;   // 2 uses with the same orientation
    std::size_t degenerate_triangle_count = 0;
    Box3 bounds;
};

enum class StlFormat { Binary, Ascii };

/// Ascii only when the data starts with `solid` and also parses as ASCII
/// STL; a `solid` header on a binary body is common and not trusted.
StlFormat detect_format(std::span<const std::uint8_t> bytes);

/// Parse binary or ASCII STL and weld coincident vertices. The result has
/// exactly as many triangles as the file declares.
TriangleMesh parse_stl(std::span<const std::uint8_t> bytes);
TriangleMesh read_stl_file(const std::filesystem::path& path);

std::vector<std::uint8_t> write_binary_stl(const TriangleMesh& mesh, std::string_view header = {});
std::string write_ascii_stl(const TriangleMesh& mesh, std::string_view name = "slicekit");

/// Build an indexed mesh from a triangle soup (three corners per triangle).
TriangleMesh weld_triangle_soup(std::span<const std::array<Vec3, 3>> soup);

struct CleanedMesh {
    TriangleMesh mesh;
    std::size_t dropped_triangles = 0;
};

/// Drop degenerate triangles and vertices no triangle references.
CleanedMesh clean_mesh(const TriangleMesh& mesh);

MeshReport validate_mesh(const TriangleMesh& mesh);

/// Throws Error(EmptyMesh) when the mesh has no vertices.
Box3 mesh_bounds(const TriangleMesh& mesh);

bool fits_build_volume(const Box3& bounds, const MachineProfile& machine);

/// Translate so the bottom sits at z = 0 and the XY bounds are centered on
/// the bed. Idempotent.
TriangleMesh normalize_placement(const TriangleMesh& mesh, const MachineProfile& machine = {});

TriangleMesh translated(const TriangleMesh& mesh, Vec3 offset);

}  // namespace slicekit
