#pragma once

#include <string>
#include <vector>

#include "slicekit/mesh_io.hpp"

namespace slicekit {

/// Axis-aligned box with outward-facing winding, 8 vertices and 12 triangles.
TriangleMesh make_box(Vec3 size, Vec3 origin = {});

/// Subdivided icosahedron with vertices projected onto the sphere.
/// Level n has 20 * 4^n triangles (level 3 = 1280).
TriangleMesh make_icosphere(double radius, int subdivisions, Vec3 center = {});

/// Icosphere scaled per axis so its bounding box is `extents`.
TriangleMesh make_ellipsoid(Vec3 extents, int subdivisions, Vec3 center = {});

/// Rounded stand-ins for the catalogue of printed parts. Only the bounding
/// dimensions follow the catalogue; the shapes are ellipsoids.
struct ProxyModel {
    std::string name;
    Vec3 dimensions;
    TriangleMesh mesh;
};

/// keyring, flag_stand, vase, skull, in increasing bounding volume.
std::vector<ProxyModel> proxy_models(int subdivisions = 3);

}  // namespace slicekit
