#include "slicekit/primitives.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "slicekit/error.hpp"

namespace slicekit {

TriangleMesh make_box(Vec3 size, Vec3 origin) {
    TriangleMesh mesh;
    for (int i = 0; i < 8; ++i) {
        mesh.vertices.push_back({origin.x + ((i & 1) ? size.x : 0.0),
                                 origin.y + ((i & 2) ? size.y : 0.0),
                                 origin.z + ((i & 4) ? size.z : 0.0)});
    }
    // Vertex i has bit 0 = +x, bit 1 = +y, bit 2 = +z. Counter-clockwise seen from outside.
    mesh.triangles = {
        {0, 2, 1}, {1, 2, 3},  // z-
        {4, 5, 6}, {5, 7, 6},  // z+
        {0, 1, 4}, {1, 5, 4},  // y-
        {2, 6, 3}, {3, 6, 7},  // y+
        {0, 4, 2}, {2, 4, 6},  // x-
        {1, 3, 5}, {3, 7, 5},  // x+
    };
    return clean_mesh(mesh).mesh;
}

TriangleMesh make_icosphere(double radius, int subdivisions, Vec3 center) {
    return make_ellipsoid({2 * radius, 2 * radius, 2 * radius}, subdivisions, center);
}

TriangleMesh make_ellipsoid(Vec3 extents, int subdivisions, Vec3 center) {
    if (subdivisions < 0 || subdivisions > 8) {
        throw Error(ErrorCode::InvalidArgument, "icosphere subdivisions must be in [0, 8]");
    }
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> unit = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
                              {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
                              {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    auto normalize = [](Vec3 v) { return v * (1.0 / length(v)); };
    for (Vec3& v : unit) v = normalize(v);

    std::vector<std::array<std::uint32_t, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
        {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};

    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
        auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
            const auto key = std::minmax(a, b);
            const auto [it, inserted] = midpoints.try_emplace({key.first, key.second}, 0u);
            if (inserted) {
                it->second = static_cast<std::uint32_t>(unit.size());
                unit.push_back(normalize(unit[a] + unit[b]));
            }
            return it->second;
        };
        std::vector<std::array<std::uint32_t, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const std::uint32_t ab = midpoint(f[0], f[1]);
            const std::uint32_t bc = midpoint(f[1], f[2]);
            const std::uint32_t ca = midpoint(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }

    TriangleMesh mesh;
    mesh.vertices.reserve(unit.size());
    for (const Vec3& u : unit) {
        mesh.vertices.push_back({center.x + 0.5 * extents.x * u.x, center.y + 0.5 * extents.y * u.y,
                                 center.z + 0.5 * extents.z * u.z});
    }
    mesh.triangles = std::move(faces);
    return clean_mesh(mesh).mesh;
}

std::vector<ProxyModel> proxy_models(int subdivisions) {
    const std::vector<std::pair<std::string, Vec3>> catalogue = {
        {"keyring", {20, 27, 5}},
        {"flag_stand", {70, 69, 26}},
        {"vase", {70, 70, 90}},
        {"skull", {130, 101, 148}},
    };
    std::vector<ProxyModel> models;
    for (const auto& [name, dims] : catalogue) {
        models.push_back({name, dims, make_ellipsoid(dims, subdivisions, {0, 0, dims.z / 2})});
    }
    return models;
}

}  // namespace slicekit
