#include "slicekit/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <sstream>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "slicekit/error.hpp"

namespace slicekit {

namespace {

constexpr std::size_t kHeaderSize = 80;
constexpr std::size_t kRecordSize = 50;

std::uint32_t read_u32_le(const std::uint8_t* p) {
    return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
           (std::uint32_t{p[3]} << 24);
}

void write_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void write_f32_le(std::vector<std::uint8_t>& out, double v) {
    write_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

Vec3 require_finite(Vec3 v) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
        throw Error(ErrorCode::NonFiniteCoordinate, "STL contains a non-finite vertex coordinate");
    }
    return v;
}

using Soup = std::vector<std::array<Vec3, 3>>;

Soup parse_binary(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderSize + 4) {
        throw Error(ErrorCode::TruncatedFile, "binary STL shorter than its 84-byte preamble");
    }
    const std::uint32_t count = read_u32_le(bytes.data() + kHeaderSize);
    const std::uint64_t expected = kHeaderSize + 4 + std::uint64_t{kRecordSize} * count;
    if (bytes.size() != expected) {
        std::ostringstream msg;
        msg << "binary STL declares " << count << " triangles (" << expected << " bytes) but has "
            << bytes.size() << " bytes";
        throw Error(ErrorCode::TruncatedFile, msg.str());
    }
    Soup soup;
    soup.reserve(count);
    const std::uint8_t* record = bytes.data() + kHeaderSize + 4;
    for (std::uint32_t t = 0; t < count; ++t, record += kRecordSize) {
        std::array<Vec3, 3> tri;
        for (int c = 0; c < 3; ++c) {
            // Skip the 12-byte stored normal.
            const std::uint8_t* p = record + 12 + 12 * c;
            const float x = std::bit_cast<float>(read_u32_le(p));
            const float y = std::bit_cast<float>(read_u32_le(p + 4));
            const float z = std::bit_cast<float>(read_u32_le(p + 8));
            tri[c] = require_finite({x, y, z});
        }
        soup.push_back(tri);
    }
    return soup;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto lower = [](char c) { return (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : c; };
        if (lower(a[i]) != lower(b[i])) return false;
    }
    return true;
}

class AsciiReader {
public:
    explicit AsciiReader(std::string_view text) : text_(text) {}

    std::optional<std::string_view> next() {
        while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
        if (pos_ >= text_.size()) return std::nullopt;
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
        return text_.substr(start, pos_ - start);
    }

    void skip_line() {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    }

    void expect(std::string_view keyword) {
        const auto tok = next();
        if (!tok || !iequals(*tok, keyword)) fail("expected '" + std::string(keyword) + "'");
    }

    double number() {
        auto tok = next();
        if (!tok) fail("expected a number");
        std::string_view s = *tok;
        if (!s.empty() && s.front() == '+') s.remove_prefix(1);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec == std::errc::result_out_of_range) {
            throw Error(ErrorCode::NonFiniteCoordinate, "ASCII STL coordinate out of range");
        }
        if (ec != std::errc{} || ptr != s.data() + s.size()) {
            fail("bad number '" + std::string(*tok) + "'");
        }
        return value;
    }

    [[noreturn]] void fail(const std::string& what) const {
        const auto line = 1 + std::count(text_.begin(), text_.begin() + std::min(pos_, text_.size()), '\n');
        throw Error(ErrorCode::MalformedAscii,
                    "malformed ASCII STL at line " + std::to_string(line) + ": " + what);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

Soup parse_ascii(std::string_view text) {
    AsciiReader in(text);
    Soup soup;
    auto tok = in.next();
    if (!tok || !iequals(*tok, "solid")) in.fail("expected 'solid'");
    in.skip_line();
    while (true) {
        tok = in.next();
        if (!tok) in.fail("missing 'endsolid'");
        if (iequals(*tok, "endsolid")) {
            in.skip_line();
            tok = in.next();
            if (!tok) break;
            if (!iequals(*tok, "solid")) in.fail("unexpected data after 'endsolid'");
            in.skip_line();
            continue;
        }
        if (!iequals(*tok, "facet")) in.fail("expected 'facet' or 'endsolid'");
        in.expect("normal");
        for (int i = 0; i < 3; ++i) in.number();
        in.expect("outer");
        in.expect("loop");
        std::array<Vec3, 3> tri;
        for (auto& corner : tri) {
            in.expect("vertex");
            const double x = in.number();
            const double y = in.number();
            const double z = in.number();
            corner = require_finite({x, y, z});
        }
        in.expect("endloop");
        in.expect("endfacet");
        soup.push_back(tri);
    }
    return soup;
}

bool starts_with_solid(std::span<const std::uint8_t> bytes) {
    std::size_t i = 0;
    while (i < bytes.size() && is_space(static_cast<char>(bytes[i]))) ++i;
    constexpr std::string_view kw = "solid";
    if (bytes.size() - i < kw.size()) return false;
    const std::string_view head(reinterpret_cast<const char*>(bytes.data()) + i, kw.size());
    if (!iequals(head, kw)) return false;
    return i + kw.size() == bytes.size() || is_space(static_cast<char>(bytes[i + kw.size()]));
}

std::string_view as_text(std::span<const std::uint8_t> bytes) {
    return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

bool binary_length_consistent(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderSize + 4) return false;
    const std::uint32_t count = read_u32_le(bytes.data() + kHeaderSize);
    return bytes.size() == kHeaderSize + 4 + std::uint64_t{kRecordSize} * count;
}

Vec3 unit_normal(const std::array<Vec3, 3>& c) {
    const Vec3 n = cross(c[1] - c[0], c[2] - c[0]);
    const double len = length(n);
    return len > 0.0 ? n * (1.0 / len) : Vec3{};
}

struct CellKey {
    std::int64_t x, y, z;
    friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct CellHash {
    std::size_t operator()(const CellKey& k) const noexcept {
        std::uint64_t h = 1469598103934665603ull;
        for (std::int64_t v : {k.x, k.y, k.z}) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

void recompute_normals(TriangleMesh& mesh) {
    mesh.facet_normals.resize(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        mesh.facet_normals[t] = unit_normal(mesh.corners(t));
    }
}

}  // namespace

std::array<Vec3, 3> TriangleMesh::corners(std::size_t triangle) const {
    const auto& idx = triangles[triangle];
    return {vertices[idx[0]], vertices[idx[1]], vertices[idx[2]]};
}

double TriangleMesh::triangle_area(std::size_t triangle) const {
    const auto c = corners(triangle);
    return 0.5 * length(cross(c[1] - c[0], c[2] - c[0]));
}

StlFormat detect_format(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) throw Error(ErrorCode::EmptyInput, "STL input is empty");
    if (!starts_with_solid(bytes)) return StlFormat::Binary;
    try {
        parse_ascii(as_text(bytes));
        return StlFormat::Ascii;
    } catch (const Error&) {
        return StlFormat::Binary;
    }
}

TriangleMesh parse_stl(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) throw Error(ErrorCode::EmptyInput, "STL input is empty");
    if (starts_with_solid(bytes)) {
        try {
            const Soup soup = parse_ascii(as_text(bytes));
            return weld_triangle_soup(soup);
        } catch (const Error& e) {
            // A lying "solid" header on a well-sized binary body is still binary.
            if (e.code() == ErrorCode::NonFiniteCoordinate || !binary_length_consistent(bytes)) throw;
        }
    }
    const Soup soup = parse_binary(bytes);
    return weld_triangle_soup(soup);
}

TriangleMesh read_stl_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorCode::Io, "failed reading '" + path.string() + "'");
    return parse_stl(bytes);
}

std::vector<std::uint8_t> write_binary_stl(const TriangleMesh& mesh, std::string_view header) {
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderSize + 4 + kRecordSize * mesh.triangles.size());
    std::string head(header.substr(0, kHeaderSize));
    // A binary header must not look like the start of an ASCII file.
    if (head.size() >= 5 && iequals(std::string_view(head).substr(0, 5), "solid")) {
        head.insert(0, "binary ");
        head.resize(kHeaderSize);
    }
    head.resize(kHeaderSize, ' ');
    out.insert(out.end(), head.begin(), head.end());
    write_u32_le(out, static_cast<std::uint32_t>(mesh.triangles.size()));
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto c = mesh.corners(t);
        const Vec3 n = unit_normal(c);
        for (double v : {n.x, n.y, n.z}) write_f32_le(out, v);
        for (const Vec3& p : c) {
            for (double v : {p.x, p.y, p.z}) write_f32_le(out, v);
        }
        out.push_back(0);
        out.push_back(0);
    }
    return out;
}

std::string write_ascii_stl(const TriangleMesh& mesh, std::string_view name) {
    std::ostringstream out;
    out.precision(std::numeric_limits<float>::max_digits10);
    out << "solid " << name << '\n';
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto c = mesh.corners(t);
        const Vec3 n = unit_normal(c);
        out << "  facet normal " << n.x << ' ' << n.y << ' ' << n.z << '\n' << "    outer loop\n";
        for (const Vec3& p : c) {
            out << "      vertex " << static_cast<float>(p.x) << ' ' << static_cast<float>(p.y) << ' '
                << static_cast<float>(p.z) << '\n';
        }
        out << "    endloop\n  endfacet\n";
    }
    out << "endsolid " << name << '\n';
    return out.str();
}

TriangleMesh weld_triangle_soup(std::span<const std::array<Vec3, 3>> soup) {
    TriangleMesh mesh;
    mesh.triangles.reserve(soup.size());
    std::unordered_map<CellKey, std::vector<std::uint32_t>, CellHash> grid;
    grid.reserve(soup.size() * 2);

    auto cell_of = [](Vec3 p) {
        return CellKey{static_cast<std::int64_t>(std::floor(p.x / kWeldTolerance)),
                       static_cast<std::int64_t>(std::floor(p.y / kWeldTolerance)),
                       static_cast<std::int64_t>(std::floor(p.z / kWeldTolerance))};
    };

    auto index_of = [&](Vec3 p) -> std::uint32_t {
        const CellKey home = cell_of(p);
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                for (std::int64_t dz = -1; dz <= 1; ++dz) {
                    const auto it = grid.find({home.x + dx, home.y + dy, home.z + dz});
                    if (it == grid.end()) continue;
                    for (std::uint32_t candidate : it->second) {
                        const Vec3 q = mesh.vertices[candidate];
                        if (std::abs(q.x - p.x) <= kWeldTolerance &&
                            std::abs(q.y - p.y) <= kWeldTolerance &&
                            std::abs(q.z - p.z) <= kWeldTolerance) {
                            return candidate;
                        }
                    }
                }
            }
        }
        const auto index = static_cast<std::uint32_t>(mesh.vertices.size());
        mesh.vertices.push_back(p);
        grid[home].push_back(index);
        return index;
    };

    for (const auto& tri : soup) {
        mesh.triangles.push_back({index_of(tri[0]), index_of(tri[1]), index_of(tri[2])});
    }
    recompute_normals(mesh);
    return mesh;
}

CleanedMesh clean_mesh(const TriangleMesh& mesh) {
    CleanedMesh result;
    std::vector<std::uint32_t> remap(mesh.vertices.size(), std::numeric_limits<std::uint32_t>::max());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& idx = mesh.triangles[t];
        const bool collapsed = idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2];
        if (collapsed || mesh.triangle_area(t) < kDegenerateArea) {
            ++result.dropped_triangles;
            continue;
        }
        std::array<std::uint32_t, 3> out;
        for (int c = 0; c < 3; ++c) {
            if (remap[idx[c]] == std::numeric_limits<std::uint32_t>::max()) {
                remap[idx[c]] = static_cast<std::uint32_t>(result.mesh.vertices.size());
                result.mesh.vertices.push_back(mesh.vertices[idx[c]]);
            }
            out[c] = remap[idx[c]];
        }
        result.mesh.triangles.push_back(out);
    }
    recompute_normals(result.mesh);
    return result;
}

MeshReport validate_mesh(const TriangleMesh& mesh) {
    MeshReport report;
    report.triangle_count = mesh.triangles.size();
    if (!mesh.vertices.empty()) report.bounds = mesh_bounds(mesh);

    struct EdgeUse {
        std::uint32_t forward = 0;   // traversed low -> high index
        std::uint32_t backward = 0;
    };
    std::unordered_map<std::uint64_t, EdgeUse> edges;
    edges.reserve(mesh.triangles.size() * 2);

    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& idx = mesh.triangles[t];
        const bool collapsed = idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2];
        if (collapsed || mesh.triangle_area(t) < kDegenerateArea) ++report.degenerate_triangle_count;
        if (collapsed) continue;
        for (int e = 0; e < 3; ++e) {
            const std::uint32_t a = idx[e];
            const std::uint32_t b = idx[(e + 1) % 3];
            const std::uint64_t key = (std::uint64_t{std::min(a, b)} << 32) | std::max(a, b);
            auto& use = edges[key];
            if (a < b) ++use.forward; else ++use.backward;
        }
    }

    bool closed = !edges.empty();
    for (const auto& [key, use] : edges) {
        const std::uint32_t total = use.forward + use.backward;
        if (total == 1) ++report.boundary_edge_count;
        if (total > 2) ++report.non_manifold_edge_count;
        if (total == 2 && use.forward != 1) ++report.inconsistent_edge_count;
        if (use.forward != 1 || use.backward != 1) closed = false;
    }
    report.is_watertight = closed;
    return report;
}

Box3 mesh_bounds(const TriangleMesh& mesh) {
    if (mesh.vertices.empty()) throw Error(ErrorCode::EmptyMesh, "mesh has no vertices");
    Box3 box{mesh.vertices.front(), mesh.vertices.front()};
    for (const Vec3& p : mesh.vertices) {
        box.min = {std::min(box.min.x, p.x), std::min(box.min.y, p.y), std::min(box.min.z, p.z)};
        box.max = {std::max(box.max.x, p.x), std::max(box.max.y, p.y), std::max(box.max.z, p.z)};
    }
    return box;
}

bool fits_build_volume(const Box3& bounds, const MachineProfile& machine) {
    const Vec3 e = bounds.extent();
    return e.x <= machine.build_volume.x && e.y <= machine.build_volume.y &&
           e.z <= machine.build_volume.z;
}

TriangleMesh translated(const TriangleMesh& mesh, Vec3 offset) {
    TriangleMesh out = mesh;
    for (Vec3& p : out.vertices) p = p + offset;
    return out;
}

TriangleMesh normalize_placement(const TriangleMesh& mesh, const MachineProfile& machine) {
    if (mesh.vertices.empty()) throw Error(ErrorCode::EmptyMesh, "mesh has no vertices");
    const Box3 b = mesh_bounds(mesh);
    const Vec2 center = machine.bed_center();
    Vec3 offset{center.x - 0.5 * (b.min.x + b.max.x), center.y - 0.5 * (b.min.y + b.max.y), -b.min.z};
    // Residuals at rounding level mean the mesh is already placed.
    constexpr double kPlaced = 1e-9;
    if (std::abs(offset.x) < kPlaced) offset.x = 0.0;
    if (std::abs(offset.y) < kPlaced) offset.y = 0.0;
    if (std::abs(offset.z) < kPlaced) offset.z = 0.0;
    if (offset == Vec3{}) return mesh;
    return translated(mesh, offset);
}

}  // namespace slicekit
