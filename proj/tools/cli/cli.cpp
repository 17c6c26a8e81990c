#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "slicekit/error.hpp"
#include "slicekit/estimator.hpp"
#include "slicekit/gcode.hpp"
#include "slicekit/mesh_io.hpp"
#include "slicekit/profile_io.hpp"
#include "slicekit/slicer.hpp"
#include "slicekit/svg.hpp"
#include "slicekit/toolpath.hpp"

namespace slicekit::cli {

namespace fs = std::filesystem;

namespace {

// Prefix pipeline errors with the stage that raised them.
template <class F>
auto stage(std::string_view name, F&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.code(), std::string(name) + ": " + e.what());
    }
}

std::string volume_text(const Vec3& v) {
    std::ostringstream s;
    s << v.x << "x" << v.y << "x" << v.z;
    return s.str();
}

ProfileFile load_profile(const std::string& arg) {
    const char* dir = std::getenv(kProfileDirEnv);
    if (arg.empty()) {
        if (dir && fs::exists(fs::path(dir) / "default.ini")) return read_profile_file(fs::path(dir) / "default.ini");
        return {};
    }
    if (fs::exists(arg) || !dir) return read_profile_file(arg);
    for (const fs::path& candidate : {fs::path(dir) / arg, fs::path(dir) / (arg + ".ini")}) {
        if (fs::exists(candidate)) return read_profile_file(candidate);
    }
    throw Error(ErrorCode::Io, "profile '" + arg + "' not found here or in " + std::string(dir));
}

void write_file(const fs::path& path, std::string_view data) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!f) throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

struct LayerRange {
    std::size_t first = 0;
    std::size_t last = 0;
};

// "A..B" or "A", zero-based and inclusive.
LayerRange parse_layer_range(const std::string& text) {
    auto parse_index = [&](std::string_view s) {
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
            throw Error(ErrorCode::MalformedLine, "--layers expects A..B, got '" + text + "'");
        }
        return v;
    };
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        const std::size_t v = parse_index(text);
        return {v, v};
    }
    LayerRange r{parse_index(std::string_view(text).substr(0, dots)),
                 parse_index(std::string_view(text).substr(dots + 2))};
    if (r.first > r.last) throw Error(ErrorCode::InvalidArgument, "--layers range '" + text + "' is reversed");
    return r;
}

struct Prepared {
    Box3 bounds;
    LayerStack stack;
    ToolpathPlan plan;
};

Prepared prepare(const std::string& stl, const ProfileFile& profile, unsigned threads, std::ostream& err) {
    const TriangleMesh raw = stage("read", [&] { return read_stl_file(stl); });
    const CleanedMesh cleaned = clean_mesh(raw);
    if (cleaned.dropped_triangles > 0) {
        err << "warning: dropped " << cleaned.dropped_triangles << " degenerate triangles\n";
    }
    const MeshReport report = validate_mesh(cleaned.mesh);
    if (!report.is_watertight) {
        err << "warning: mesh is not watertight (" << report.boundary_edge_count << " boundary, "
            << report.non_manifold_edge_count << " non-manifold edges)\n";
    }
    if (!fits_build_volume(report.bounds, profile.machine)) {
        throw Error(ErrorCode::PlanOutOfBounds, "place: part " + volume_text(report.bounds.extent()) +
                                                    " mm does not fit " +
                                                    volume_text(profile.machine.build_volume));
    }
    const TriangleMesh placed = normalize_placement(cleaned.mesh, profile.machine);

    Prepared p;
    p.bounds = mesh_bounds(placed);
    p.stack = stage("slice", [&] { return slice_all(placed, profile.print, profile.machine, threads); });
    p.plan = stage("plan", [&] { return plan_print(p.stack, profile.print, profile.machine, threads); });
    for (const std::string& w : p.plan.warnings) err << "warning: " << w << '\n';
    return p;
}

std::string layer_file_name(std::size_t index) {
    std::string digits = std::to_string(index);
    if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
    return "layer_" + digits + ".svg";
}

std::size_t write_previews(const Prepared& p, const fs::path& dir, LayerRange range) {
    fs::create_directories(dir);
    const Box2 view{{p.bounds.min.x, p.bounds.min.y}, {p.bounds.max.x, p.bounds.max.y}};
    for (std::size_t k = range.first; k <= range.last; ++k) {
        write_file(dir / layer_file_name(k), render_layer_svg(p.stack.layers[k], p.plan.layer(k), view));
    }
    return range.last - range.first + 1;
}

int cmd_info(const std::string& stl, const ProfileFile& profile, bool json, std::ostream& out) {
    const TriangleMesh mesh = stage("read", [&] { return read_stl_file(stl); });
    const MeshReport r = validate_mesh(mesh);
    const bool fits = !mesh.empty() && fits_build_volume(r.bounds, profile.machine);
    if (json) {
        nlohmann::json doc;
        doc["triangles"] = r.triangle_count;
        doc["watertight"] = r.is_watertight;
        doc["boundary_edges"] = r.boundary_edge_count;
        doc["non_manifold_edges"] = r.non_manifold_edge_count;
        doc["inconsistent_edges"] = r.inconsistent_edge_count;
        doc["degenerate_triangles"] = r.degenerate_triangle_count;
        doc["bounds_min"] = {r.bounds.min.x, r.bounds.min.y, r.bounds.min.z};
        doc["bounds_max"] = {r.bounds.max.x, r.bounds.max.y, r.bounds.max.z};
        doc["fits_build_volume"] = fits;
        out << doc.dump(2) << '\n';
    } else {
        out << "triangles:            " << r.triangle_count << '\n'
            << "watertight:           " << (r.is_watertight ? "yes" : "no") << '\n'
            << "boundary edges:       " << r.boundary_edge_count << '\n'
            << "non-manifold edges:   " << r.non_manifold_edge_count << '\n'
            << "inconsistent edges:   " << r.inconsistent_edge_count << '\n'
            << "degenerate triangles: " << r.degenerate_triangle_count << '\n'
            << "bounds:               (" << r.bounds.min.x << ", " << r.bounds.min.y << ", " << r.bounds.min.z
            << ") .. (" << r.bounds.max.x << ", " << r.bounds.max.y << ", " << r.bounds.max.z << ")\n"
            << "size:                 " << volume_text(r.bounds.extent()) << " mm\n"
            << (fits ? "fits " : "does not fit ") << volume_text(profile.machine.build_volume) << " mm build volume\n";
    }
    return fits && r.is_watertight ? kExitOk : kExitValidation;
}

int cmd_slice(const std::string& stl, const ProfileFile& profile, std::string output, const std::string& svg_dir,
              unsigned threads, bool json, std::ostream& out, std::ostream& err) {
    const Prepared p = prepare(stl, profile, threads, err);
    const GCodeProgram program = stage("emit", [&] { return emit(p.plan, profile.print, profile.machine); });
    if (output.empty()) output = fs::path(stl).replace_extension(".gcode").string();
    write_file(output, format_program(program));
    if (!svg_dir.empty() && !p.stack.layers.empty()) {
        write_previews(p, svg_dir, {0, p.stack.layers.size() - 1});
    }

    const Estimate est = estimate_plan(p.plan, profile.print, profile.print.material.density_g_per_mm3(),
                                       profile.machine);
    if (json) {
        out << estimate_to_json(est, p.bounds);
    } else {
        out << "wrote " << output << " (" << p.stack.layers.size() << " layers, " << program.commands.size()
            << " commands)\n";
        out << format_estimate_table(est, p.bounds);
    }
    return kExitOk;
}

int cmd_lint(const std::string& path, const ProfileFile& profile, bool json, std::ostream& out,
             std::ostream& err) {
    const std::string text = stage("read", [&] { return read_text(path); });
    const GCodeProgram program = stage("parse", [&] { return parse_gcode(text); });
    for (const std::string& w : program.warnings) err << "warning: " << w << '\n';
    const std::vector<Diagnostic> diags = lint(program, profile.print, profile.machine);
    out << (json ? diagnostics_to_json(diags) : format_diagnostics(diags));
    const auto errors = std::count_if(diags.begin(), diags.end(),
                                      [](const Diagnostic& d) { return d.severity == Severity::Error; });
    if (!diags.empty()) {
        err << errors << " error(s), " << diags.size() - static_cast<std::size_t>(errors) << " warning(s)\n";
    }
    return errors > 0 ? kExitValidation : kExitOk;
}

int cmd_preview(const std::string& stl, const ProfileFile& profile, const std::string& dir, const std::string& layers,
                unsigned threads, std::ostream& out, std::ostream& err) {
    const Prepared p = prepare(stl, profile, threads, err);
    const std::size_t count = p.stack.layers.size();
    LayerRange range{0, count == 0 ? 0 : count - 1};
    if (!layers.empty()) range = parse_layer_range(layers);
    if (count == 0 || range.last >= count) {
        std::ostringstream msg;
        msg << "preview: layer range " << range.first << ".." << range.last << " is outside 0.."
            << (count == 0 ? 0 : count - 1) << " (" << count << " layers)";
        throw Error(ErrorCode::InvalidArgument, msg.str());
    }
    const std::size_t written = write_previews(p, dir, range);
    out << "wrote " << written << " SVG file(s) to " << dir << '\n';
    return kExitOk;
}

struct BreakEvenArgs {
    double setup = 0.0;
    double unit_traditional = 0.0;
    double unit_print = 0.0;
    long long max_units = 1000;
    std::string svg = "breakeven.svg";
    std::string csv;
};

int cmd_breakeven(const BreakEvenArgs& a, std::ostream& out, std::ostream& err) {
    // Bad numbers on the command line are usage errors, not validation failures.
    for (double v : {a.setup, a.unit_traditional, a.unit_print}) {
        if (!std::isfinite(v) || v < 0.0) {
            err << "error: breakeven: costs must be non-negative\n";
            return kExitFailure;
        }
    }
    if (a.max_units < 1) {
        err << "error: breakeven: --max-units must be at least 1\n";
        return kExitFailure;
    }
    const BreakEven table = break_even({a.unit_print, a.setup, a.unit_traditional}, a.max_units);
    write_file(a.svg, break_even_svg(table));
    if (!a.csv.empty()) write_file(a.csv, break_even_csv(table));

    std::set<long long> shown{1, a.max_units};
    if (table.crossover) {
        for (long long n : {*table.crossover - 1, *table.crossover, *table.crossover + 1}) {
            if (n >= 1 && n <= a.max_units) shown.insert(n);
        }
        out << "crossover at n = " << *table.crossover << '\n';
    } else {
        out << "no crossover up to n = " << a.max_units << '\n';
    }
    out << "units,printing_cost,traditional_cost\n";
    const std::string csv = break_even_csv(table);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    for (long long n = 1; std::getline(lines, line); ++n) {
        if (shown.count(n)) out << line << '\n';
    }
    out << "wrote " << a.svg << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"slicekit: STL to G-code slicer with print estimates"};
    app.require_subcommand(1);

    std::string profile_arg;
    std::string output;
    std::string layers;
    std::string svg_dir;
    std::string input;
    double density = 0.0;
    unsigned threads = 0;
    bool json = false;
    BreakEvenArgs be;

    auto add_profile = [&](CLI::App* cmd) {
        cmd->add_option("--profile", profile_arg, "Profile file, or a name looked up in $" +
                                                      std::string(kProfileDirEnv));
    };

    CLI::App* info = app.add_subcommand("info", "Report mesh health, bounds and build-volume fit");
    info->add_option("stl", input, "Input STL")->required();
    add_profile(info);
    info->add_flag("--json", json, "Machine-readable output");

    CLI::App* slice = app.add_subcommand("slice", "Slice an STL, write G-code and print the estimate");
    slice->add_option("stl", input, "Input STL")->required();
    add_profile(slice);
    slice->add_option("--output,-o", output, "G-code path (default: input with .gcode)");
    slice->add_option("--density", density, "Material density override, g/cm^3");
    slice->add_option("--svg", svg_dir, "Also write per-layer SVG previews here");
    slice->add_option("--threads", threads, "Worker threads (0 = hardware)");
    slice->add_flag("--json", json, "Machine-readable estimate");

    CLI::App* lint_cmd = app.add_subcommand("lint", "Check a G-code program against machine and material limits");
    lint_cmd->add_option("gcode", input, "Input G-code")->required();
    add_profile(lint_cmd);
    lint_cmd->add_flag("--json", json, "Machine-readable diagnostics");

    CLI::App* preview = app.add_subcommand("preview", "Write SVG layer previews with toolpaths");
    preview->add_option("stl", input, "Input STL")->required();
    add_profile(preview);
    preview->add_option("--output,-o", output, "Output directory (default: preview)");
    preview->add_option("--layers", layers, "Layer range A..B, zero-based and inclusive");
    preview->add_option("--threads", threads, "Worker threads (0 = hardware)");

    CLI::App* breakeven = app.add_subcommand("breakeven", "Compare printing against traditional manufacturing cost");
    breakeven->add_option("--setup", be.setup, "Traditional setup cost")->required();
    breakeven->add_option("--unit-traditional", be.unit_traditional, "Traditional cost per unit")->required();
    breakeven->add_option("--unit-print", be.unit_print, "Printing cost per unit")->required();
    breakeven->add_option("--max-units", be.max_units, "Largest batch size in the table");
    breakeven->add_option("--output,-o", be.svg, "Cost-curve SVG path");
    breakeven->add_option("--csv", be.csv, "Also write the full table as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitFailure;
    }

    try {
        if (*breakeven) return cmd_breakeven(be, out, err);

        ProfileFile profile = stage("profile", [&] { return load_profile(profile_arg); });
        if (density != 0.0) {
            if (!std::isfinite(density) || density < 0.0) {
                throw Error(ErrorCode::InvalidArgument, "--density must be positive");
            }
            profile.print.material.density = density;
        }
        if (*info) return cmd_info(input, profile, json, out);
        if (*slice) return cmd_slice(input, profile, output, svg_dir, threads, json, out, err);
        if (*lint_cmd) return cmd_lint(input, profile, json, out, err);
        if (*preview) return cmd_preview(input, profile, output.empty() ? "preview" : output, layers, threads, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_validation_error(e.code()) ? kExitValidation : kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace slicekit::cli
