#include "slicekit/profile_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>
#include <vector>

#include "slicekit/error.hpp"

namespace slicekit {

namespace {

// Flow parameters validate as a unit, so the file fills these first.
struct Staging {
    ProfileFile file;
    double extrusion_width, layer_height, nozzle_diameter, filament_diameter, extrusion_multiplier,
        max_melt_rate;

    Staging() {
        const FlowParameters& f = file.print.flow;
        extrusion_width = f.extrusion_width();
        layer_height = f.layer_height();
        nozzle_diameter = f.nozzle_diameter();
        filament_diameter = f.filament_diameter();
        extrusion_multiplier = f.extrusion_multiplier();
        max_melt_rate = f.max_melt_rate();
    }
};

using Target = std::variant<double*, int*, std::string*, OutlineDirection*>;

struct Field {
    std::string_view section;
    std::string_view key;
    Target target;
};

std::vector<Field> fields_of(Staging& s) {
    MachineProfile& m = s.file.machine;
    PrintProfile& p = s.file.print;
    return {
        {"machine", "build_x", &m.build_volume.x},
        {"machine", "build_y", &m.build_volume.y},
        {"machine", "build_z", &m.build_volume.z},
        {"machine", "min_speed", &m.min_speed},
        {"machine", "max_speed", &m.max_speed},
        {"machine", "min_layer", &m.min_layer},
        {"machine", "max_layer", &m.max_layer},
        {"process", "layer_height", &s.layer_height},
        {"process", "extrusion_width", &s.extrusion_width},
        {"process", "nozzle_diameter", &s.nozzle_diameter},
        {"process", "filament_diameter", &s.filament_diameter},
        {"process", "extrusion_multiplier", &s.extrusion_multiplier},
        {"process", "max_melt_rate", &s.max_melt_rate},
        {"process", "infill_percent", &p.infill_percent},
        {"process", "perimeters", &p.perimeter_count},
        {"process", "top_layers", &p.top_layers},
        {"process", "bottom_layers", &p.bottom_layers},
        {"process", "infill_angle", &p.infill_angle},
        {"process", "outline_direction", &p.outline_direction},
        {"process", "print_speed", &p.print_speed},
        {"process", "travel_speed", &p.travel_speed},
        {"process", "retraction_distance", &p.retraction_distance},
        {"process", "retraction_speed", &p.retraction_speed},
        {"process", "retraction_min_travel", &p.retraction_min_travel},
        {"process", "nozzle_temp", &p.nozzle_temp},
        {"process", "bed_temp", &p.bed_temp},
        {"process", "heatup_allowance", &p.heatup_allowance},
        {"material", "name", &p.material.name},
        {"material", "density", &p.material.density},
        {"material", "min_temp", &p.material.min_temp},
        {"material", "max_temp", &p.material.max_temp},
    };
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void syntax(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::ProfileSyntax, "profile line " + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view text, std::size_t line, std::string_view key) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
        syntax(line, "'" + std::string(key) + "' expects a number, got '" + std::string(text) + "'");
    }
    return v;
}

int parse_int(std::string_view text, std::size_t line, std::string_view key) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        syntax(line, "'" + std::string(key) + "' expects an integer, got '" + std::string(text) + "'");
    }
    return v;
}

void assign(const Field& field, std::string_view value, std::size_t line) {
    std::visit(
        [&](auto* target) {
            using T = std::remove_pointer_t<decltype(target)>;
            if constexpr (std::is_same_v<T, double>) {
                *target = parse_double(value, line, field.key);
            } else if constexpr (std::is_same_v<T, int>) {
                *target = parse_int(value, line, field.key);
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (value.empty()) syntax(line, "'" + std::string(field.key) + "' is empty");
                *target = std::string(value);
            } else {
                if (value == "ccw") {
                    *target = OutlineDirection::CounterClockwise;
                } else if (value == "cw") {
                    *target = OutlineDirection::Clockwise;
                } else {
                    syntax(line, "'outline_direction' expects ccw or cw, got '" + std::string(value) + "'");
                }
            }
        },
        field.target);
}

std::string render(const Target& target) {
    return std::visit(
        [](auto* v) -> std::string {
            using T = std::remove_pointer_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                std::array<char, 32> buf{};
                const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), *v);
                return std::string(buf.data(), ptr);
            } else if constexpr (std::is_same_v<T, int>) {
                return std::to_string(*v);
            } else if constexpr (std::is_same_v<T, std::string>) {
                return *v;
            } else {
                return *v == OutlineDirection::CounterClockwise ? "ccw" : "cw";
            }
        },
        target);
}

}  // namespace

ProfileFile parse_profile(std::string_view text) {
    Staging staging;
    const std::vector<Field> fields = fields_of(staging);
    std::set<std::pair<std::string_view, std::string_view>> seen;

    std::string_view section;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') syntax(line_no, "unterminated section header");
            const std::string_view name = trim(line.substr(1, line.size() - 2));
            if (name != "machine" && name != "process" && name != "material") {
                syntax(line_no, "unknown section '" + std::string(name) + "'");
            }
            section = name;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) syntax(line_no, "expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (section.empty()) syntax(line_no, "'" + std::string(key) + "' appears before any section");

        const Field* field = nullptr;
        for (const Field& f : fields) {
            if (f.section == section && f.key == key) field = &f;
        }
        if (!field) syntax(line_no, "unknown key '" + std::string(key) + "' in [" + std::string(section) + "]");
        if (!seen.emplace(field->section, field->key).second) {
            syntax(line_no, "duplicate key '" + std::string(key) + "'");
        }
        assign(*field, value, line_no);
    }

    ProfileFile out = staging.file;
    out.print.flow = FlowParameters(staging.extrusion_width, staging.layer_height, staging.nozzle_diameter,
                                    staging.filament_diameter, staging.extrusion_multiplier, staging.max_melt_rate);
    out.machine.validate();
    out.print.validate();
    return out;
}

ProfileFile read_profile_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open profile '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_profile(buf.str());
}

std::string format_profile(const ProfileFile& profile) {
    Staging staging;
    staging.file = profile;
    const FlowParameters& f = profile.print.flow;
    staging.extrusion_width = f.extrusion_width();
    staging.layer_height = f.layer_height();
    staging.nozzle_diameter = f.nozzle_diameter();
    staging.filament_diameter = f.filament_diameter();
    staging.extrusion_multiplier = f.extrusion_multiplier();
    staging.max_melt_rate = f.max_melt_rate();

    std::string out;
    std::string_view section;
    for (const Field& field : fields_of(staging)) {
        if (field.section != section) {
            if (!section.empty()) out += '\n';
            section = field.section;
            out += "[" + std::string(section) + "]\n";
        }
        out += std::string(field.key) + " = " + render(field.target) + '\n';
    }
    return out;
}

}  // namespace slicekit
