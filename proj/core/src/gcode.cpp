#include "slicekit/gcode.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "slicekit/error.hpp"
#include "slicekit/flow_model.hpp"

namespace slicekit {

std::string_view to_string(Opcode op) {
    switch (op) {
        case Opcode::G0: return "G0";
        case Opcode::G1: return "G1";
        case Opcode::G28: return "G28";
        case Opcode::G92: return "G92";
        case Opcode::M104: return "M104";
        case Opcode::M109: return "M109";
        case Opcode::M140: return "M140";
        case Opcode::M84: return "M84";
        case Opcode::Comment: return ";";
        case Opcode::Unknown: return "?";
    }
    return "?";
}

std::optional<double> GCodeCommand::arg(char letter) const {
    for (const auto& [l, v] : args) {
        if (l == letter) return v;
    }
    return std::nullopt;
}

std::string format_number(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, 5);
    if (ec != std::errc{}) return "nan";
    std::string out(buf.data(), ptr);
    if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
    return out;
}

std::string format_command(const GCodeCommand& command) {
    std::string out;
    if (command.opcode == Opcode::Comment) return command.comment.empty() ? ";" : "; " + command.comment;
    if (command.opcode == Opcode::Unknown) {
        out = command.raw;
    } else {
        out = std::string(to_string(command.opcode));
        for (const auto& [letter, value] : command.args) {
            out += ' ';
            out += letter;
            out += format_number(value);
        }
    }
    if (!command.comment.empty()) out += " ; " + command.comment;
    return out;
}

std::string format_program(const GCodeProgram& program) {
    std::string out;
    for (const GCodeCommand& c : program.commands) {
        out += format_command(c);
        out += '\n';
    }
    return out;
}

namespace {

class Emitter {
public:
    void command(Opcode op, std::vector<std::pair<char, double>> args, std::string comment = {}) {
        GCodeCommand c;
        c.opcode = op;
        c.args = std::move(args);
        c.comment = std::move(comment);
        c.line = program_.commands.size() + 1;
        program_.commands.push_back(std::move(c));
    }

    void comment(std::string text) { command(Opcode::Comment, {}, std::move(text)); }

    GCodeProgram take() { return std::move(program_); }

private:
    GCodeProgram program_;
};

void check_in_volume(Vec2 p, double z, const MachineProfile& machine, std::size_t move_index) {
    constexpr double kSlack = 1e-9;
    const Vec3 v = machine.build_volume;
    if (p.x < -kSlack || p.y < -kSlack || z < -kSlack || p.x > v.x + kSlack || p.y > v.y + kSlack ||
        z > v.z + kSlack) {
        std::ostringstream msg;
        msg << "move " << move_index << " reaches (" << p.x << ", " << p.y << ", " << z
            << ") outside the " << v.x << "x" << v.y << "x" << v.z << " mm build volume";
        throw Error(ErrorCode::PlanOutOfBounds, msg.str());
    }
}

// The value a reader gets back from format_number(v).
double emitted_value(double v) {
    const std::string text = format_number(v);
    double parsed = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), parsed);
    return parsed;
}

}  // namespace

GCodeProgram emit(const ToolpathPlan& plan, const PrintProfile& profile, const MachineProfile& machine) {
    const FlowParameters& flow = profile.flow;
    const double feed_per_mm = extrusion_feed_per_mm(flow);
    Emitter out;

    out.comment("generated by slicekit");
    {
        std::ostringstream s;
        s << "layer_height " << format_number(flow.layer_height()) << " extrusion_width "
          << format_number(flow.extrusion_width()) << " infill_percent " << format_number(profile.infill_percent)
          << " perimeters " << profile.perimeter_count;
        out.comment(s.str());
    }
    out.command(Opcode::M140, {{'S', profile.bed_temp}});
    out.command(Opcode::M109, {{'S', profile.nozzle_temp}});
    out.command(Opcode::G28, {});
    out.command(Opcode::G92, {{'E', 0.0}});

    double z = 0.0;
    // Rounding left over from the previous layer's last E value. Starting the
    // next layer from it keeps the emitted total within one rounding step of
    // the planned total, however many layers reset E.
    double carry = 0.0;
    for (std::size_t layer = 0; layer < plan.layer_count(); ++layer) {
        const auto moves = plan.layer(layer);
        std::ostringstream label;
        label << "layer " << layer << " z " << format_number(plan.layer_z[layer]);
        out.comment(label.str());
        if (moves.empty()) continue;
        out.command(Opcode::G92, {{'E', 0.0}});
        double e = carry;
        for (std::size_t i = 0; i < moves.size(); ++i) {
            const ToolMove& m = moves[i];
            const std::size_t index = plan.layer_starts[layer] + i;
            check_in_volume(m.end, m.z, machine, index);
            std::vector<std::pair<char, double>> args;
            switch (m.kind) {
                case MoveKind::Travel:
                case MoveKind::Extrude: {
                    args = {{'X', m.end.x}, {'Y', m.end.y}};
                    if (m.z != z) {
                        args.push_back({'Z', m.z});
                        z = m.z;
                    }
                    if (m.kind == MoveKind::Extrude) {
                        e += m.xy_length() * feed_per_mm;
                        args.push_back({'E', e});
                        args.push_back({'F', cap_feedrate(m.feedrate, flow, machine) * 60.0});
                        out.command(Opcode::G1, std::move(args));
                    } else {
                        args.push_back({'F', cap_travel_feedrate(m.feedrate, machine) * 60.0});
                        out.command(Opcode::G0, std::move(args));
                    }
                    break;
                }
                case MoveKind::Retract:
                    e -= profile.retraction_distance;
                    out.command(Opcode::G1, {{'E', e}, {'F', m.feedrate * 60.0}});
                    break;
                case MoveKind::Unretract:
                    e += profile.retraction_distance;
                    out.command(Opcode::G1, {{'E', e}, {'F', m.feedrate * 60.0}});
                    break;
            }
        }
        carry = e - emitted_value(e);
    }

    out.command(Opcode::M104, {{'S', 0.0}});
    out.command(Opcode::M140, {{'S', 0.0}});
    out.command(Opcode::M84, {});
    return out.take();
}

namespace {

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::MalformedLine, "line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

char upper(char c) { return (c >= 'a' && c <= 'z') ? char(c - 'a' + 'A') : c; }
bool is_letter(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }

std::optional<Opcode> known_opcode(char letter, long number) {
    if (letter == 'G') {
        switch (number) {
            case 0: return Opcode::G0;
            case 1: return Opcode::G1;
            case 28: return Opcode::G28;
            case 92: return Opcode::G92;
            default: return std::nullopt;
        }
    }
    if (letter == 'M') {
        switch (number) {
            case 84: return Opcode::M84;
            case 104: return Opcode::M104;
            case 109: return Opcode::M109;
            case 140: return Opcode::M140;
            default: return std::nullopt;
        }
    }
    return std::nullopt;
}

GCodeCommand parse_line(std::string_view code, std::size_t line, std::vector<std::string>& warnings) {
    GCodeCommand cmd;
    cmd.line = line;

    std::size_t pos = 0;
    const char letter = upper(code[pos++]);
    std::size_t digits_end = pos;
    while (digits_end < code.size() && code[digits_end] >= '0' && code[digits_end] <= '9') ++digits_end;
    const bool has_number = digits_end > pos;
    long number = -1;
    if (has_number) std::from_chars(code.data() + pos, code.data() + digits_end, number);
    const bool terminated = digits_end == code.size() || code[digits_end] == ' ' || code[digits_end] == '\t';
    const auto known = (has_number && terminated) ? known_opcode(letter, number) : std::nullopt;

    if (!known) {
        cmd.opcode = Opcode::Unknown;
        cmd.raw = std::string(code);
        warnings.push_back("line " + std::to_string(line) + ": unknown command '" +
                           std::string(code.substr(0, code.find(' '))) + "' kept verbatim");
        return cmd;
    }
    cmd.opcode = *known;
    pos = digits_end;

    while (pos < code.size()) {
        if (code[pos] == ' ' || code[pos] == '\t') {
            ++pos;
            continue;
        }
        if (!is_letter(code[pos])) malformed(line, "expected an axis letter in '" + std::string(code) + "'");
        const char axis = upper(code[pos++]);
        std::size_t end = pos;
        while (end < code.size() && !is_letter(code[end]) && code[end] != ' ' && code[end] != '\t') ++end;
        std::string_view text = code.substr(pos, end - pos);
        if (text.empty()) {
            // Bare letters (G28 X) are axis flags.
            if (cmd.opcode == Opcode::G28) {
                cmd.args.push_back({axis, 0.0});
                pos = end;
                continue;
            }
            malformed(line, std::string("argument '") + axis + "' has no value");
        }
        if (text.front() == '+') text.remove_prefix(1);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
            malformed(line, std::string("bad value for '") + axis + "': '" + std::string(code.substr(pos, end - pos)) + "'");
        }
        if (cmd.has(axis)) malformed(line, std::string("argument '") + axis + "' repeated");
        cmd.args.push_back({axis, value});
        pos = end;
    }

    if (cmd.opcode == Opcode::G1 &&
        !(cmd.has('X') || cmd.has('Y') || cmd.has('Z') || cmd.has('E') || cmd.has('F'))) {
        malformed(line, "G1 without X, Y, Z, E or F");
    }
    return cmd;
}

}  // namespace

GCodeProgram parse_gcode(std::string_view text) {
    GCodeProgram program;
    std::size_t line = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view raw = text.substr(start, end - start);
        start = end + 1;
        ++line;

        const auto semi = raw.find(';');
        const std::string_view code = trim(raw.substr(0, semi));
        const std::string comment =
            semi == std::string_view::npos ? std::string{} : std::string(trim(raw.substr(semi + 1)));
        if (code.empty()) {
            if (semi == std::string_view::npos) continue;
            GCodeCommand c;
            c.opcode = Opcode::Comment;
            c.comment = comment;
            c.line = line;
            program.commands.push_back(std::move(c));
            continue;
        }
        GCodeCommand c = parse_line(code, line, program.warnings);
        c.comment = comment;
        program.commands.push_back(std::move(c));
    }
    return program;
}

namespace {

/// What one command did to the machine.
struct Step {
    bool motion = false;   // G0/G1 that moves X, Y or Z
    bool e_only = false;   // G1 that moves only the extruder
    Vec3 from;
    Vec3 to;
    double de = 0.0;
    double feedrate = 0.0;  // mm/min in effect
};

class Replay {
public:
    Step apply(const GCodeCommand& c) {
        Step step;
        step.from = state_.position;
        switch (c.opcode) {
            case Opcode::G0:
            case Opcode::G1: {
                if (auto f = c.arg('F')) {
                    if (*f < 0.0) {
                        throw Error(ErrorCode::NegativeFeedrate,
                                    "line " + std::to_string(c.line) + ": negative feedrate " + format_number(*f));
                    }
                    state_.feedrate = *f;
                }
                Vec3 target = state_.position;
                if (auto x = c.arg('X')) target.x = *x;
                if (auto y = c.arg('Y')) target.y = *y;
                if (auto z = c.arg('Z')) target.z = *z;
                const double e_target = c.arg('E').value_or(state_.e);
                step.to = target;
                step.de = e_target - state_.e;
                step.feedrate = state_.feedrate;
                const double dist = length(target - state_.position);
                step.motion = dist > 0.0;
                step.e_only = !step.motion && step.de != 0.0;
                const double travelled = step.motion ? dist : std::abs(step.de);
                if (travelled > 0.0) {
                    if (!(state_.feedrate > 0.0)) {
                        throw Error(ErrorCode::NegativeFeedrate,
                                    "line " + std::to_string(c.line) + ": move without a positive feedrate");
                    }
                    state_.time_s += travelled / (state_.feedrate / 60.0);
                }
                state_.position = target;
                state_.extruded += step.de;
                state_.e = e_target;
                break;
            }
            case Opcode::G28:
                state_.position = {};
                step.to = state_.position;
                break;
            case Opcode::G92:
                if (c.args.empty()) {
                    state_.position = {};
                    state_.e = 0.0;
                }
                if (auto x = c.arg('X')) state_.position.x = *x;
                if (auto y = c.arg('Y')) state_.position.y = *y;
                if (auto z = c.arg('Z')) state_.position.z = *z;
                if (auto e = c.arg('E')) state_.e = *e;
                step.to = state_.position;
                break;
            default:
                step.to = state_.position;
                break;
        }
        return step;
    }

    const MachineState& state() const { return state_; }

private:
    MachineState state_;
};

}  // namespace

MachineState simulate_state(const GCodeProgram& program) {
    Replay replay;
    for (const GCodeCommand& c : program.commands) replay.apply(c);
    return replay.state();
}

namespace {

constexpr std::array<LintRule, 8> kRules = {{
    {"R1", Severity::Error, "move outside the build volume"},
    {"R2", Severity::Error, "nozzle temperature outside the material range"},
    {"R3", Severity::Error, "extrusion before waiting for nozzle temperature"},
    {"R4", Severity::Error, "feedrate above the machine maximum or melt capacity"},
    {"R5", Severity::Warning, "extrusion feedrate below the machine minimum"},
    {"R6", Severity::Warning, "long travel without retraction"},
    {"R7", Severity::Error, "Z decreases mid-print"},
    {"R8", Severity::Warning, "extruder runs backward outside a retraction"},
}};

const LintRule& rule(std::string_view id) {
    for (const LintRule& r : kRules) {
        if (r.id == id) return r;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown lint rule " + std::string(id));
}

}  // namespace

std::span<const LintRule> lint_rules() { return kRules; }

std::vector<Diagnostic> lint(const GCodeProgram& program, const PrintProfile& profile, const MachineProfile& machine) {
    std::vector<Diagnostic> out;
    auto report = [&](std::string_view id, std::size_t line, std::string message) {
        out.push_back({rule(id).severity, std::string(id), line, std::move(message)});
    };

    constexpr double kFeedSlack = 1e-4;  // mm/min; absorbs 5-decimal rounding
    constexpr double kPosSlack = 1e-6;
    const double extrude_limit = std::min(machine.max_speed, max_print_speed(profile.flow)) * 60.0;
    const double travel_limit = machine.max_speed * 60.0;
    const double extrude_floor = machine.min_speed * 60.0;
    const Vec3 volume = machine.build_volume;
    const Material& material = profile.material;

    Replay replay;
    bool nozzle_ready = false;
    bool cold_reported = false;
    bool printing = false;
    bool retracted = false;

    for (const GCodeCommand& c : program.commands) {
        if (c.opcode == Opcode::M104 || c.opcode == Opcode::M109) {
            const double s = c.arg('S').value_or(0.0);
            if (s != 0.0 && (s < material.min_temp || s > material.max_temp)) {
                std::ostringstream msg;
                msg << "nozzle temperature " << format_number(s) << " C outside the " << material.name << " range ["
                    << material.min_temp << ", " << material.max_temp << "]";
                report("R2", c.line, msg.str());
            }
            if (s == 0.0) {
                nozzle_ready = false;
                cold_reported = false;
            } else if (c.opcode == Opcode::M109) {
                nozzle_ready = true;
            }
            continue;
        }
        if (c.opcode != Opcode::G0 && c.opcode != Opcode::G1) {
            replay.apply(c);
            continue;
        }

        const Step step = replay.apply(c);
        const bool extruding = step.de > 0.0;

        if (extruding && !nozzle_ready && !cold_reported) {
            report("R3", c.line, "extrusion before M109 has brought the nozzle to temperature");
            cold_reported = true;
        }

        if (step.motion) {
            const Vec3 p = step.to;
            if (p.x < -kPosSlack || p.y < -kPosSlack || p.z < -kPosSlack || p.x > volume.x + kPosSlack ||
                p.y > volume.y + kPosSlack || p.z > volume.z + kPosSlack) {
                std::ostringstream msg;
                msg << "target (" << format_number(p.x) << ", " << format_number(p.y) << ", " << format_number(p.z)
                    << ") outside the " << volume.x << "x" << volume.y << "x" << volume.z << " mm build volume";
                report("R1", c.line, msg.str());
            }
            if (extruding && step.feedrate > extrude_limit + kFeedSlack) {
                std::ostringstream msg;
                msg << "extrusion at F" << format_number(step.feedrate) << " exceeds F" << format_number(extrude_limit);
                report("R4", c.line, msg.str());
            } else if (!extruding && step.feedrate > travel_limit + kFeedSlack) {
                std::ostringstream msg;
                msg << "travel at F" << format_number(step.feedrate) << " exceeds F" << format_number(travel_limit);
                report("R4", c.line, msg.str());
            }
            if (extruding && step.feedrate < extrude_floor - kFeedSlack) {
                std::ostringstream msg;
                msg << "extrusion at F" << format_number(step.feedrate) << " below the machine minimum F"
                    << format_number(extrude_floor);
                report("R5", c.line, msg.str());
            }
            const double xy = std::hypot(step.to.x - step.from.x, step.to.y - step.from.y);
            if (!extruding && step.de == 0.0 && !retracted && printing && xy > profile.retraction_min_travel) {
                std::ostringstream msg;
                msg << format_number(xy) << " mm travel without retraction";
                report("R6", c.line, msg.str());
            }
            if (printing && step.to.z < step.from.z - kPosSlack) {
                std::ostringstream msg;
                msg << "Z drops from " << format_number(step.from.z) << " to " << format_number(step.to.z);
                report("R7", c.line, msg.str());
            }
            if (step.de < 0.0) report("R8", c.line, "extruder runs backward during a move");
            if (extruding) retracted = false;
        } else if (step.e_only) {
            if (step.de < 0.0) {
                if (retracted) report("R8", c.line, "retraction while already retracted");
                retracted = true;
            } else {
                retracted = false;
            }
        }
        if (extruding && step.motion) printing = true;
    }

    std::stable_sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
    return out;
}

std::string format_diagnostics(std::span<const Diagnostic> diagnostics) {
    std::string out;
    for (const Diagnostic& d : diagnostics) {
        out += d.severity == Severity::Error ? "Error" : "Warning";
        out += ' ' + d.rule_id + ' ' + std::to_string(d.line) + ": " + d.message + '\n';
    }
    return out;
}

std::string diagnostics_to_json(std::span<const Diagnostic> diagnostics) {
    nlohmann::json doc = nlohmann::json::array();
    for (const Diagnostic& d : diagnostics) {
        doc.push_back({{"severity", d.severity == Severity::Error ? "error" : "warning"},
                       {"rule_id", d.rule_id},
                       {"line", d.line},
                       {"message", d.message}});
    }
    return doc.dump(2) + "\n";
}

}  // namespace slicekit
