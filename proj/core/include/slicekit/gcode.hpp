#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slicekit/machine.hpp"
#include "slicekit/profile.hpp"
#include "slicekit/toolpath.hpp"

namespace slicekit {

enum class Opcode { G0, G1, G28, G92, M104, M109, M140, M84, Comment, Unknown };

std::string_view to_string(Opcode op);

/// One G-code line. X, Y, Z and E are millimeters, F is mm/min, S is degrees C.
struct GCodeCommand {
    Opcode opcode = Opcode::Comment;
    std::vector<std::pair<char, double>> args;  // in source order
    std::string comment;  // text after ';'
    std::string raw;      // code text of an Unknown command, kept verbatim
    std::size_t line = 0;  // 1-based

    std::optional<double> arg(char letter) const;
    bool has(char letter) const { return arg(letter).has_value(); }
};

struct GCodeProgram {
    std::vector<GCodeCommand> commands;
    std::vector<std::string> warnings;
};

/// Fixed five decimals, never "-0.00000".
std::string format_number(double value);
std::string format_command(const GCodeCommand& command);
std::string format_program(const GCodeProgram& program);

/// Header (bed temp, heat-and-wait, home, zero E), one block per layer that
/// restarts E at zero, and a footer that cools down and releases motors.
/// Throws PlanOutOfBounds if any move leaves the build volume.
GCodeProgram emit(const ToolpathPlan& plan, const PrintProfile& profile, const MachineProfile& machine);

/// Throws MalformedLine on an unparseable argument. Unknown opcodes are kept
/// as opaque commands and noted in `warnings`.
GCodeProgram parse_gcode(std::string_view text);

/// State after replaying a program at commanded feedrates with no
/// acceleration. `extruded` is net filament pushed, summed across G92 resets.
struct MachineState {
    Vec3 position;
    double e = 0.0;
    double extruded = 0.0;
    double time_s = 0.0;
    double feedrate = 0.0;  // mm/min
};

/// Throws NegativeFeedrate when a move runs at a non-positive feedrate.
MachineState simulate_state(const GCodeProgram& program);

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string rule_id;
    std::size_t line = 0;
    std::string message;
};

struct LintRule {
    std::string_view id;
    Severity severity;
    std::string_view summary;
};

/// R1..R8, in id order.
std::span<const LintRule> lint_rules();

/// Diagnostics in line order.
std::vector<Diagnostic> lint(const GCodeProgram& program, const PrintProfile& profile, const MachineProfile& machine);

/// `severity rule_id line: message`, one per line.
std::string format_diagnostics(std::span<const Diagnostic> diagnostics);
std::string diagnostics_to_json(std::span<const Diagnostic> diagnostics);

}  // namespace slicekit
