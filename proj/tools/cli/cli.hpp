#pragma once

#include <iosfwd>

namespace slicekit::cli {

/// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;     // I/O or parse failure
inline constexpr int kExitValidation = 2;  // validation or lint failure

/// Directory searched for `--profile NAME` and for `default.ini`.
inline constexpr const char* kProfileDirEnv = "SLICEKIT_PROFILE_DIR";

/// Entry point of the `slicekit` tool; output goes to the given streams so
/// tests can run commands in-process.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace slicekit::cli
