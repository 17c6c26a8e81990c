#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "slicekit/machine.hpp"
#include "slicekit/profile.hpp"

namespace slicekit {

/// Everything a profile file can set. Default-constructed, it is the
/// Delta/PLA setup.
struct ProfileFile {
    MachineProfile machine;
    PrintProfile print;
};

/// Line-oriented `key = value` text with `[machine]`, `[process]` and
/// `[material]` sections. `#` and `;` start comments. Absent keys keep their
/// defaults.
///
/// Throws ProfileSyntax for malformed lines, unknown sections or keys (the
/// key is named) and unparseable values. Values that parse but break a
/// machine, flow or material invariant throw the corresponding validation
/// error.
ProfileFile parse_profile(std::string_view text);
ProfileFile read_profile_file(const std::filesystem::path& path);

/// Every key with its current value, in the order parse_profile accepts them.
std::string format_profile(const ProfileFile& profile);

}  // namespace slicekit
