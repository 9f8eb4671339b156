#ifndef HYBOWAVE_TOOLS_CLI_HPP
#define HYBOWAVE_TOOLS_CLI_HPP

#include <iosfwd>

namespace hwn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one command. Result files go where the flags say; `out` receives the
/// single summary line, `err` diagnostics.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hwn::cli

#endif  // HYBOWAVE_TOOLS_CLI_HPP
