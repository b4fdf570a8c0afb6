#ifndef OSC_ISING_TOOLS_CLI_HPP
#define OSC_ISING_TOOLS_CLI_HPP

#include <iosfwd>

namespace osc_ising::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Entry point of the `osc_ising` tool: gen, oracle, solve, spectrum, bench.
int cli_main(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace osc_ising::cli

#endif  // OSC_ISING_TOOLS_CLI_HPP
