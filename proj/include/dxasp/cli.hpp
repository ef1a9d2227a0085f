#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "dxasp/config.hpp"

namespace dxasp {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,    // UNSAT, failed translation, invalid program
    kExitUsage = 2,
    kExitTransport = 3,
};

/// Runs `dx-asp <subcommand> ...`. `args` excludes the program name. Results go
/// to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env);

}  // namespace dxasp
