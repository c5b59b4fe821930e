#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace almostoa {

/// Operator tool entry point. `args` excludes the program name.
///
/// Subcommands: ingest, simulate, stats, access-stats, tick, resend, alerts,
/// serve. Global flags: --store-path, --config, --now.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace almostoa
