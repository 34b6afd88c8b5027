#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "herm/cli/config.hpp"
#include "herm/cli/report.hpp"

namespace herm::cli {

// Each command builds the metric from the configuration, runs one pipeline, records
// checks with their tolerances, and writes field files when output.emit_fields is set.
Report cmd_curvature(const RunConfig& cfg);
Report cmd_gauduchon(const RunConfig& cfg);
Report cmd_normalize(const RunConfig& cfg);
Report cmd_bundle_cert(const RunConfig& cfg);
Report cmd_identities(const RunConfig& cfg);

/// Dispatches on cfg.command. Library errors are converted into a report status
/// (config_error, solver_failed, hypothesis_failed) instead of propagating.
Report run_command(const RunConfig& cfg);

/// Full command-line entry point; returns the process exit code.
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace herm::cli
