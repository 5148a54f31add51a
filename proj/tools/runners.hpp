#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"

namespace persistq::cli {

struct RunResult {
  nlohmann::json results;
  std::vector<std::string> output_files;
};

/// Executes one subcommand with fully resolved parameters; writes its CSV
/// outputs and returns results for the manifest.
RunResult run_command(const ResolvedParams& params);

/// verify-all: runs the invariant suite (reduced sizes when fast) and writes
/// a deterministic JSON report. Returns true when every check passes.
bool run_verify_all(const ResolvedParams& params, const std::string& report_path);

}  // namespace persistq::cli
