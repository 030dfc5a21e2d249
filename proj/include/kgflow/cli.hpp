/// @file cli.hpp
/// @brief Command driver shared by the executable and the Python bindings.
///
/// Commands:
///   flow     march the prescribed-curvature flow, record the time series
///   soliton  solve the translating-soliton profile and its speed
///   speed    flux-balance speed of the configured initial state
///   verify   discrete-identity battery on the configured setup
///
/// Each command writes its artifacts (CSV tables plus report.json) into the
/// scenario's output directory and returns the report as JSON text.
#pragma once

#include <string>

namespace kgflow {

/// Command-line overrides applied on top of the config file.  Zero /
/// empty members leave the config value in place.
struct CommandOverrides {
  std::string out_dir;
  int resolution = 0;  ///< replaces the node count of every axis
  double dt = 0.0;
};

/// Run one command against a config file.  Returns the report JSON text.
/// Throws ConfigError for bad input, SolverError for convergence failure.
std::string run_command_json(const std::string& command, const std::string& config_path,
                             const CommandOverrides& ov = {});

/// Same, with the config text passed directly (no file involved).
std::string run_command_json_text(const std::string& command,
                                  const std::string& config_text,
                                  const CommandOverrides& ov = {});

/// Full argv-level entry point.  Exit codes: 0 success, 1 runtime/solver
/// failure (including failed verify checks), 2 invalid configuration,
/// 3 usage error.
int run_cli(int argc, char** argv);

}  // namespace kgflow
