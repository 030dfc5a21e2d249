#pragma once

/// @file config.hpp
/// @brief Flat dotted-key run configuration: parsing, validation (all
///        violations reported at once), and scenario assembly.
///
/// Grammar: one `key = value` per line, `#` starts a comment, blank lines
/// ignored.  Values are numbers, identifiers, or expressions in x1/x2
/// (aliases: x, r -> x1; z -> x2).
///
/// Keys:
///   geometry.tag            euclidean_product | helicoidal | exponential_warp | custom
///   geometry.r_min          helicoidal chart cutoff (default 0.5)
///   geometry.lambda         exponential_warp rate (default 1)
///   geometry.sigma11/.sigma12/.sigma22   custom leaf metric (defaults 1/0/1)
///   geometry.gamma          custom squared inverse orbit length (required for custom)
///   domain.dim              1 | 2
///   domain.x1_min/.x1_max/.n1,  domain.x2_min/.x2_max/.n2 (2d)
///   problem.u0              initial/guess profile expression (required)
///   problem.Hcal            prescribed mean curvature expression (default 0)
///   problem.phi             contact angle expression (default 0)
///   problem.phi.x1_min/.x1_max/.x2_min/.x2_max  per-edge overrides
///   problem.C               reference orbit speed (optional)
///   run.scheme              semi_implicit | explicit (default semi_implicit)
///   run.dt                  time step (0 + explicit scheme = stability bound)
///   run.t_end               flow horizon
///   run.steady_tol          early stop on max|u_t| (default 0 = off)
///   run.method              newton | pseudo_time (default newton)
///   run.tol                 solver residual target (default 1e-10)
///   run.max_iter            solver iteration cap (default 50)
///   output.dir              output directory (default "out")
///   output.snapshot_every   snapshot cadence in steps (default 0 = none)

#include <map>
#include <string>
#include <vector>

#include "kgflow/fields.hpp"
#include "kgflow/flow.hpp"
#include "kgflow/stationary.hpp"

namespace kgflow {

using ConfigMap = std::map<std::string, std::string>;

/// Parse config text; collects every syntax problem (bad line, duplicate
/// key, unknown key) into one ConfigError.
ConfigMap parse_config_text(const std::string& text);

/// Read and parse a file.
ConfigMap read_config_file(const std::string& path);

/// Canonical serialization: sorted keys, "key = value" lines.
std::string write_config(const ConfigMap& kv);

/// A fully validated, ready-to-run setup.
struct Scenario {
  AmbientGeometry geom;
  Grid grid;
  FlowProblem problem;
  AnalyticField u0_field;
  std::vector<double> u0;
  FlowOptions flow;
  SolitonOptions soliton;
  std::string out_dir = "out";
  bool has_reference_speed = false;
  double reference_speed = 0.0;
  ConfigMap raw;
};

/// Validate and build.  Every violation found is collected; if any,
/// throws one ConfigError listing all of them.
Scenario build_scenario(const ConfigMap& kv);

}  // namespace kgflow
