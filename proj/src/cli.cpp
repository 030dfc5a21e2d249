/// @file cli.cpp
/// @brief Command dispatch, report assembly, and the argv front end.

#include "kgflow/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kgflow/config.hpp"
#include "kgflow/errors.hpp"
#include "kgflow/output.hpp"

namespace kgflow {
namespace {

using nlohmann::json;

std::string join_path(const std::string& dir, const std::string& name) {
  return dir.empty() ? name : dir + "/" + name;
}

json grid_json(const Grid& g) {
  json j;
  j["dim"] = g.dim;
  j["n1"] = g.n1;
  j["h1"] = g.h[0];
  j["x1_min"] = g.lo[0];
  j["x1_max"] = g.hi[0];
  if (g.dim == 2) {
    j["n2"] = g.n2;
    j["h2"] = g.h[1];
    j["x2_min"] = g.lo[1];
    j["x2_max"] = g.hi[1];
  }
  return j;
}

void apply_overrides(ConfigMap& kv, const CommandOverrides& ov) {
  if (!ov.out_dir.empty()) kv["output.dir"] = ov.out_dir;
  if (ov.resolution > 0) {
    kv["domain.n1"] = std::to_string(ov.resolution);
    auto dim = kv.find("domain.dim");
    if ((dim != kv.end() && dim->second == "2") || kv.count("domain.n2"))
      kv["domain.n2"] = std::to_string(ov.resolution);
  }
  if (ov.dt > 0.0) kv["run.dt"] = format_number(ov.dt);
}

/// The three ingredients of the flux balance
///   bdry int phi sqrt(gamma) - int H sqrt(gamma) = C int sqrt(gamma)/W.
struct FluxReport {
  double boundary_flux = 0.0;
  double curvature_flux = 0.0;
  double inverse_W_volume = 0.0;
};

FluxReport flux_report(const FlowProblem& fp, const GraphState& st) {
  const Grid& g = fp.grid;
  FluxReport fx;
  BoundaryField weighted_phi;
  for (int e = 0; e < num_edges(g); ++e) {
    const std::vector<int> ids = edge_nodes(g, e);
    weighted_phi.edge[e].resize(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k)
      weighted_phi.edge[e][k] =
          fp.phi.edge[e][k] * std::sqrt(fp.samples.pts[static_cast<std::size_t>(ids[k])].gamma);
  }
  fx.boundary_flux = boundary_integral(fp, weighted_phi);

  std::vector<double> hv(static_cast<std::size_t>(g.count()));
  std::vector<double> wv(hv.size());
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const std::size_t id = static_cast<std::size_t>(g.id(i, j));
      const double sg = std::sqrt(fp.samples.pts[id].gamma);
      hv[id] = fp.prescribed_curvature(g.coord(i, j)) * sg;
      wv[id] = sg / graph_W(fp.samples.pts[id], st.du[id], g.dim);
    }
  }
  fx.curvature_flux = volume_integral(fp, hv);
  fx.inverse_W_volume = volume_integral(fp, wv);
  return fx;
}

json speed_bound_json(const SpeedBound& sb) {
  return json{{"abs_speed", sb.abs_speed}, {"bound", sb.bound}, {"ok", sb.ok}};
}

json cmd_flow(const Scenario& sc) {
  const FlowResult fr = run_flow(sc.problem, sc.u0, sc.flow);
  ensure_directory(sc.out_dir);
  std::vector<std::string> outputs;
  write_series_csv(join_path(sc.out_dir, "series.csv"), fr.series);
  outputs.push_back("series.csv");
  json times = json::array();
  for (std::size_t k = 0; k < fr.snapshots.size(); ++k) {
    const std::string name = snapshot_name(static_cast<int>(k));
    write_field_csv(join_path(sc.out_dir, name), sc.grid, fr.snapshots[k].second);
    outputs.push_back(name);
    times.push_back(fr.snapshots[k].first);
  }
  write_field_csv(join_path(sc.out_dir, "solution.csv"), sc.grid, fr.final_state.u);
  outputs.push_back("solution.csv");

  json rep;
  rep["steps"] = fr.steps;
  rep["stop_reason"] = fr.stop_reason;
  rep["t_final"] = fr.final_state.t;
  rep["max_abs_ut_final"] = fr.series.back().max_ut;
  rep["max_abs_grad_final"] = fr.series.back().max_grad;
  rep["energy_initial"] = fr.series.front().energy;
  rep["energy_final"] = fr.series.back().energy;
  rep["energy_orbit_weighted_final"] = flow_energy_orbit_weighted(sc.problem, fr.final_state);
  rep["compatible"] = fr.compatible;
  rep["compatibility_gap"] = fr.compatibility_gap;
  rep["max_W"] = fr.max_W;
  if (!fr.dissipation.empty())
    rep["max_dissipation_residual"] =
        *std::max_element(fr.dissipation.begin(), fr.dissipation.end());
  rep["snapshot_times"] = times;
  rep["outputs"] = outputs;
  return rep;
}

json cmd_soliton(const Scenario& sc) {
  const SolitonResult sr = solve_soliton(sc.problem, sc.u0, sc.soliton);
  const GraphState st = state_from_values(sr.v, sc.problem.samples, sc.grid);
  const FluxReport fx = flux_report(sc.problem, st);
  const double flux_residual =
      std::abs(fx.boundary_flux - fx.curvature_flux - sr.C * fx.inverse_W_volume);
  const SpeedBound sb = speed_bound(sc.problem, st, sr.C);

  ensure_directory(sc.out_dir);
  write_field_csv(join_path(sc.out_dir, "solution.csv"), sc.grid, sr.v);
  write_speed_csv(join_path(sc.out_dir, "speed.csv"), sr.C, fx.boundary_flux,
                  fx.curvature_flux, fx.inverse_W_volume, flux_residual);

  json rep;
  rep["C"] = sr.C;
  rep["iterations"] = sr.iterations;
  rep["final_residual"] = sr.residual_history.empty() ? 0.0 : sr.residual_history.back();
  rep["residual_history"] = sr.residual_history;
  rep["boundary_flux"] = fx.boundary_flux;
  rep["curvature_flux"] = fx.curvature_flux;
  rep["inverse_W_volume"] = fx.inverse_W_volume;
  rep["flux_residual"] = flux_residual;
  rep["speed_bound"] = speed_bound_json(sb);
  if (sc.has_reference_speed) {
    rep["reference_speed"] = sc.reference_speed;
    rep["speed_error"] = std::abs(sr.C - sc.reference_speed);
  }
  rep["outputs"] = json::array({"solution.csv", "speed.csv"});
  return rep;
}

json cmd_speed(const Scenario& sc) {
  const GraphState st = state_from_values(sc.u0, sc.problem.samples, sc.grid);
  const double C = soliton_speed(sc.problem, st);
  const FluxReport fx = flux_report(sc.problem, st);
  const double flux_residual =
      std::abs(fx.boundary_flux - fx.curvature_flux - C * fx.inverse_W_volume);
  const SpeedBound sb = speed_bound(sc.problem, st, C);

  ensure_directory(sc.out_dir);
  write_speed_csv(join_path(sc.out_dir, "speed.csv"), C, fx.boundary_flux,
                  fx.curvature_flux, fx.inverse_W_volume, flux_residual);

  json rep;
  rep["C"] = C;
  rep["boundary_flux"] = fx.boundary_flux;
  rep["curvature_flux"] = fx.curvature_flux;
  rep["inverse_W_volume"] = fx.inverse_W_volume;
  rep["flux_residual"] = flux_residual;
  rep["speed_bound"] = speed_bound_json(sb);
  if (sc.has_reference_speed) {
    rep["reference_speed"] = sc.reference_speed;
    rep["flux_residual_at_reference"] = std::abs(
        fx.boundary_flux - fx.curvature_flux - sc.reference_speed * fx.inverse_W_volume);
  }
  rep["outputs"] = json::array({"speed.csv"});
  return rep;
}

std::vector<CheckRow> verify_battery(const Scenario& sc) {
  std::vector<CheckRow> rows;
  const Grid& g = sc.grid;
  const GeometrySamples& gs = sc.problem.samples;
  const int dim = g.dim;

  // analytic geometry derivatives vs central differences, on an interior
  // node subsample (the chart may end exactly at the boundary)
  double cmax = 0.0, gmax = 0.0;
  const int si = std::max(1, (g.n1 - 2) / 8);
  const int sj = dim == 2 ? std::max(1, (g.n2 - 2) / 8) : 1;
  const int j_lo = dim == 2 ? 1 : 0;
  const int j_hi = dim == 2 ? g.n2 - 1 : 1;
  for (int j = j_lo; j < j_hi; j += sj) {
    for (int i = 1; i < g.n1 - 1; i += si) {
      const Vec x = g.coord(i, j);
      cmax = std::max(cmax, christoffel_consistency(sc.geom, x, 1e-5));
      gmax = std::max(gmax, grad_gamma_consistency(sc.geom, x, 1e-5));
    }
  }
  rows.push_back({"christoffel_matches_metric_differences", cmax, 1e-6, cmax <= 1e-6, true});
  rows.push_back({"gamma_gradient_matches_differences", gmax, 1e-6, gmax <= 1e-6, true});

  // algebraic identities on the exact-derivative state of the initial profile
  const GraphState st = state_from_analytic(sc.u0_field, gs, g);
  double trace_div = 0.0, grouping = 0.0, inverse_defect = 0.0;
  for (int id = 0; id < g.count(); ++id) {
    const std::size_t sid = static_cast<std::size_t>(id);
    const AmbientPoint& p = gs.pts[sid];
    trace_div = std::max(
        trace_div,
        std::abs(mean_curvature(p, st.du[sid], st.d2u[sid], dim, CurvatureForm::trace) -
                 mean_curvature(p, st.du[sid], st.d2u[sid], dim, CurvatureForm::divergence)));
    const double W = graph_W(p, st.du[sid], dim);
    const Sym a1 = second_fundamental_form(p, st.du[sid], st.d2u[sid], W, dim,
                                           SffVariant::gamma_gradient);
    const Sym a2 = second_fundamental_form(p, st.du[sid], st.d2u[sid], W, dim,
                                           SffVariant::orbit_acceleration);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        grouping = std::max(grouping, std::abs(a1(a, b) - a2(a, b)));
    const ShapeData sd = shape_data(p, st.du[sid], st.d2u[sid], dim);
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) {
        double s = 0.0;
        for (int k = 0; k < dim; ++k) s += sd.g(a, k) * sd.g_inv(k, b);
        inverse_defect = std::max(inverse_defect, std::abs(s - (a == b ? 1.0 : 0.0)));
      }
    }
  }
  rows.push_back(
      {"curvature_trace_equals_divergence", trace_div, 1e-10, trace_div <= 1e-10, true});
  rows.push_back(
      {"shape_operator_groupings_agree", grouping, 1e-10, grouping <= 1e-10, true});
  rows.push_back({"graph_metric_inverse_identity", inverse_defect, 1e-12,
                  inverse_defect <= 1e-12, true});

  // gradient identity for the tilt against a smoothed boundary distance;
  // second-order quantity, so the gate scales with h^2
  const AnalyticField dist = softmin_distance(g.lo, g.hi, dim, 2.0);
  const double tilt = tilt_identity_residual(g, gs, st, dist);
  const double h_max = std::max(g.h[0], dim == 2 ? g.h[1] : 0.0);
  const double tilt_thr = std::max(1e-2, 25.0 * h_max * h_max);
  rows.push_back({"tilt_gradient_identity", tilt, tilt_thr, tilt <= tilt_thr, true});

  // informational: whether the initial profile already meets the contact
  // angle (flows from incompatible data are legitimate, just non-smooth
  // at t = 0)
  const double gap = compatibility_gap(sc.problem, sc.u0);
  double max_phi = 0.0;
  for (const auto& edge : sc.problem.phi.edge)
    for (double v : edge) max_phi = std::max(max_phi, std::abs(v));
  const double gap_thr =
      std::max(1e-6, 20.0 * g.min_h() * g.min_h()) * (1.0 + max_phi);
  rows.push_back(
      {"initial_contact_angle_compatibility", gap, gap_thr, gap <= gap_thr, false});
  return rows;
}

json cmd_verify(const Scenario& sc) {
  const std::vector<CheckRow> rows = verify_battery(sc);
  ensure_directory(sc.out_dir);
  write_verify_csv(join_path(sc.out_dir, "verify.csv"), rows);
  json checks = json::array();
  bool all_pass = true;
  for (const CheckRow& r : rows) {
    checks.push_back(json{{"name", r.name},
                          {"value", r.value},
                          {"threshold", r.threshold},
                          {"pass", r.pass},
                          {"gated", r.gated}});
    if (r.gated && !r.pass) all_pass = false;
  }
  json rep;
  rep["checks"] = checks;
  rep["all_pass"] = all_pass;
  rep["outputs"] = json::array({"verify.csv"});
  return rep;
}

json run_command_impl(const std::string& command, ConfigMap kv,
                      const CommandOverrides& ov) {
  apply_overrides(kv, ov);
  const Scenario sc = build_scenario(kv);
  json rep;
  if (command == "flow") {
    rep = cmd_flow(sc);
  } else if (command == "soliton") {
    rep = cmd_soliton(sc);
  } else if (command == "speed") {
    rep = cmd_speed(sc);
  } else if (command == "verify") {
    rep = cmd_verify(sc);
  } else {
    throw ConfigError({"unknown command: " + command});
  }
  rep["command"] = command;
  rep["config"] = sc.raw;
  rep["grid"] = grid_json(sc.grid);
  rep["geometry"] = sc.geom.name;
  rep["output_dir"] = sc.out_dir;
  write_text_file(join_path(sc.out_dir, "report.json"), rep.dump(2));
  return rep;
}

void print_summary(const json& rep) {
  const std::string cmd = rep["command"].get<std::string>();
  if (cmd == "flow") {
    std::cout << "flow: steps=" << rep["steps"].get<int>()
              << " stop=" << rep["stop_reason"].get<std::string>()
              << " max|u_t|=" << format_number(rep["max_abs_ut_final"].get<double>())
              << " energy=" << format_number(rep["energy_final"].get<double>()) << "\n";
  } else if (cmd == "soliton") {
    std::cout << "soliton: C=" << format_number(rep["C"].get<double>())
              << " iterations=" << rep["iterations"].get<int>()
              << " residual=" << format_number(rep["final_residual"].get<double>())
              << " flux_residual=" << format_number(rep["flux_residual"].get<double>())
              << "\n";
  } else if (cmd == "speed") {
    std::cout << "speed: C=" << format_number(rep["C"].get<double>())
              << " flux_residual=" << format_number(rep["flux_residual"].get<double>())
              << "\n";
  } else if (cmd == "verify") {
    int failed = 0;
    for (const auto& c : rep["checks"]) {
      const bool pass = c["pass"].get<bool>();
      if (c["gated"].get<bool>() && !pass) ++failed;
      char line[160];
      std::snprintf(line, sizeof(line), "[%s] %-40s value=%.3g threshold=%.3g",
                    pass ? "PASS" : "FAIL", c["name"].get<std::string>().c_str(),
                    c["value"].get<double>(), c["threshold"].get<double>());
      std::cout << line << "\n";
    }
    if (failed == 0)
      std::cout << "verify: all gated checks passed\n";
    else
      std::cout << "verify: " << failed << " gated check(s) failed\n";
  }
  std::cout << "report: " << join_path(rep["output_dir"].get<std::string>(), "report.json")
            << "\n";
}

}  // namespace

std::string run_command_json(const std::string& command, const std::string& config_path,
                             const CommandOverrides& ov) {
  return run_command_impl(command, read_config_file(config_path), ov).dump(2);
}

std::string run_command_json_text(const std::string& command,
                                  const std::string& config_text,
                                  const CommandOverrides& ov) {
  return run_command_impl(command, parse_config_text(config_text), ov).dump(2);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"prescribed mean curvature flow of graphs over warped-product charts"};
  app.require_subcommand(1);

  std::string config_path;
  CommandOverrides ov;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "scenario configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", ov.out_dir, "output directory (overrides output.dir)");
    sub->add_option("--resolution", ov.resolution, "node count override for every axis")
        ->check(CLI::PositiveNumber);
    sub->add_option("--dt", ov.dt, "time step override")->check(CLI::PositiveNumber);
  };
  add_common(app.add_subcommand("flow", "march the prescribed-curvature flow"));
  add_common(app.add_subcommand("soliton", "solve the translating-soliton profile"));
  add_common(app.add_subcommand("speed", "flux-balance speed of the configured state"));
  add_common(app.add_subcommand("verify", "run the discrete-identity battery"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const json rep = run_command_impl(command, read_config_file(config_path), ov);
    print_summary(rep);
    if (command == "verify" && !rep["all_pass"].get<bool>()) return 1;
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedRegimeError& e) {
    std::cerr << "unsupported regime: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace kgflow
