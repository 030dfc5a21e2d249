/// @file config.cpp

#include "kgflow/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "kgflow/errors.hpp"

namespace kgflow {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "geometry.tag",      "geometry.r_min",     "geometry.lambda",
      "geometry.sigma11",  "geometry.sigma12",   "geometry.sigma22",
      "geometry.gamma",    "domain.dim",         "domain.x1_min",
      "domain.x1_max",     "domain.n1",          "domain.x2_min",
      "domain.x2_max",     "domain.n2",          "problem.u0",
      "problem.Hcal",      "problem.phi",        "problem.phi.x1_min",
      "problem.phi.x1_max", "problem.phi.x2_min", "problem.phi.x2_max",
      "problem.C",         "run.scheme",         "run.dt",
      "run.t_end",         "run.steady_tol",     "run.method",
      "run.tol",           "run.max_iter",       "output.dir",
      "output.snapshot_every"};
  return keys;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

/// Collects violations; converts to ConfigError at the end of a stage.
struct Collector {
  std::vector<std::string> violations;
  void add(const std::string& v) { violations.push_back(v); }
  void check() const {
    if (!violations.empty()) throw ConfigError(violations);
  }
};

bool parse_number(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

bool parse_int(const std::string& s, int* out) {
  double v = 0.0;
  if (!parse_number(s, &v)) return false;
  if (v != std::floor(v) || std::abs(v) > 1e9) return false;
  *out = static_cast<int>(v);
  return true;
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap kv;
  Collector col;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      col.add("line " + std::to_string(lineno) + ": expected `key = value`, got `" +
              line + "`");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      col.add("line " + std::to_string(lineno) + ": empty key or value");
      continue;
    }
    if (known_keys().count(key) == 0) {
      col.add("line " + std::to_string(lineno) + ": unknown key `" + key + "`");
      continue;
    }
    if (kv.count(key) != 0) {
      col.add("line " + std::to_string(lineno) + ": duplicate key `" + key + "`");
      continue;
    }
    kv[key] = value;
  }
  col.check();
  return kv;
}

ConfigMap read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file `" + path + "`"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string write_config(const ConfigMap& kv) {
  std::ostringstream out;
  for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
  return out.str();
}

Scenario build_scenario(const ConfigMap& kv) {
  Collector col;
  auto get = [&](const std::string& key, const std::string& fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  };
  auto has = [&](const std::string& key) { return kv.count(key) != 0; };
  auto get_number = [&](const std::string& key, double fallback, double* out) {
    *out = fallback;
    if (!has(key)) return;
    if (!parse_number(kv.at(key), out)) {
      col.add(key + ": not a number: `" + kv.at(key) + "`");
      *out = fallback;
    }
  };
  auto get_int = [&](const std::string& key, int fallback, int* out) {
    *out = fallback;
    if (!has(key)) return;
    if (!parse_int(kv.at(key), out)) {
      col.add(key + ": not an integer: `" + kv.at(key) + "`");
      *out = fallback;
    }
  };

  Scenario sc;
  sc.raw = kv;

  // --- domain ---
  int dim = 0;
  get_int("domain.dim", 0, &dim);
  if (!has("domain.dim")) col.add("domain.dim is required");
  else if (dim != 1 && dim != 2) col.add("domain.dim must be 1 or 2");
  for (const char* req : {"domain.x1_min", "domain.x1_max", "domain.n1"}) {
    if (!has(req)) col.add(std::string(req) + " is required");
  }
  if (dim == 2) {
    for (const char* req : {"domain.x2_min", "domain.x2_max", "domain.n2"}) {
      if (!has(req)) col.add(std::string(req) + " is required in 2d");
    }
  }
  double x1min = 0.0, x1max = 0.0, x2min = 0.0, x2max = 0.0;
  int n1 = 0, n2 = 0;
  get_number("domain.x1_min", 0.0, &x1min);
  get_number("domain.x1_max", 1.0, &x1max);
  get_number("domain.x2_min", 0.0, &x2min);
  get_number("domain.x2_max", 1.0, &x2max);
  get_int("domain.n1", 9, &n1);
  get_int("domain.n2", 9, &n2);
  if (has("domain.n1") && n1 < 8) col.add("domain.n1 must be at least 8");
  if (dim == 2 && has("domain.n2") && n2 < 8) col.add("domain.n2 must be at least 8");
  if (!(x1max > x1min)) col.add("domain.x1_max must exceed domain.x1_min");
  if (dim == 2 && !(x2max > x2min)) col.add("domain.x2_max must exceed domain.x2_min");

  // --- geometry ---
  const std::string tag = get("geometry.tag", "");
  if (tag.empty()) col.add("geometry.tag is required");
  double r_min = 0.5, lambda = 1.0;
  get_number("geometry.r_min", 0.5, &r_min);
  get_number("geometry.lambda", 1.0, &lambda);
  if (tag == "helicoidal") {
    if (dim != 2) col.add("helicoidal geometry needs domain.dim = 2");
    if (!(r_min > 0.0)) col.add("geometry.r_min must be positive");
    if (x1min < r_min) col.add("helicoidal chart needs domain.x1_min >= geometry.r_min");
  } else if (tag == "exponential_warp") {
    if (dim != 1) col.add("exponential_warp geometry needs domain.dim = 1");
  } else if (tag == "custom") {
    if (!has("geometry.gamma")) col.add("custom geometry requires geometry.gamma");
  } else if (tag != "euclidean_product" && !tag.empty()) {
    col.add("geometry.tag must be euclidean_product, helicoidal, exponential_warp or custom");
  }

  // --- expressions ---
  auto get_expr = [&](const std::string& key, const std::string& fallback,
                      Expr* out) {
    const std::string text = get(key, fallback);
    try {
      *out = Expr::parse(text);
      if (out->max_variable() >= dim && dim > 0) {
        col.add(key + ": uses x" + std::to_string(out->max_variable() + 1) +
                " but domain.dim = " + std::to_string(dim));
      }
      return true;
    } catch (const ExprError& e) {
      col.add(key + ": " + e.what());
      return false;
    }
  };
  Expr u0_expr = Expr::constant(0.0), hcal_expr = Expr::constant(0.0);
  Expr phi_base = Expr::constant(0.0);
  if (!has("problem.u0")) col.add("problem.u0 is required");
  get_expr("problem.u0", "0", &u0_expr);
  get_expr("problem.Hcal", "0", &hcal_expr);
  get_expr("problem.phi", "0", &phi_base);
  const char* edge_key[4] = {"problem.phi.x1_min", "problem.phi.x1_max",
                             "problem.phi.x2_min", "problem.phi.x2_max"};
  Expr phi_edge[4] = {phi_base, phi_base, phi_base, phi_base};
  for (int e = 0; e < 4; ++e) {
    if (has(edge_key[e])) {
      if (e >= 2 && dim == 1) col.add(std::string(edge_key[e]) + ": no such edge in 1d");
      get_expr(edge_key[e], "0", &phi_edge[e]);
    }
  }

  Expr sigma11 = Expr::constant(1.0), sigma12 = Expr::constant(0.0),
       sigma22 = Expr::constant(1.0), gamma_expr = Expr::constant(1.0);
  if (tag == "custom") {
    get_expr("geometry.sigma11", "1", &sigma11);
    get_expr("geometry.sigma12", "0", &sigma12);
    get_expr("geometry.sigma22", "1", &sigma22);
    if (has("geometry.gamma")) get_expr("geometry.gamma", "1", &gamma_expr);
  }

  // --- run options ---
  const std::string scheme = get("run.scheme", "semi_implicit");
  if (scheme != "semi_implicit" && scheme != "explicit") {
    col.add("run.scheme must be semi_implicit or explicit");
  }
  const std::string method = get("run.method", "newton");
  if (method != "newton" && method != "pseudo_time") {
    col.add("run.method must be newton or pseudo_time");
  }
  double dt = 0.0, t_end = 0.0, steady_tol = 0.0, tol = 1e-10;
  int max_iter = 50, snapshot_every = 0;
  get_number("run.dt", 0.0, &dt);
  get_number("run.t_end", 0.0, &t_end);
  get_number("run.steady_tol", 0.0, &steady_tol);
  get_number("run.tol", 1e-10, &tol);
  get_int("run.max_iter", 50, &max_iter);
  get_int("output.snapshot_every", 0, &snapshot_every);
  if (has("run.t_end")) {
    if (!(t_end > 0.0)) col.add("run.t_end must be positive");
    if (scheme == "semi_implicit" && !(dt > 0.0)) {
      col.add("run.dt must be positive for the semi-implicit scheme");
    }
  }
  if (dt < 0.0) col.add("run.dt must not be negative");
  if (steady_tol < 0.0) col.add("run.steady_tol must not be negative");
  if (!(tol > 0.0)) col.add("run.tol must be positive");
  if (max_iter < 1) col.add("run.max_iter must be at least 1");
  if (snapshot_every < 0) col.add("output.snapshot_every must not be negative");
  double ref_c = 0.0;
  get_number("problem.C", 0.0, &ref_c);

  col.check();

  // --- assemble (data-dependent validation may still fail) ---
  if (tag == "euclidean_product") sc.geom = euclidean_product(dim);
  else if (tag == "helicoidal") sc.geom = helicoidal(r_min);
  else if (tag == "exponential_warp") sc.geom = exponential_warp(lambda);
  else sc.geom = custom_geometry(dim, sigma11, sigma12, sigma22, gamma_expr);

  sc.grid = make_grid(dim, Vec{x1min, x2min}, Vec{x1max, x2max}, n1, n2);
  sc.u0_field = field_from_expr(u0_expr, dim);

  BoundaryField phi;
  for (int e = 0; e < num_edges(sc.grid); ++e) {
    const std::vector<int> ids = edge_nodes(sc.grid, e);
    phi.edge[e].resize(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const int i = ids[k] % sc.grid.n1, j = ids[k] / sc.grid.n1;
      const double v = phi_edge[e](sc.grid.coord(i, j));
      if (!(std::abs(v) < 1.0)) {
        col.add(std::string(edge_key[e]) +
                ": contact angle must satisfy |phi| < 1 at every boundary node");
        break;
      }
      phi.edge[e][k] = v;
    }
  }
  col.check();

  sc.problem = make_flow_problem(sc.geom, sc.grid,
                                 [hcal_expr](const Vec& x) { return hcal_expr(x); },
                                 std::move(phi));
  sc.u0.resize(sc.grid.count());
  for (int j = 0; j < sc.grid.n2; ++j) {
    for (int i = 0; i < sc.grid.n1; ++i) {
      sc.u0[sc.grid.id(i, j)] = sc.u0_field.value(sc.grid.coord(i, j));
    }
  }

  sc.flow.scheme = scheme == "explicit" ? Scheme::explicit_euler : Scheme::semi_implicit;
  sc.flow.dt = dt;
  sc.flow.t_end = t_end;
  sc.flow.steady_tol = steady_tol;
  sc.flow.snapshot_every = snapshot_every;
  sc.soliton.method =
      method == "pseudo_time" ? SolitonMethod::pseudo_time : SolitonMethod::newton;
  sc.soliton.tol = tol;
  sc.soliton.max_iter = max_iter;
  sc.soliton.dt = dt > 0.0 ? dt : 1e-2;
  sc.out_dir = get("output.dir", "out");
  sc.has_reference_speed = has("problem.C");
  sc.reference_speed = ref_c;
  return sc;
}

}  // namespace kgflow
