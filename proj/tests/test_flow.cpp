/// @file test_flow.cpp
/// @brief Flow marching: boundary closure, energy decay, scheme agreement,
///        dissipation identity, guard rails.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "../tests/support.hpp"
#include "kgflow/errors.hpp"

using namespace kgflow;
using namespace kgtest;

TEST_CASE("flow speed vanishes identically on the translating profile") {
  const FlowProblem fp = translator_problem(65);
  // W(nH - H) - 1 == 0 exactly for log(sec x) with H = 0, so against the
  // exact-derivative state the discrete speed is machine-uniform 1
  const GraphState st = state_from_analytic(translator_profile(), fp.samples, fp.grid);
  const std::vector<double> rhs = flow_rhs(fp, st);
  for (double v : rhs) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("boundary closure reproduces the exact normal derivative") {
  const FlowProblem fp = translator_problem(33);
  const BoundaryClosure closure(fp.grid, fp.samples, fp.phi);
  ExtendedField ext(fp.grid);
  ext.set_interior(sample_values(translator_profile(), fp.grid));
  closure.close(ext);
  // ghost = opposite neighbor - 2h * u_nu(inward); with phi = sin(1) the
  // closure solves u_nu = -tan(1) at x = 1 exactly
  const int n = fp.grid.n1;
  const double h = fp.grid.h[0];
  const double ghost = ext.at(n, 0);
  const double expect = ext.at(n - 2, 0) - 2.0 * h * (-std::tan(1.0));
  CHECK(ghost == doctest::Approx(expect).epsilon(1e-13));
}

namespace {

/// For every ghost form: the affine evaluation must equal close(), and the
/// full sensitivity (struct + beta jacobian) must match finite differences
/// of close().  Corner forms are composed from edge forms, so this covers
/// fill_corners consistency too.
void check_linearization(const FlowProblem& fp, const std::vector<double>& u) {
  const Grid& grid = fp.grid;
  const BoundaryClosure closure(grid, fp.samples, fp.phi);
  ExtendedField ext(grid);
  ext.set_interior(u);
  closure.close(ext);
  const auto forms = closure.linearize(ext, true);
  CHECK(!forms.empty());

  for (const auto& [key, form] : forms) {
    double val = form.beta;
    for (const auto& [id, c] : form.struct_terms)
      val += c * u[static_cast<std::size_t>(id)];
    const int gi = key % (grid.n1 + 2) - 1;
    const int gj = key / (grid.n1 + 2) - 1;
    CHECK(val == doctest::Approx(ext.at(gi, gj)).epsilon(1e-12));

    // struct_terms and beta_jac use triplet semantics: entries with the
    // same id sum, so aggregate before differencing
    std::map<int, double> deriv;
    for (const auto& [id, c] : form.struct_terms) deriv[id] += c;
    for (const auto& [id, dbeta] : form.beta_jac) deriv[id] += dbeta;
    for (const auto& [id, total] : deriv) {
      const double eps = 1e-6;
      std::vector<double> up = u, um = u;
      up[static_cast<std::size_t>(id)] += eps;
      um[static_cast<std::size_t>(id)] -= eps;
      ExtendedField ep(grid), em(grid);
      ep.set_interior(up);
      em.set_interior(um);
      closure.close(ep);
      closure.close(em);
      const double fd = (ep.at(gi, gj) - em.at(gi, gj)) / (2.0 * eps);
      CHECK(total == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

}  // namespace

TEST_CASE("ghost linearization matches the nonlinear closure") {
  // 1d warped chart with a tilted angle: the normal derivative is
  // data-independent here, so this checks the structural terms alone
  {
    const AmbientGeometry geom = exponential_warp(0.5);
    const Grid grid = make_grid(1, Vec{0.0, 0.0}, Vec{1.0, 0.0}, 17, 1);
    const FlowProblem fp = make_flow_problem(geom, grid, [](const Vec&) { return 0.0; },
                                             boundary_constant(grid, 0.3));
    std::vector<double> u(static_cast<std::size_t>(grid.count()));
    for (int i = 0; i < grid.n1; ++i)
      u[static_cast<std::size_t>(i)] = 0.2 * std::sin(3.0 * i) + 0.05 * i * grid.h[0];
    check_linearization(fp, u);
  }
  // 2d helicoid with nonzero angles: u_nu depends on the tangential slope,
  // so beta_jac carries real entries, including through corner composition
  {
    const FlowProblem fp = helicoid_problem(9, 9);
    const std::vector<double> u =
        sample_values(random_trig_profile(2, 21), fp.grid);
    check_linearization(fp, u);
  }
}

TEST_CASE("closure requires a boundary-diagonal leaf metric") {
  const AmbientGeometry g = custom_geometry(
      2, Expr::constant(1.0), Expr::parse("0.2"), Expr::constant(1.0),
      Expr::constant(1.0), "sheared");
  const Grid grid = make_grid(2, Vec{0.0, 0.0}, Vec{1.0, 1.0}, 9, 9);
  const GeometrySamples gs = sample_geometry(g, grid);
  CHECK_THROWS_AS(BoundaryClosure(grid, gs, boundary_constant(grid, 0.0)),
                  UnsupportedRegimeError);
}

TEST_CASE("relaxation with right angles: energy decays to the flat state") {
  const AmbientGeometry geom = euclidean_product(1);
  const Grid grid = make_grid(1, Vec{0.0, 0.0}, Vec{1.0, 0.0}, 65, 1);
  const FlowProblem fp = make_flow_problem(geom, grid, [](const Vec&) { return 0.0; },
                                           boundary_constant(grid, 0.0));
  std::vector<double> u0(static_cast<std::size_t>(grid.count()));
  for (int i = 0; i < grid.n1; ++i)
    u0[static_cast<std::size_t>(i)] = 0.2 * std::cos(M_PI * grid.coord(i, 0)[0]);

  FlowOptions opt;
  opt.dt = 2e-3;
  opt.t_end = 3.0;
  opt.steady_tol = 1e-9;
  const FlowResult fr = run_flow(fp, u0, opt);

  CHECK(fr.compatible);
  CHECK(fr.stop_reason == "steady");
  CHECK(fr.series.back().max_ut < 1e-9);
  CHECK(fr.series.back().max_grad < 1e-7);
  // E decreases monotonically (gamma = 1, H = 0: Lyapunov regime)
  const double h2dt = fp.grid.min_h() * fp.grid.min_h() + opt.dt;
  for (std::size_t k = 1; k < fr.series.size(); ++k)
    CHECK(fr.series[k].energy <= fr.series[k - 1].energy + h2dt * opt.dt);
  // flat limit: E -> box length
  CHECK(fr.series.back().energy == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("explicit and semi-implicit schemes march to the same place") {
  const AmbientGeometry geom = euclidean_product(1);
  const Grid grid = make_grid(1, Vec{0.0, 0.0}, Vec{1.0, 0.0}, 33, 1);
  const FlowProblem fp = make_flow_problem(geom, grid, [](const Vec&) { return 0.0; },
                                           boundary_constant(grid, 0.0));
  std::vector<double> u0(static_cast<std::size_t>(grid.count()));
  for (int i = 0; i < grid.n1; ++i)
    u0[static_cast<std::size_t>(i)] = 0.1 * std::cos(M_PI * grid.coord(i, 0)[0]);

  FlowOptions semi;
  semi.dt = 1e-4;
  semi.t_end = 0.02;
  FlowOptions expl = semi;
  expl.scheme = Scheme::explicit_euler;
  expl.dt = 0.0;  // auto stability-bound step
  const FlowResult a = run_flow(fp, u0, semi);
  const FlowResult b = run_flow(fp, u0, expl);
  CHECK(b.steps > 0);
  CHECK(max_abs_diff(a.final_state.u, b.final_state.u) < 5e-4);
}

TEST_CASE("incompatible data is flagged but marched stably") {
  const FlowProblem fp = translator_problem(33);  // angle sin(1), u0 flat
  std::vector<double> u0(static_cast<std::size_t>(fp.grid.count()), 0.0);
  FlowOptions opt;
  opt.dt = 1e-3;
  opt.t_end = 0.05;
  const FlowResult fr = run_flow(fp, u0, opt);
  CHECK_FALSE(fr.compatible);
  CHECK(fr.compatibility_gap == doctest::Approx(kSin1).epsilon(1e-12));
  CHECK(std::isfinite(fr.series.back().max_ut));
  CHECK(fr.max_W < 10.0);
  // after the transient the profile chases the translator: speed stays
  // O(1), far from the 1/h scale of the initial mismatch
  CHECK(fr.series.back().max_ut < 5.0);
}

TEST_CASE("dissipation identity residual is scheme-order small") {
  const AmbientGeometry geom = exponential_warp(0.5);
  const Grid grid = make_grid(1, Vec{0.0, 0.0}, Vec{1.0, 0.0}, 65, 1);
  const AnalyticField f = field_from_expr(Expr::parse("0.3*sin(2*x) + 0.1"), 1);
  const FlowProblem fp =
      make_flow_problem(geom, grid, [](const Vec& x) { return 0.2 * std::cos(x[0]); },
                        matched_angles(f, geom, grid));
  FlowOptions opt;
  opt.dt = 2e-3;
  opt.t_end = 0.1;
  opt.record_dissipation = true;
  const FlowResult fr = run_flow(fp, sample_values(f, grid), opt);
  REQUIRE(fr.dissipation.size() == static_cast<std::size_t>(fr.steps));
  const double bound = 20.0 * (grid.min_h() * grid.min_h() + opt.dt);
  for (double r : fr.dissipation) CHECK(r < bound);
}

TEST_CASE("runaway explicit step trips the growth guard") {
  const AmbientGeometry geom = euclidean_product(1);
  const Grid grid = make_grid(1, Vec{0.0, 0.0}, Vec{1.0, 0.0}, 33, 1);
  const FlowProblem fp = make_flow_problem(geom, grid, [](const Vec&) { return 0.0; },
                                           boundary_constant(grid, 0.0));
  std::vector<double> u0(static_cast<std::size_t>(grid.count()));
  for (int i = 0; i < grid.n1; ++i)
    u0[static_cast<std::size_t>(i)] = 0.1 * std::cos(3.0 * M_PI * grid.coord(i, 0)[0]);
  FlowOptions opt;
  opt.scheme = Scheme::explicit_euler;
  opt.dt = 8.0 * explicit_step_bound(fp, state_from_values(u0, fp.samples, grid));
  opt.t_end = 50.0;
  CHECK_THROWS_AS(run_flow(fp, u0, opt), SolverError);
}

TEST_CASE("quadrature helpers: exact on constants") {
  const FlowProblem fp = helicoid_problem(9, 17);
  std::vector<double> one(static_cast<std::size_t>(fp.grid.count()), 1.0);
  CHECK(volume_integral(fp, one) == doctest::Approx(1.0).epsilon(1e-13));  // area 1x1
  BoundaryField bone = boundary_constant(fp.grid, 1.0);
  // per edge: (n_t - 2) interior nodes of weight h_t = length minus one
  // tangential cell (the zero-weight corners each drop half a cell twice)
  const double expect = 2.0 * (1.0 - fp.grid.h[1]) + 2.0 * (1.0 - fp.grid.h[0]);
  CHECK(boundary_integral(fp, bone) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("series bookkeeping: t = 0 row, snapshots, steady metadata") {
  const AmbientGeometry geom = euclidean_product(1);
  const Grid grid = make_grid(1, Vec{0.0, 0.0}, Vec{1.0, 0.0}, 17, 1);
  const FlowProblem fp = make_flow_problem(geom, grid, [](const Vec&) { return 0.0; },
                                           boundary_constant(grid, 0.0));
  std::vector<double> u0(static_cast<std::size_t>(grid.count()), 0.25);
  FlowOptions opt;
  opt.dt = 1e-3;
  opt.t_end = 0.01;
  opt.snapshot_every = 4;
  const FlowResult fr = run_flow(fp, u0, opt);
  CHECK(fr.steps == 10);
  REQUIRE(fr.series.size() == 11);
  CHECK(fr.series.front().t == 0.0);
  CHECK(fr.series.front().u_min == doctest::Approx(0.25));
  // snapshots at 0, 4, 8, and the final step
  REQUIRE(fr.snapshots.size() == 4);
  CHECK(fr.snapshots.back().first == doctest::Approx(0.01));
  // constant data with zero angle is already steady: nothing moves
  CHECK(fr.series.back().max_ut < 1e-12);
}
