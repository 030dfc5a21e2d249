/// @file test_stationary.cpp
/// @brief Translating profiles: Newton solve, analytic Jacobian, speed
///        identities, barriers, pseudo-time fallback.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "../tests/support.hpp"
#include "kgflow/errors.hpp"

using namespace kgflow;
using namespace kgtest;

namespace {

std::vector<double> exact_translator_mean_zero(const Grid& g) {
  std::vector<double> v(static_cast<std::size_t>(g.count()));
  for (int i = 0; i < g.n1; ++i)
    v[static_cast<std::size_t>(i)] = -std::log(std::cos(g.coord(i, 0)[0]));
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  for (double& x : v) x -= mean;
  return v;
}

}  // namespace

TEST_CASE("Newton recovers the translating profile and unit speed") {
  const FlowProblem fp = translator_problem(65);
  SolitonOptions opt;
  opt.tol = 1e-12;
  const SolitonResult sr =
      solve_soliton(fp, std::vector<double>(fp.grid.count(), 0.0), opt);

  CHECK(sr.iterations <= 8);
  CHECK(std::abs(sr.C - 1.0) < 2e-3);
  CHECK(max_abs_diff(sr.v, exact_translator_mean_zero(fp.grid)) < 2e-3);
  // residual history is monotone after the first damped steps
  REQUIRE(sr.residual_history.size() >= 2);
  CHECK(sr.residual_history.back() < 1e-12);
  // mean-zero normalization
  const double mean = std::accumulate(sr.v.begin(), sr.v.end(), 0.0) / sr.v.size();
  CHECK(std::abs(mean) < 1e-12);
}

TEST_CASE("analytic Jacobian agrees with finite differences of the residual") {
  struct Case {
    FlowProblem fp;
    std::uint64_t seed;
  };
  Case cases[] = {{translator_problem(17), 3u}, {helicoid_problem(9, 9), 4u}};
  for (Case& c : cases) {
    CAPTURE(c.fp.geom.name);
    const std::vector<double> v =
        sample_values(random_trig_profile(c.fp.grid.dim, c.seed), c.fp.grid);
    std::vector<double> w =
        sample_values(random_trig_profile(c.fp.grid.dim, c.seed + 100), c.fp.grid);

    const std::vector<double> jw = soliton_jacobian_apply(c.fp, v, w);
    const double eps = 1e-6;
    std::vector<double> vp = v, vm = v;
    for (std::size_t k = 0; k < v.size(); ++k) {
      vp[k] += eps * w[k];
      vm[k] -= eps * w[k];
    }
    const std::vector<double> fp_r = soliton_residual(c.fp, vp, 0.0);
    const std::vector<double> fm_r = soliton_residual(c.fp, vm, 0.0);
    double scale = 1.0, err = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double fd = (fp_r[k] - fm_r[k]) / (2.0 * eps);
      err = std::max(err, std::abs(jw[k] - fd));
      scale = std::max(scale, std::abs(fd));
    }
    CHECK(err / scale < 1e-4);
  }
}

TEST_CASE("residual is invariant under constant shifts") {
  const FlowProblem fp = translator_problem(17);
  const std::vector<double> v =
      sample_values(random_trig_profile(1, 9), fp.grid);
  std::vector<double> shifted = v;
  for (double& x : shifted) x += 0.37;
  const std::vector<double> a = soliton_residual(fp, v, 0.5);
  const std::vector<double> b = soliton_residual(fp, shifted, 0.5);
  CHECK(max_abs_diff(a, b) < 1e-12);
}

TEST_CASE("flux balance: speed formula and its sensitivity to wrong speeds") {
  const FlowProblem fp = translator_problem(65);
  SolitonOptions opt;
  opt.tol = 1e-12;
  const SolitonResult sr =
      solve_soliton(fp, std::vector<double>(fp.grid.count(), 0.0), opt);
  const GraphState st = state_from_values(sr.v, fp.samples, fp.grid);

  const double C = soliton_speed(fp, st);
  CHECK(std::abs(C - sr.C) < 5e-3);
  CHECK(flux_balance_residual(fp, st, C) < 1e-12);  // zero by construction
  const double h = fp.grid.h[0];
  CHECK(flux_balance_residual(fp, st, sr.C) < 5.0 * h * h);

  // int sqrt(gamma)/W = int cos = 2 sin(1) up to O(h^2); shifting C by 0.1
  // must move the residual by 0.1 times that volume
  const double volume = flux_balance_residual(fp, st, C + 1.0) -
                        flux_balance_residual(fp, st, C);
  CHECK(volume == doctest::Approx(2.0 * kSin1).epsilon(1e-3));
  CHECK(flux_balance_residual(fp, st, C + 0.1) > 0.05 * volume);
}

TEST_CASE("a priori speed bound holds for the translator") {
  const FlowProblem fp = translator_problem(65);
  SolitonOptions opt;
  const SolitonResult sr =
      solve_soliton(fp, std::vector<double>(fp.grid.count(), 0.0), opt);
  const GraphState st = state_from_values(sr.v, fp.samples, fp.grid);
  const SpeedBound sb = speed_bound(fp, st, sr.C);
  CHECK(sb.ok);
  CHECK(sb.abs_speed == doctest::Approx(std::abs(sr.C)));
  // W_max * perimeter / volume = sec(1) * 2 / 2 up to discretization
  CHECK(sb.bound == doctest::Approx(1.0 / std::cos(1.0)).epsilon(2e-3));
}

TEST_CASE("pseudo-time marching reaches the same translator") {
  const FlowProblem fp = translator_problem(33);
  SolitonOptions opt;
  opt.method = SolitonMethod::pseudo_time;
  opt.tol = 1e-8;
  opt.max_iter = 20000;
  opt.dt = 5e-3;
  const SolitonResult sr =
      solve_soliton(fp, std::vector<double>(fp.grid.count(), 0.0), opt);
  CHECK(std::abs(sr.C - 1.0) < 5e-3);
  CHECK(max_abs_diff(sr.v, exact_translator_mean_zero(fp.grid)) < 5e-3);
}

TEST_CASE("an exhausted iteration budget raises with the residual history") {
  const FlowProblem fp = translator_problem(33);
  SolitonOptions opt;
  opt.tol = 1e-13;
  opt.max_iter = 1;
  try {
    solve_soliton(fp, std::vector<double>(fp.grid.count(), 0.0), opt);
    CHECK(false);
  } catch (const SolverError& e) {
    CHECK(!e.residual_history().empty());
  }
}

TEST_CASE("flow stays inside the translating envelope of the profile") {
  const FlowProblem fp = translator_problem(33);
  SolitonOptions sopt;
  sopt.tol = 1e-12;
  const SolitonResult sr =
      solve_soliton(fp, std::vector<double>(fp.grid.count(), 0.0), sopt);

  // perturb within the envelope and march
  std::vector<double> u0 = sr.v;
  for (int i = 0; i < fp.grid.n1; ++i)
    u0[static_cast<std::size_t>(i)] +=
        0.2 * std::sin(2.5 * fp.grid.coord(i, 0)[0] + 0.4);
  const double dt = 2e-3, t_end = 0.5;
  const auto viol = sandwich_violations(fp, sr.v, sr.C, u0, dt, t_end);
  REQUIRE(!viol.empty());
  const double h = fp.grid.h[0];
  for (const auto& [t, v] : viol) CHECK(v <= 10.0 * (h * h + dt) * t + 1e-12);
}
