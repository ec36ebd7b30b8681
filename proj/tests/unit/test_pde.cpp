#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wolbachia/errors.hpp"
#include "wolbachia/expression.hpp"
#include "wolbachia/model.hpp"
#include "wolbachia/pde.hpp"
#include "wolbachia/tridiag.hpp"

using namespace wolbachia;
using namespace wolbachia::pde;
using model::BirthRateField;
using model::Field;

namespace {
constexpr double kPi = std::numbers::pi;

SimulationConfig base_config(double h0, double mu, double horizon, int n_u = 64) {
  SimulationConfig c;
  c.params.d1 = 1.0;
  c.params.d2 = 1.0;
  c.params.delta1 = 1.0;
  c.params.delta2 = 1.0;
  c.params.mu = mu;
  c.params.h0 = h0;
  c.params.b1 = BirthRateField::constant(2.0, "b1");
  c.params.b2 = BirthRateField::constant(1.0, "b2");
  c.init = model::InitialData::cosine(1.0, h0, Field::constant(1.0));
  c.grid.n_u = n_u;
  c.grid.n_v = 4 * n_u;
  c.run.horizon = horizon;
  return c;
}

// Steady manufactured solution with the front pinned: u* = A cos(pi x / (2 h0)),
// v* = B + C cos(pi x / x_max); sources cancel the residual of the spatial operator.
double manufactured_error(int n_u) {
  constexpr double A = 0.5, B = 1.0, C = 0.3, h0 = 1.0, xmax = 4.0;
  SimulationConfig c;
  c.params.d1 = 1.0;
  c.params.d2 = 0.5;
  c.params.delta1 = 1.0;
  c.params.delta2 = 1.0;
  c.params.mu = 1.0;
  c.params.h0 = h0;
  c.params.b1 = BirthRateField::constant(0.5, "b1");
  c.params.b2 = BirthRateField::constant(0.5, "b2");
  c.grid.n_u = n_u;
  c.grid.n_v = 4 * n_u;
  c.grid.x_max = xmax;
  c.grid.dt_policy.mode = DtPolicy::Mode::fixed;
  c.grid.dt_policy.dt_fixed = 0.02;
  c.run.horizon = 60.0;
  c.run.sample_interval = 1.0;

  const double ku = kPi / (2.0 * h0), kv = kPi / xmax;
  auto us = [=](double x) { return x < h0 ? A * std::cos(ku * x) : 0.0; };
  auto vs = [=](double x) { return B + C * std::cos(kv * x); };
  c.init = {Field::expression(Expression::parse("0.5*cos(pi*x/2)")),
            Field::expression(Expression::parse("1 + 0.3*cos(pi*x/4)"))};

  const auto& p = c.params;
  SolverHooks hooks;
  hooks.pin_front = true;
  hooks.source_u = [=](double x, double) {
    const double u = us(x), v = vs(x);
    return -(-p.d1 * ku * ku * u + u * (0.5 - p.delta1 * (u + v)));
  };
  hooks.source_v = [=](double x, double) {
    const double u = us(x), v = vs(x);
    const double vxx = -C * kv * kv * std::cos(kv * x);
    return -(p.d2 * vxx + v * (0.5 * v / (u + v) - p.delta2 * (u + v)));
  };
  const RunResult r = run(c, hooks);
  double err = 0.0;
  for (int i = 0; i <= n_u; ++i) err = std::max(err, std::abs(r.final_state.w[i] - us(i * h0 / n_u)));
  for (int j = 0; j <= c.grid.n_v; ++j) err = std::max(err, std::abs(r.final_state.v[j] - vs(j * xmax / c.grid.n_v)));
  return err;
}
}  // namespace

TEST_CASE("tridiagonal solver reproduces a known solution") {
  std::vector<double> lo{0.0, -1.0, -1.0, -1.0}, di{4.0, 4.0, 4.0, 4.0}, up{-1.0, -1.0, -1.0, 0.0};
  const std::vector<double> x{1.0, 2.0, -1.0, 0.5};
  std::vector<double> rhs(4);
  for (int i = 0; i < 4; ++i) {
    rhs[i] = di[i] * x[i] + (i > 0 ? lo[i] * x[i - 1] : 0.0) + (i < 3 ? up[i] * x[i + 1] : 0.0);
  }
  TridiagonalSolver().solve(lo, di, up, rhs);
  for (int i = 0; i < 4; ++i) CHECK(rhs[i] == doctest::Approx(x[i]).epsilon(1e-14));
}

TEST_CASE("manufactured steady state converges at second order") {
  const double e1 = manufactured_error(16);
  const double e2 = manufactured_error(32);
  const double e3 = manufactured_error(64);
  CHECK(e1 / e2 >= 3.5);
  CHECK(e2 / e3 >= 3.5);
}

TEST_CASE("series lands exactly on the sample times") {
  auto c = base_config(1.0, 1.0, 2.0);
  c.run.sample_interval = 0.25;
  const auto r = run(c);
  REQUIRE(r.series.size() == 9);
  for (std::size_t k = 0; k < r.series.size(); ++k) CHECK(r.series[k].t == 0.25 * static_cast<double>(k));
  CHECK(r.diagnostics.steps > 0);
  CHECK(r.diagnostics.dt_max <= c.grid.dt_policy.dt_max);
}

TEST_CASE("bounds hold and the front never recedes") {
  auto c = base_config(1.2, 2.0, 6.0);
  c.grid.x_max = 16.0;
  double last_h = c.params.h0;
  bool monotone = true;
  SolverHooks hooks;
  hooks.observer = [&](const SimState& s) {
    monotone = monotone && s.h >= last_h && s.dhdt >= 0.0;
    last_h = s.h;
  };
  const auto r = run(c, hooks);
  CHECK(monotone);
  CHECK(r.diagnostics.bound_violations == 0);
  CHECK(r.final_state.w.back() == 0.0);
}

TEST_CASE("front reaching the far field raises truncation") {
  auto c = base_config(kPi, 1.0, 40.0);
  c.grid.x_max = 1.5 * kPi;
  CHECK_THROWS_AS(run(c), TruncationError);
}

TEST_CASE("large habitat spreads, tiny habitat with slow front vanishes") {
  auto spread = base_config(kPi, 1.0, 20.0);
  spread.grid.x_max = 48.0;
  const auto rs = run(spread);
  CHECK(rs.classification == Regime::Spreading);
  const double speed = measure_speed(rs);
  CHECK(speed > 0.0);

  auto vanish = base_config(0.25 * kPi * std::sqrt(0.5), 1e-4, 3.0);
  const auto rv = run(vanish);
  CHECK(rv.classification == Regime::Vanishing);
  CHECK_THROWS_AS(measure_speed(rv), DomainError);
}

TEST_CASE("classification needs enough samples") {
  std::vector<SeriesSample> few(5, SeriesSample{0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0});
  for (std::size_t k = 0; k < few.size(); ++k) few[k].t = static_cast<double>(k);
  ClassifyCriteria crit;
  crit.h0 = 1.0;
  crit.spread_length = 3.0;
  crit.u_tol = 1e-3;
  crit.u_floor = 1e-2;
  CHECK(classify(few, crit) == Regime::Undecided);
}

TEST_CASE("classify criteria from parameters") {
  const auto c = base_config(1.0, 1.0, 1.0);
  Grid g = c.grid;
  g.resolve(c.params.h0);
  const auto crit = classify_criteria(c.params, c.init, g);
  CHECK(crit.spread_length == doctest::Approx(3.0 * kPi / 2.0));
  CHECK(crit.u_tol == doctest::Approx(2e-3));
  CHECK(crit.u_floor == doctest::Approx(2e-2));
}

TEST_CASE("stationary v with heterogeneous birth rate") {
  auto c = base_config(1.0, 1.0, 1.0);
  c.params.b2 = BirthRateField(Field::expression(Expression::parse("1 + 0.5*cos(x)")), "b2", 8.0);
  c.grid.x_max = 8.0;
  Grid g = c.grid;
  g.resolve(1.0);
  const auto prof = solve_stationary_v(c.params, g);
  CHECK(prof.residual < 1e-8);
  for (double v : prof.phi) {
    CHECK(v > 0.5);
    CHECK(v < 1.5);
  }
  auto cost = c.params;
  cost.b2 = BirthRateField(Field::expression(Expression::parse("max(0, 1 - x)")), "b2", 8.0);
  CHECK_THROWS_AS(solve_stationary_v(cost, g), DomainError);
}

TEST_CASE("grid validation") {
  Grid g;
  g.n_u = 8;
  CHECK_THROWS_AS(g.resolve(1.0), ValidationError);
  Grid h;
  h.x_max = 0.5;
  CHECK_THROWS_AS(h.resolve(1.0), ValidationError);
}

TEST_CASE("runs are deterministic") {
  const auto c = base_config(1.5, 1.0, 3.0);
  const auto a = run(c);
  const auto b = run(c);
  REQUIRE(a.series.size() == b.series.size());
  for (std::size_t k = 0; k < a.series.size(); ++k) {
    CHECK(a.series[k].h == b.series[k].h);
    CHECK(a.series[k].sup_u == b.series[k].sup_u);
  }
}
