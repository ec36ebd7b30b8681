#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wolbachia/eigen.hpp"
#include "wolbachia/errors.hpp"
#include "wolbachia/model.hpp"
#include "wolbachia/pde.hpp"

using namespace wolbachia;
using namespace wolbachia::eigen;

namespace {
constexpr double kPi = std::numbers::pi;

double closed_form(double d, double b, double h0) {
  const double k = kPi / (2.0 * h0);
  return d * k * k - b;
}

Potential constant(double b) {
  return [b](double) { return b; };
}

// Exact eigenvalue of the discrete operator for constant b: the ground mode
// cos(pi x / (2 h0)) is an eigenvector of the ghost-node stencil.
double discrete_closed_form(double d, double b, double h0, int n) {
  const double dx = h0 / n;
  const double s = std::sin(kPi / (4.0 * n));
  return 4.0 * d / (dx * dx) * s * s - b;
}

// Independent dense oracle: cyclic Jacobi rotations on the same symmetric matrix.
double dense_smallest(double d, const Potential& b, double h0, int n) {
  const double dx = h0 / n;
  const double c = d / (dx * dx);
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    a[i][i] = 2.0 * c - b(i * dx);
    if (i + 1 < n) a[i][i + 1] = a[i + 1][i] = -c;
  }
  a[0][1] = a[1][0] = -std::sqrt(2.0) * c;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-26 * c * c) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0), sn = t * cs;
        for (int k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = cs * akp - sn * akq;
          a[k][q] = sn * akp + cs * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = cs * apk - sn * aqk;
          a[q][k] = sn * apk + cs * aqk;
        }
      }
    }
  }
  double lo = a[0][0];
  for (int i = 1; i < n; ++i) lo = std::min(lo, a[i][i]);
  return lo;
}
}  // namespace

TEST_CASE("constant potential matches the closed form") {
  for (double d : {0.3, 1.0, 4.0}) {
    for (double b : {0.0, 0.7, 3.0}) {
      for (double h0 : {0.5, 2.0, 7.0}) {
        const auto r = principal_eigen({d, constant(b), h0, 2048});
        const double scale = d * std::pow(kPi / (2.0 * h0), 2);
        CHECK(std::abs(r.lambda1 - discrete_closed_form(d, b, h0, 2048)) <= 1e-10 * scale);
        CHECK(std::abs(r.lambda1 - closed_form(d, b, h0)) <= 1e-7 * scale);
      }
    }
  }
}

TEST_CASE("eigenfunction is positive, normalized and vanishes at h0") {
  const Potential b = [](double x) { return 1.0 + 0.5 * std::cos(3.0 * x); };
  const EigenProblem problem{0.8, b, 2.5, 512};
  const auto r = principal_eigen(problem);
  REQUIRE(r.phi1.size() == 513);
  CHECK(r.phi1.back() == 0.0);
  for (std::size_t i = 0; i + 1 < r.phi1.size(); ++i) CHECK(r.phi1[i] > 0.0);
  const double dx = problem.h0 / problem.n;
  double norm = 0.5 * r.phi1[0] * r.phi1[0];
  for (std::size_t i = 1; i + 1 < r.phi1.size(); ++i) norm += r.phi1[i] * r.phi1[i];
  CHECK(norm * dx == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(rayleigh_quotient(problem, r.phi1) - r.lambda1) <= 1e-8 * std::abs(r.lambda1));
}

TEST_CASE("matches an independent dense Jacobi oracle") {
  const Potential b = [](double x) { return 2.0 * std::exp(-x) + 0.3; };
  for (int n : {64, 128}) {
    const double oracle = dense_smallest(0.5, b, 3.0, n);
    const auto r = principal_eigen({0.5, b, 3.0, n});
    CHECK(std::abs(r.lambda1 - oracle) <= 1e-10 * std::abs(oracle));
  }
}

TEST_CASE("second-order convergence in n") {
  const auto e = [](int n) { return std::abs(principal_eigen({1.0, constant(0.4), 1.3, n}).lambda1 - closed_form(1.0, 0.4, 1.3)); };
  const double ratio = e(128) / e(256);
  CHECK(ratio > 3.8);
  CHECK(ratio < 4.2);
}

TEST_CASE("problem validation") {
  CHECK_THROWS_AS(principal_eigen({1.0, constant(1.0), 1.0, 32}), ValidationError);
  CHECK_THROWS_AS(principal_eigen({0.0, constant(1.0), 1.0, 128}), ValidationError);
  CHECK_THROWS_AS(principal_eigen({1.0, constant(1.0), -1.0, 128}), ValidationError);
}

TEST_CASE("d1 star and h star closed forms") {
  const double b = 1.7, h0 = 1.9, d = 0.6;
  const auto ds = find_d1_star(constant(b), h0, {0.1, 10.0});
  CHECK(ds.value == doctest::Approx(b * std::pow(2.0 * h0 / kPi, 2)).epsilon(1e-6));
  CHECK(ds.method == "eigen-bisect");
  CHECK(ds.lo < ds.value);
  CHECK(ds.value < ds.hi);
  const auto hs = find_h_star(d, constant(b), {0.1, 10.0});
  CHECK(hs.value == doctest::Approx(kPi / 2.0 * std::sqrt(d / b)).epsilon(1e-6));

  const auto unit = find_d1_star(constant(1.0), kPi / 2.0, {0.25, 4.0});
  CHECK(unit.value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("threshold errors") {
  CHECK_THROWS_AS(find_d1_star(constant(1.0), 1.0, {5.0, 10.0}), BracketError);
  CHECK_THROWS_AS(find_d1_star(constant(0.0), 1.0, {0.1, 10.0}), DomainError);
  const auto widened = auto_bracket([](double d) { return d - 37.0; }, 1.0, 2.0, true);
  CHECK(widened.first < 37.0);
  CHECK(widened.second > 37.0);
}

TEST_CASE("larger potential never lowers d1 star") {
  const Potential small = [](double x) { return 0.5 + 0.5 * std::sin(x) * std::sin(x); };
  const Potential large = [&](double x) { return small(x) + 0.2 * (1.0 + std::cos(2.0 * x)); };
  const double a = find_d1_star(small, 2.0, {0.01, 100.0}).value;
  const double c = find_d1_star(large, 2.0, {0.01, 100.0}).value;
  CHECK(c >= a);
}

TEST_CASE("effective potential with constant coefficients reproduces h0 star") {
  model::ModelParams p;
  p.d1 = 1.0;
  p.d2 = 1.0;
  p.delta1 = 1.0;
  p.delta2 = 1.0;
  p.b1 = model::BirthRateField::constant(2.0, "b1");
  p.b2 = model::BirthRateField::constant(1.0, "b2");
  p.h0 = 1.0;
  pde::Grid grid;
  grid.resolve(p.h0);
  const auto profile = pde::solve_stationary_v(p, grid);
  for (double v : profile.phi) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  const auto hs = find_h_star(p.d1, effective_potential(p.b1, p.delta1, profile), {0.1, 10.0});
  CHECK(hs.value == doctest::Approx(model::critical_h0_star(p)).epsilon(1e-6));
}

TEST_CASE("monotonicity over random tabulated potentials") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> val(0.2, 3.0);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<model::Sample> s;
    for (int k = 0; k <= 8; ++k) s.push_back({k * 1.5, val(rng)});
    const auto field = model::BirthRateField(model::Field::tabulated(s), "b", 12.0);
    const auto b = from_field(field);
    double prev = -1e300;
    for (int k = 0; k < 10; ++k) {
      const double lam = principal_eigen({0.1 + 0.5 * k, b, 2.0, 512}).lambda1;
      CHECK(lam > prev);
      prev = lam;
    }
    prev = 1e300;
    for (int k = 0; k < 10; ++k) {
      const double lam = principal_eigen({1.0, b, 0.5 + 1.0 * k, 512}).lambda1;
      CHECK(lam < prev);
      prev = lam;
    }
  }
}
