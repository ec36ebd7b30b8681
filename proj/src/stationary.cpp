#include <algorithm>
#include <cmath>
#include <limits>

#include "wolbachia/errors.hpp"
#include "wolbachia/pde.hpp"
#include "wolbachia/tridiag.hpp"

namespace wolbachia::pde {

namespace {

constexpr int kMaxNewton = 100;

/// Residual of the discrete steady equation with zero flux at both ends.
double residual(std::span<const double> v, std::span<const double> b, double c, double delta,
                std::span<double> out) {
  const std::size_t n = v.size() - 1;
  double worst = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    const double left = j == 0 ? v[1] : v[j - 1];
    const double right = j == n ? v[n - 1] : v[j + 1];
    out[j] = c * (left - 2.0 * v[j] + right) + v[j] * (b[j] - delta * v[j]);
    worst = std::max(worst, std::abs(out[j]));
  }
  return worst;
}

}  // namespace

StationaryProfile solve_stationary_v(const model::ModelParams& params, const Grid& grid) {
  Grid g = grid;
  g.resolve(params.h0);
  const int n = g.n_v;
  const double dx = g.x_max / n;
  const double c = params.d2 / (dx * dx);
  const double delta = params.delta2;

  const double b_low = params.b2.inf_on(g.x_max);
  const double b_high = params.b2.sup_on(g.x_max);
  if (!(b_low > 0.0)) throw DomainError("b2 must be bounded below by a positive constant");

  StationaryProfile profile;
  profile.x.resize(static_cast<std::size_t>(n) + 1);
  std::vector<double> b(profile.x.size());
  for (int j = 0; j <= n; ++j) {
    profile.x[j] = j * dx;
    b[j] = params.b2(profile.x[j]);
  }

  std::vector<double> v(profile.x.size(), std::max(b_high / delta, 1.0));
  std::vector<double> f(v.size()), trial(v.size()), f_trial(v.size()), step(v.size());
  std::vector<double> lower(v.size()), diag(v.size()), upper(v.size());
  const double tolerance = std::max(1e-10 * std::max(1.0, b_high * b_high / delta),
                                    1e3 * std::numeric_limits<double>::epsilon() * c * (b_high / delta));
  TridiagonalSolver thomas;

  double norm = residual(v, b, c, delta, f);
  int iteration = 0;
  for (; iteration < kMaxNewton && norm > tolerance; ++iteration) {
    // Newton step on -F, whose Jacobian is a diagonally dominant M-matrix near the solution.
    for (int j = 0; j <= n; ++j) {
      diag[j] = 2.0 * c - b[j] + 2.0 * delta * v[j];
      lower[j] = -c;
      upper[j] = -c;
      step[j] = f[j];
    }
    upper[0] = -2.0 * c;
    lower[n] = -2.0 * c;
    thomas.solve(lower, diag, upper, step);

    double damping = 1.0;
    double trial_norm = norm;
    for (; damping > 1e-6; damping *= 0.5) {
      bool positive = true;
      for (std::size_t j = 0; j < v.size(); ++j) {
        trial[j] = v[j] + damping * step[j];
        positive = positive && trial[j] > 0.0;
      }
      if (!positive) continue;
      trial_norm = residual(trial, b, c, delta, f_trial);
      if (trial_norm < norm) break;
    }
    if (damping <= 1e-6) break;
    v.swap(trial);
    f.swap(f_trial);
    norm = trial_norm;
  }
  if (norm > tolerance) throw ConvergenceError("stationary v profile did not converge", norm);

  profile.phi = std::move(v);
  profile.residual = norm;
  profile.iterations = iteration;
  return profile;
}

}  // namespace wolbachia::pde
