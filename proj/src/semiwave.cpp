#include "wolbachia/semiwave.hpp"

#include <span>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "wolbachia/errors.hpp"

namespace wolbachia::semiwave {

namespace {

using State = std::array<double, 2>;  // (U, U')

constexpr double kManifoldOffset = 1e-8;
constexpr int kMaxSteps = 2'000'000;

/// Backward flow in s = -x: dU/ds = -P, dP/ds = -(beta P - a U + delta U^2) / d.
struct BackwardField {
  double d, a, delta, beta;
  State operator()(const State& y) const {
    return {-y[1], -(beta * y[1] - a * y[0] + delta * y[0] * y[0]) / d};
  }
};

/// Dormand-Prince 5(4) step; returns the fifth-order solution and the error estimate.
struct StepOutcome {
  State y;
  double error;
};

StepOutcome dopri_step(const BackwardField& f, const State& y, double h, double atol, double rtol) {
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                          a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                          b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  auto combine = [&](std::initializer_list<std::pair<double, const State*>> terms) {
    State out = y;
    for (const auto& [c, k] : terms) {
      out[0] += h * c * (*k)[0];
      out[1] += h * c * (*k)[1];
    }
    return out;
  };
  const State k1 = f(y);
  const State k2 = f(combine({{a21, &k1}}));
  const State k3 = f(combine({{a31, &k1}, {a32, &k2}}));
  const State k4 = f(combine({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const State k5 = f(combine({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const State k6 = f(combine({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  const State next = combine({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  const State k7 = f(next);
  double error = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double est = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(next[i]));
    error = std::max(error, std::abs(est) / scale);
  }
  return {next, error};
}

struct Shooter {
  BackwardField field;
  double capacity;
  double atol;
  double rtol;
  State start;
  double decay;  // stable eigenvalue (negative) of the saddle

  Shooter(const SemiWaveProblem& p, double beta, double rel_tol)
      : field{p.d, p.a, p.delta, beta},
        capacity(p.capacity()),
        atol(1e-4 * rel_tol * p.capacity()),
        rtol(rel_tol) {
    decay = (beta - std::sqrt(beta * beta + 4.0 * p.a * p.d)) / (2.0 * p.d);
    const double offset = kManifoldOffset * capacity;
    start = {capacity - offset, -offset * decay};
  }

  double initial_step() const { return 1e-3 / std::abs(decay); }

  double next_step(double h, double error) const {
    const double factor = error == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(error, -0.2), 0.2, 5.0);
    return h * factor;
  }

  /// Integrates from s = 0 until U crosses zero; returns (crossing s, U' there).
  std::pair<double, double> find_crossing() const {
    State y = start;
    double s = 0.0;
    double h = initial_step();
    const double tiny = 1e-250 * capacity;
    for (int steps = 0; steps < kMaxSteps; ++steps) {
      const StepOutcome out = dopri_step(field, y, h, atol, rtol);
      if (out.error > 1.0) {
        h = next_step(h, out.error);
        continue;
      }
      if (out.y[0] <= 0.0) return locate(y, s, h);
      if (out.y[1] <= 0.0) {
        throw NumericalError("semi-wave orbit turned before crossing U = 0 (beta = " +
                             std::to_string(field.beta) + ")");
      }
      y = out.y;
      s += h;
      if (std::abs(y[0]) < tiny && std::abs(y[1]) < tiny) {
        throw NumericalError("semi-wave orbit decayed below representable range before crossing U = 0 (beta = " +
                             std::to_string(field.beta) + ")");
      }
      h = next_step(h, out.error);
    }
    throw NumericalError("semi-wave manifold integration failed to cross U = 0 (beta = " +
                         std::to_string(field.beta) + ")");
  }

  /// Refines the crossing inside the accepted step [s, s + h] by bisection on the step length.
  std::pair<double, double> locate(const State& y0, double s0, double h) const {
    double lo = 0.0, hi = h;
    State at_hi = dopri_step(field, y0, h, atol, rtol).y;
    for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * (s0 + hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      const State y = dopri_step(field, y0, mid, atol, rtol).y;
      if (y[0] > 0.0) {
        lo = mid;
      } else {
        hi = mid;
        at_hi = y;
      }
    }
    const double slope = at_hi[1];
    return {s0 + hi, slope};
  }

  /// Samples U at increasing backward positions `targets` (all in [0, end]).
  std::vector<double> sample(std::span<const double> targets) const {
    std::vector<double> values;
    values.reserve(targets.size());
    State y = start;
    double s = 0.0;
    double h = initial_step();
    for (double target : targets) {
      while (s < target) {
        const double trial = std::min(h, target - s);
        const StepOutcome out = dopri_step(field, y, trial, atol, rtol);
        if (out.error > 1.0) {
          h = next_step(trial, out.error);
          continue;
        }
        y = out.y;
        s = trial == target - s ? target : s + trial;
        if (trial == h) h = next_step(h, out.error);
      }
      values.push_back(y[0]);
    }
    return values;
  }
};

}  // namespace

void SemiWaveProblem::validate() const {
  if (!(d > 0.0)) throw ValidationError("d", "must be positive");
  if (!(a > 0.0)) throw ValidationError("a", "must be positive");
  if (!(delta > 0.0)) throw ValidationError("delta", "must be positive");
  if (!(mu > 0.0)) throw ValidationError("mu", "must be positive");
}

double SemiWaveProblem::kpp_speed() const { return 2.0 * std::sqrt(a * d); }

Profile solve_profile(const SemiWaveProblem& problem, double beta, const ProfileOptions& options) {
  problem.validate();
  if (!(beta >= 0.0 && beta < problem.kpp_speed())) {
    throw DomainError("beta must lie in [0, 2 sqrt(a d))");
  }
  const Shooter shooter(problem, beta, options.rel_tol);
  const auto [length, slope] = shooter.find_crossing();

  Profile profile;
  profile.uprime0 = slope;
  if (options.samples <= 0) return profile;
  if (options.samples < 5) throw ValidationError("samples", "need at least 5 profile samples");

  const int count = options.samples;
  const double extent = options.extent * std::sqrt(problem.d / problem.a);
  const double dx = extent / (count - 1);
  profile.x.resize(static_cast<std::size_t>(count));
  profile.U.resize(static_cast<std::size_t>(count));

  // Samples with x <= length come from integration (backward position length - x);
  // beyond the manifold start the linearization is exact to O(offset^2).
  std::vector<double> targets;
  std::vector<int> which;
  for (int k = count - 1; k >= 0; --k) {
    const double x = k * dx;
    profile.x[k] = x;
    if (x > length) {
      const double offset = kManifoldOffset * problem.capacity();
      profile.U[k] = problem.capacity() - offset * std::exp(shooter.decay * (x - length));
    } else {
      targets.push_back(length - x);
      which.push_back(k);
    }
  }
  const std::vector<double> values = shooter.sample(targets);
  for (std::size_t i = 0; i < values.size(); ++i) profile.U[which[i]] = values[i];
  return profile;
}

double speed_mismatch(const SemiWaveProblem& problem, double beta) {
  try {
    return problem.mu * solve_profile(problem, beta, {.samples = 0}).uprime0 - beta;
  } catch (const NumericalError&) {
    // Close to the KPP speed the crossing slope underflows; it is zero to machine precision.
    if (beta > 0.9 * problem.kpp_speed()) return -beta;
    throw;
  }
}

double profile_residual(const SemiWaveProblem& p, double beta, const Profile& profile) {
  const std::size_t n = profile.U.size();
  if (n < 5) return 0.0;
  const double dx = profile.x[1] - profile.x[0];
  const auto& U = profile.U;
  double worst = 0.0;
  for (std::size_t k = 2; k + 2 < n; ++k) {
    const double d1 = (-U[k + 2] + 8.0 * U[k + 1] - 8.0 * U[k - 1] + U[k - 2]) / (12.0 * dx);
    const double d2 = (-U[k + 2] + 16.0 * U[k + 1] - 30.0 * U[k] + 16.0 * U[k - 1] - U[k - 2]) / (12.0 * dx * dx);
    const double r = -p.d * d2 + beta * d1 - p.a * U[k] + p.delta * U[k] * U[k];
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

SpeedResult solve_beta0(const SemiWaveProblem& problem, const ProfileOptions& options) {
  problem.validate();
  double lo = 0.0;
  double hi = kUpperFraction * problem.kpp_speed();
  if (!(speed_mismatch(problem, lo) > 0.0) || !(speed_mismatch(problem, hi) < 0.0)) {
    throw NumericalError("semi-wave speed is not bracketed by (0, 2 sqrt(a d)); manifold solver fault");
  }
  SpeedResult result;
  while (hi - lo > kBetaRelTol * 0.5 * (lo + hi)) {
    const double mid = 0.5 * (lo + hi);
    ++result.iterations;
    if (speed_mismatch(problem, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  result.beta0 = 0.5 * (lo + hi);
  result.profile = solve_profile(problem, result.beta0, options);
  result.uprime0 = result.profile.uprime0;
  result.selection_residual = std::abs(problem.mu * result.uprime0 - result.beta0);
  result.ode_residual = profile_residual(problem, result.beta0, result.profile);
  return result;
}

std::pair<double, double> speed_bracket(const model::ModelParams& params) {
  params.validate();
  const auto k1 = params.kappa1();
  const auto k2 = params.kappa2();
  if (!k1 || !k2) throw DomainError("speed bracket needs constant birth rates");
  if (!(*k1 > *k2)) throw DomainError("speed bracket needs kappa1 > kappa2");
  const ProfileOptions slope_only{.samples = 0};
  const double lower = solve_beta0({params.d1, *k1 - *k2, 1.0, params.mu}, slope_only).beta0;
  const double upper = solve_beta0({params.d1, params.b1.constant_value(), params.delta1, params.mu}, slope_only).beta0;
  return {lower, upper};
}

}  // namespace wolbachia::semiwave
