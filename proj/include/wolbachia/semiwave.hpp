#pragma once

#include <utility>
#include <vector>

#include "wolbachia/model.hpp"

namespace wolbachia::semiwave {

/// -d U'' + beta U' = a U - delta U^2 on x > 0, U(0) = 0, U(inf) = a / delta,
/// with the Stefan selection mu U'(0) = beta.
struct SemiWaveProblem {
  double d = 1.0;
  double a = 1.0;
  double delta = 1.0;
  double mu = 1.0;

  void validate() const;
  double kpp_speed() const;  // 2 sqrt(a d)
  double capacity() const { return a / delta; }
};

struct Profile {
  double uprime0 = 0.0;
  std::vector<double> x;
  std::vector<double> U;
};

struct ProfileOptions {
  /// Uniform samples on [0, X_profile]; 0 skips the profile (slope only).
  int samples = 4001;
  /// X_profile in units of sqrt(d / a).
  double extent = 40.0;
  double rel_tol = 1e-12;
};

/// Shoots backward along the stable manifold of (a/delta, 0), starting at a
/// displacement 1e-8 a/delta, until U crosses 0; U'(0) is the slope there.
/// DomainError if beta is outside [0, 2 sqrt(a d)); NumericalError if the
/// orbit never crosses U = 0.
Profile solve_profile(const SemiWaveProblem& problem, double beta, const ProfileOptions& options = {});

/// g(beta) = mu U_beta'(0) - beta.
double speed_mismatch(const SemiWaveProblem& problem, double beta);

struct SpeedResult {
  double beta0 = 0.0;
  double uprime0 = 0.0;
  Profile profile;
  /// |mu U'(0) - beta0|.
  double selection_residual = 0.0;
  /// Max |-d U'' + beta U' - a U + delta U^2| over the profile, by finite differences.
  double ode_residual = 0.0;
  int iterations = 0;
};

inline constexpr double kBetaRelTol = 1e-8;
/// Upper bisection endpoint as a fraction of the KPP speed 2 sqrt(a d).
inline constexpr double kUpperFraction = 1.0 - 1e-6;

/// Unique beta0 in (0, 2 sqrt(a d)) with mu U'(0) = beta0, by bisection on g.
SpeedResult solve_beta0(const SemiWaveProblem& problem, const ProfileOptions& options = {});

/// Max residual of the semi-wave ODE on a uniform profile (fourth-order differences).
double profile_residual(const SemiWaveProblem& problem, double beta, const Profile& profile);

/// Spreading-speed bracket for constant coefficients with kappa1 > kappa2:
/// lower = beta0(mu, kappa1 - kappa2, 1, d1), upper = beta0(mu, b1, delta1, d1).
std::pair<double, double> speed_bracket(const model::ModelParams& params);

}  // namespace wolbachia::semiwave
