#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wolbachia/model.hpp"
#include "wolbachia/pde.hpp"

namespace wolbachia::eigen {

/// Potential b(x) in -d phi'' - b(x) phi = lambda phi. Unlike a birth rate it
/// may be negative (e.g. b1 - delta1 phi_v*).
using Potential = std::function<double(double)>;

Potential from_field(const model::BirthRateField& b);

/// b1(x) - delta1 * phi(x), phi linearly interpolated from a stationary profile.
Potential effective_potential(const model::BirthRateField& b1, double delta1,
                              const pde::StationaryProfile& phi_v);

struct EigenProblem {
  double d = 1.0;
  Potential b;
  double h0 = 1.0;
  int n = 2048;
};

struct EigenResult {
  double lambda1 = 0.0;
  std::vector<double> x;
  /// Positive on [0, h0), zero at h0, trapezoidal integral of phi^2 equal to 1.
  std::vector<double> phi1;
};

/// Principal eigenvalue of -d phi'' - b phi = lambda phi, phi'(0) = 0, phi(h0) = 0.
///
/// Second-order finite differences on x_i = i h0 / n; the Neumann end uses a
/// ghost node and the row is rescaled so the matrix is symmetric; the Dirichlet
/// node is eliminated. The smallest eigenvalue is bracketed by Sturm-sequence
/// bisection, the eigenvector comes from shifted inverse iteration, and the
/// reported eigenvalue is its Rayleigh quotient.
EigenResult principal_eigen(const EigenProblem& problem);

/// Discrete Rayleigh quotient of `phi` (samples on x_i = i h0 / n, phi[n] = 0)
/// for the same discretization as principal_eigen.
double rayleigh_quotient(const EigenProblem& problem, std::span<const double> phi);

enum class ThresholdKind { d1_star, h_star, mu_bar, mu_lower, mu_star_empirical };
std::string_view to_string(ThresholdKind kind);
ThresholdKind threshold_kind_from_string(std::string_view text);

struct Probe {
  double value;
  /// Eigenvalue at the probe (eigen-bisect) or NaN.
  double lambda;
  /// Classification for sim-bisect probes, empty otherwise.
  std::string outcome;
};

struct ThresholdResult {
  ThresholdKind kind = ThresholdKind::d1_star;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
  std::string method;  // "eigen-bisect" or "sim-bisect"
  std::vector<Probe> probes;
};

inline constexpr double kThresholdRelTol = 1e-8;

/// Root of d -> lambda1(d) on (bracket.first, bracket.second).
/// DomainError unless b is positive somewhere on (0, h0); BracketError when
/// lambda1 does not change sign across the bracket.
ThresholdResult find_d1_star(const Potential& b, double h0, std::pair<double, double> bracket, int n = 2048);

/// Root of h0 -> lambda1(h0); lambda1 decreases in h0.
ThresholdResult find_h_star(double d, const Potential& b, std::pair<double, double> bracket, int n = 2048);

/// Expands [lo, hi] geometrically until lambda1 changes sign; BracketError after
/// `max_doublings`. `increasing` is the monotonicity direction of lambda1.
std::pair<double, double> auto_bracket(const std::function<double(double)>& lambda, double lo, double hi,
                                       bool increasing, int max_doublings = 60);

/// Flip point of the spreading/vanishing classification in mu, by bisection in
/// log mu. Every probe is a full pde::run with mu replaced. Iterates until the
/// bracket is within `rel_tol` or `budget` probes (endpoints included) are spent.
ThresholdResult find_mu_threshold(const pde::SimulationConfig& config, ThresholdKind kind,
                                  std::pair<double, double> bracket, int budget = 24,
                                  double rel_tol = 1e-3);

}  // namespace wolbachia::eigen
