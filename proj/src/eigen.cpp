#include "wolbachia/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wolbachia/errors.hpp"
#include "wolbachia/tridiag.hpp"

namespace wolbachia::eigen {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

/// Symmetrized operator: diagonal `a`, off-diagonal `e` (e[i] couples i and i+1).
struct SymTridiagonal {
  std::vector<double> a;
  std::vector<double> e;
};

void check_problem(const EigenProblem& p) {
  if (!(p.d > 0.0)) throw ValidationError("d", "diffusivity must be positive");
  if (!(p.h0 > 0.0)) throw ValidationError("h0", "domain length must be positive");
  if (p.n < 64) throw ValidationError("n", "resolution below 64 cannot meet the eigenvalue tolerance");
  if (!p.b) throw ValidationError("b", "potential is not set");
}

SymTridiagonal assemble(const EigenProblem& p) {
  const double dx = p.h0 / p.n;
  const double c = p.d / (dx * dx);
  SymTridiagonal m;
  m.a.resize(static_cast<std::size_t>(p.n));
  m.e.assign(static_cast<std::size_t>(p.n) - 1, -c);
  for (int i = 0; i < p.n; ++i) m.a[i] = 2.0 * c - p.b(i * dx);
  // Ghost-node Neumann row is (2c - b0, -2c); scaling phi0 by sqrt(2) symmetrizes it.
  m.e[0] = -kSqrt2 * c;
  return m;
}

/// Number of eigenvalues strictly below x (Sturm sequence via LDL^T pivots).
int count_below(const SymTridiagonal& m, double x, double pivmin) {
  int count = 0;
  double q = m.a[0] - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < m.a.size(); ++i) {
    q = (m.a[i] - x) - m.e[i - 1] * m.e[i - 1] / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

double smallest_by_bisection(const SymTridiagonal& m) {
  const std::size_t n = m.a.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double radius = (i > 0 ? std::abs(m.e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(m.e[i]) : 0.0);
    lo = std::min(lo, m.a[i] - radius);
    hi = std::max(hi, m.a[i] + radius);
    scale = std::max(scale, std::abs(m.a[i]) + radius);
  }
  const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, scale * scale);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < 200 && hi - lo > 2.0 * eps * (std::abs(lo) + std::abs(hi)) + pivmin; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(m, mid, pivmin) >= 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Potential from_field(const model::BirthRateField& b) {
  return [b](double x) { return b(x); };
}

Potential effective_potential(const model::BirthRateField& b1, double delta1,
                              const pde::StationaryProfile& phi_v) {
  if (phi_v.x.size() < 2) throw ValidationError("phi_v", "stationary profile is empty");
  std::vector<model::Sample> samples(phi_v.x.size());
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = {phi_v.x[i], phi_v.phi[i]};
  const model::Field phi = model::Field::tabulated(std::move(samples), "phi_v");
  return [b1, delta1, phi](double x) { return b1(x) - delta1 * phi(x); };
}

double rayleigh_quotient(const EigenProblem& p, std::span<const double> phi) {
  const double dx = p.h0 / p.n;
  double stiffness = 0.0, potential = 0.0, norm = 0.0;
  for (int i = 0; i < p.n; ++i) {
    const double diff = phi[i + 1] - phi[i];
    const double weight = i == 0 ? 0.5 : 1.0;
    stiffness += diff * diff;
    potential += weight * p.b(i * dx) * phi[i] * phi[i];
    norm += weight * phi[i] * phi[i];
  }
  return (p.d / (dx * dx) * stiffness - potential) / norm;
}

EigenResult principal_eigen(const EigenProblem& problem) {
  check_problem(problem);
  const SymTridiagonal m = assemble(problem);
  const double estimate = smallest_by_bisection(m);

  // Shift just below the smallest eigenvalue: A - sigma I is SPD, so the
  // unpivoted tridiagonal solve is stable and converges to the ground state.
  const std::size_t n = m.a.size();
  double scale = 0.0;
  for (double a : m.a) scale = std::max(scale, std::abs(a));
  const double sigma = estimate - 1e-9 * (scale + std::abs(estimate));
  std::vector<double> diag(n), y(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) diag[i] = m.a[i] - sigma;
  std::vector<double> lower(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    upper[i] = m.e[i];
    lower[i + 1] = m.e[i];
  }
  TridiagonalSolver thomas;
  for (int it = 0; it < 5; ++it) {
    thomas.solve(lower, diag, upper, y);
    const double norm = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
    for (double& value : y) value /= norm;
  }

  EigenResult result;
  const double dx = problem.h0 / problem.n;
  result.x.resize(n + 1);
  result.phi1.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) result.x[i] = static_cast<double>(i) * dx;
  result.phi1[0] = kSqrt2 * y[0];
  for (std::size_t i = 1; i < n; ++i) result.phi1[i] = y[i];
  result.phi1[n] = 0.0;

  const double sum = std::accumulate(result.phi1.begin(), result.phi1.end(), 0.0);
  double l2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) l2 += (i == 0 ? 0.5 : 1.0) * result.phi1[i] * result.phi1[i];
  const double factor = (sum < 0.0 ? -1.0 : 1.0) / std::sqrt(l2 * dx);
  for (double& value : result.phi1) value *= factor;

  result.lambda1 = rayleigh_quotient(problem, result.phi1);
  return result;
}

std::string_view to_string(ThresholdKind kind) {
  switch (kind) {
    case ThresholdKind::d1_star: return "d1_star";
    case ThresholdKind::h_star: return "h_star";
    case ThresholdKind::mu_bar: return "mu_bar";
    case ThresholdKind::mu_lower: return "mu_lower";
    case ThresholdKind::mu_star_empirical: return "mu_star_empirical";
  }
  return "unknown";
}

ThresholdKind threshold_kind_from_string(std::string_view text) {
  for (auto kind : {ThresholdKind::d1_star, ThresholdKind::h_star, ThresholdKind::mu_bar,
                    ThresholdKind::mu_lower, ThresholdKind::mu_star_empirical}) {
    if (text == to_string(kind)) return kind;
  }
  throw ValidationError("threshold.kind", "unknown threshold kind '" + std::string(text) + "'");
}

namespace {

/// Bisection for the sign change of a monotone function on [lo, hi].
ThresholdResult bisect_eigen(ThresholdKind kind, const std::function<double(double)>& lambda,
                             std::pair<double, double> bracket, bool increasing) {
  auto [lo, hi] = bracket;
  if (!(lo > 0.0) || !(hi > lo)) throw ValidationError("bracket", "need 0 < lo < hi");
  ThresholdResult result;
  result.kind = kind;
  result.method = "eigen-bisect";
  const double sign = increasing ? 1.0 : -1.0;
  const double f_lo = lambda(lo);
  const double f_hi = lambda(hi);
  result.probes.push_back({lo, f_lo, {}});
  result.probes.push_back({hi, f_hi, {}});
  if (!(sign * f_lo < 0.0 && sign * f_hi > 0.0)) {
    throw BracketError("lambda1 does not change sign across [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
  }
  while (hi - lo > kThresholdRelTol * 0.5 * (lo + hi)) {
    const double mid = 0.5 * (lo + hi);
    const double f = lambda(mid);
    result.probes.push_back({mid, f, {}});
    ++result.iterations;
    if (f == 0.0) {
      lo = hi = mid;
      break;
    }
    if (sign * f < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  result.value = 0.5 * (lo + hi);
  // Keep lo < value < hi strict even after an exact hit.
  result.lo = std::min(lo, std::nextafter(result.value, 0.0));
  result.hi = std::max(hi, std::nextafter(result.value, std::numeric_limits<double>::infinity()));
  return result;
}

void require_positive_somewhere(const Potential& b, double h0) {
  constexpr int kChecks = 4096;
  for (int i = 1; i < kChecks; ++i) {
    if (b(h0 * i / kChecks) > 0.0) return;
  }
  throw DomainError("potential is nowhere positive on (0, h0); no critical diffusivity exists");
}

}  // namespace

ThresholdResult find_d1_star(const Potential& b, double h0, std::pair<double, double> bracket, int n) {
  if (!(h0 > 0.0)) throw ValidationError("h0", "must be positive");
  require_positive_somewhere(b, h0);
  auto lambda = [&](double d) { return principal_eigen({d, b, h0, n}).lambda1; };
  return bisect_eigen(ThresholdKind::d1_star, lambda, bracket, true);
}

ThresholdResult find_h_star(double d, const Potential& b, std::pair<double, double> bracket, int n) {
  if (!(d > 0.0)) throw ValidationError("d", "must be positive");
  auto lambda = [&](double h) { return principal_eigen({d, b, h, n}).lambda1; };
  return bisect_eigen(ThresholdKind::h_star, lambda, bracket, false);
}

std::pair<double, double> auto_bracket(const std::function<double(double)>& lambda, double lo, double hi,
                                       bool increasing, int max_doublings) {
  const double sign = increasing ? 1.0 : -1.0;
  int budget = max_doublings;
  while (sign * lambda(lo) >= 0.0) {
    if (budget-- == 0) throw BracketError("could not find a lower bracket endpoint");
    hi = lo;
    lo *= 0.5;
  }
  budget = max_doublings;
  while (sign * lambda(hi) <= 0.0) {
    if (budget-- == 0) throw BracketError("could not find an upper bracket endpoint");
    lo = hi;
    hi *= 2.0;
  }
  return {lo, hi};
}

}  // namespace wolbachia::eigen
