#include <algorithm>
#include <cmath>

#include "wolbachia/eigen.hpp"
#include "wolbachia/errors.hpp"

namespace wolbachia::eigen {

namespace {

pde::Regime probe(const pde::SimulationConfig& base, double mu) {
  pde::SimulationConfig config = base;
  config.params.mu = mu;
  return pde::run(config).classification;
}

}  // namespace

ThresholdResult find_mu_threshold(const pde::SimulationConfig& config, ThresholdKind kind,
                                  std::pair<double, double> bracket, int budget, double rel_tol) {
  if (kind != ThresholdKind::mu_bar && kind != ThresholdKind::mu_lower &&
      kind != ThresholdKind::mu_star_empirical) {
    throw ValidationError("threshold.kind", "not a mu threshold");
  }
  auto [lo, hi] = bracket;
  if (!(lo > 0.0) || !(hi > lo)) throw ValidationError("bracket", "need 0 < lo < hi");
  if (budget < 3) throw ValidationError("budget", "need at least 3 probes");

  pde::SimulationConfig base = config;
  base.grid.resolve(base.params.h0);
  const auto criteria = pde::classify_criteria(base.params, base.init, base.grid);
  // Stop probes early once their outcome is settled; the trailing window then
  // covers the end of the truncated run.
  if (base.run.stop.sup_u_floor <= 0.0) base.run.stop.sup_u_floor = 1e-2 * criteria.u_tol;
  const double settled = std::min(1.05 * criteria.spread_length, 0.98 * base.grid.x_max);
  base.run.stop.h_limit = std::min(base.run.stop.h_limit, settled);

  ThresholdResult result;
  result.kind = kind;
  result.method = "sim-bisect";

  auto record = [&](double mu) {
    const pde::Regime outcome = probe(base, mu);
    result.probes.push_back({mu, std::nan(""), std::string(pde::to_string(outcome))});
    if (outcome == pde::Regime::Undecided) {
      throw HorizonError("probe at mu = " + std::to_string(mu) +
                         " is Undecided; lengthen run.horizon");
    }
    return outcome;
  };

  const pde::Regime at_lo = record(lo);
  const pde::Regime at_hi = record(hi);
  if (at_lo == at_hi) {
    throw BracketError("both bracket endpoints classify as " + std::string(pde::to_string(at_lo)));
  }
  if (at_lo != pde::Regime::Vanishing) {
    throw BracketError("expected vanishing at the lower mu and spreading at the upper mu");
  }

  while (static_cast<int>(result.probes.size()) < budget && hi / lo - 1.0 > rel_tol) {
    const double mid = std::sqrt(lo * hi);
    ++result.iterations;
    if (record(mid) == pde::Regime::Vanishing) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  result.lo = lo;
  result.hi = hi;
  result.value = std::sqrt(lo * hi);
  return result;
}

}  // namespace wolbachia::eigen
