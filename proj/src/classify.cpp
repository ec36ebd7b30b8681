#include <algorithm>
#include <cmath>

#include "wolbachia/eigen.hpp"
#include "wolbachia/errors.hpp"
#include "wolbachia/pde.hpp"

namespace wolbachia::pde {

namespace {

/// Critical habitat h* for the effective potential b1 - delta1 phi_v*, if one exists.
std::optional<double> heterogeneous_critical_length(const model::ModelParams& params, const Grid& grid) {
  const StationaryProfile phi = solve_stationary_v(params, grid);
  const eigen::Potential potential = eigen::effective_potential(params.b1, params.delta1, phi);
  constexpr int kResolution = 512;
  auto lambda = [&](double h) { return eigen::principal_eigen({params.d1, potential, h, kResolution}).lambda1; };
  try {
    const auto bracket = eigen::auto_bracket(lambda, 0.25 * params.h0, params.h0, false, 30);
    return eigen::find_h_star(params.d1, potential, bracket, kResolution).value;
  } catch (const BracketError&) {
    return std::nullopt;
  }
}

}  // namespace

ClassifyCriteria classify_criteria(const model::ModelParams& params, const model::InitialData& init,
                                   const Grid& grid) {
  Grid resolved = grid;
  resolved.resolve(params.h0);
  const auto bounds = model::derive_bounds(params, init, resolved.x_max);

  ClassifyCriteria c;
  c.h0 = params.h0;
  c.u_tol = 1e-3 * bounds.M1;
  c.u_floor = 1e-2 * bounds.M1;
  const auto k1 = params.kappa1();
  const auto k2 = params.kappa2();
  if (k1 && k2 && *k1 > *k2) {
    c.spread_length = std::max(3.0 * model::critical_h0_star(params), 2.0 * params.h0);
  } else if (const auto h_star = heterogeneous_critical_length(params, resolved)) {
    c.spread_length = 3.0 * *h_star;
  } else {
    c.spread_length = 4.0 * params.h0;
  }
  return c;
}

Regime classify(std::span<const SeriesSample> series, const ClassifyCriteria& criteria) {
  if (series.size() < std::max<std::size_t>(criteria.min_samples, 2)) return Regime::Undecided;
  const double t_end = series.back().t;
  const double span = t_end - series.front().t;
  if (!(span > 0.0)) return Regime::Undecided;
  const double window = criteria.window_fraction * span;

  auto first = std::find_if(series.begin(), series.end(),
                            [&](const SeriesSample& s) { return s.t >= t_end - window; });
  if (std::distance(first, series.end()) < 2) first = series.end() - 2;
  const std::span<const SeriesSample> tail(first, series.end());

  const double eps_h = 1e-6 * criteria.h0 / window;
  const bool front_stalled =
      std::all_of(tail.begin(), tail.end(), [&](const SeriesSample& s) { return s.dhdt < eps_h; });
  bool decaying = tail.back().sup_u < criteria.u_tol;
  for (std::size_t i = 1; i < tail.size() && decaying; ++i) decaying = tail[i].sup_u <= tail[i - 1].sup_u;
  if (front_stalled && decaying) return Regime::Vanishing;

  const bool far = series.back().h > criteria.spread_length;
  const bool persistent = std::all_of(tail.begin(), tail.end(),
                                      [&](const SeriesSample& s) { return s.sup_u_core >= criteria.u_floor; });
  if (far && persistent) return Regime::Spreading;
  return Regime::Undecided;
}

Regime classify(std::span<const SeriesSample> series, const model::ModelParams& params,
                const model::InitialData& init, const Grid& grid) {
  return classify(series, classify_criteria(params, init, grid));
}

}  // namespace wolbachia::pde
