#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wolbachia/model.hpp"
#include "wolbachia/tridiag.hpp"

namespace wolbachia::pde {

inline constexpr std::string_view kSchemeVersion = "front-fixing-imex/1.0";

/// Relative slack on the a-priori bounds M1, M2.
inline constexpr double kBoundSlack = 1e-6;

struct DtPolicy {
  enum class Mode { fixed, adaptive };
  Mode mode = Mode::adaptive;
  double dt_fixed = 1e-3;
  /// Safety factor on the diffusive limit 0.4 * dx^2 / D.
  double cfl = 0.4;
  double dt_max = 1e-2;
};

struct Grid {
  int n_u = 256;
  int n_v = 1024;
  double x_max = 0.0;
  DtPolicy dt_policy;

  /// Fills x_max = 4 h0 when unset, then checks n_u, n_v >= 16 and x_max > h0.
  void resolve(double h0);
};

struct SimState {
  double t = 0.0;
  double h = 0.0;
  double dhdt = 0.0;
  /// u at xi_i = i / n_u on the immobilized domain; w.back() == 0.
  std::vector<double> w;
  /// v at x_j = j x_max / n_v.
  std::vector<double> v;
};

enum class Regime { Spreading, Vanishing, Undecided };
std::string_view to_string(Regime r);

struct SeriesSample {
  double t;
  double h;
  double dhdt;
  double sup_u;
  double sup_v;
  double mass_u;
  /// sup of u over the initial habitat [0, h0].
  double sup_u_core;
};

struct Diagnostics {
  double final_sup_u = 0.0;
  double final_sup_v = 0.0;
  /// Largest front speed seen at any accepted step.
  double lambda_measured = 0.0;
  /// The u-grid spacing h / n_u ended coarser than twice the v spacing.
  bool refine_suggested = false;
  std::int64_t steps = 0;
  std::int64_t rejected_steps = 0;
  std::int64_t bound_violations = 0;
  double dt_min = std::numeric_limits<double>::infinity();
  double dt_max = 0.0;
};

struct RunResult {
  std::vector<SeriesSample> series;
  Regime classification = Regime::Undecided;
  Diagnostics diagnostics;
  SimState final_state;
};

struct StopRules {
  /// Stop once sup u falls below this (0 disables).
  double sup_u_floor = 0.0;
  /// Stop once the front passes this position.
  double h_limit = std::numeric_limits<double>::infinity();
};

struct RunOptions {
  double horizon = 10.0;
  /// Time between series samples; 0 selects horizon / 200.
  double sample_interval = 0.0;
  StopRules stop;
};

/// Hooks used by verification tests; the defaults give the model as stated.
struct SolverHooks {
  /// Keep h fixed at h0 (fixed-domain problems).
  bool pin_front = false;
  /// Hold v at its initial values (v0 = 0 permitted).
  bool freeze_v = false;
  /// Extra source terms f(x, t) added to the u and v equations.
  std::function<double(double, double)> source_u;
  std::function<double(double, double)> source_v;
  /// Called after every accepted step.
  std::function<void(const SimState&)> observer;
};

struct SimulationConfig {
  model::ModelParams params;
  model::InitialData init;
  Grid grid;
  RunOptions run;
};

/// Front-fixing IMEX stepper for the coupled free-boundary system.
///
/// u lives on xi = x / h(t) in [0, 1] and satisfies
///   w_t = (d1 / h^2) w_xixi + (xi h' / h) w_xi + w (b1(xi h) - delta1 (w + v(xi h))),
/// with w_xi(0) = 0 and w(1) = 0. v lives on the fixed grid [0, x_max] with
/// zero flux at both ends and u extended by 0 beyond the front. Diffusion and
/// the front-induced advection are implicit; reactions are explicit Euler.
/// The front obeys h' = -(mu / h) w_xi(1), advanced with Heun's method.
class Stepper {
 public:
  Stepper(model::ModelParams params, Grid grid, SolverHooks hooks = {});

  SimState initial_state(const model::InitialData& init) const;

  /// Largest step allowed by the current policy at `state`.
  double stable_dt(const SimState& state) const;

  /// One step of size dt. Returns std::nullopt when the explicit reaction
  /// undershoots below the clipping tolerance (caller halves dt); throws
  /// NumericalError on NaN.
  std::optional<SimState> try_step(const SimState& state, double dt);

  /// Accepts a step of at most dt, halving on rejection (<= 20 times).
  /// Returns the dt actually taken.
  double advance(SimState& state, double dt);

  /// Front speed -(mu / h) w_xi(1) from the one-sided second-order stencil, floored at 0.
  double front_speed(std::span<const double> w, double h) const;

  SeriesSample sample(const SimState& state) const;

  const model::ModelParams& params() const noexcept { return params_; }
  const Grid& grid() const noexcept { return grid_; }
  const model::DerivedBounds& bounds() const noexcept { return bounds_; }
  std::int64_t steps() const noexcept { return steps_; }
  std::int64_t rejected() const noexcept { return rejected_; }

  void set_bounds(model::DerivedBounds bounds);

 private:
  void interpolate_v_to_u(const SimState& s, std::span<double> out) const;
  void interpolate_u_to_v(const SimState& s, std::span<double> out) const;

  model::ModelParams params_;
  Grid grid_;
  SolverHooks hooks_;
  model::DerivedBounds bounds_;
  double dxi_;
  double dxv_;
  double eps_div_ = 0.0;
  double b1_max_ = 0.0;
  double b2_max_ = 0.0;
  std::vector<double> b2_on_v_;
  std::int64_t steps_ = 0;
  std::int64_t rejected_ = 0;

  // workspace
  std::vector<double> vu_, b1u_, rhs_w_, uv_, rhs_v_;
  std::vector<double> lo_, di_, up_;
  TridiagonalSolver u_solver_;
  TridiagonalSolver v_solver_;
  double v_factored_rv_ = -1.0;
};

/// One step of the scheme (stateless convenience wrapper around Stepper).
SimState step(const SimState& state, const model::ModelParams& params, const Grid& grid, double dt);

/// Thresholds used by classify().
struct ClassifyCriteria {
  double h0 = 0.0;
  /// Front position past which a run counts as spreading.
  double spread_length = 0.0;
  double u_tol = 0.0;
  double u_floor = 0.0;
  /// Fraction of the series span used as the trailing window.
  double window_fraction = 0.1;
  std::size_t min_samples = 20;
};

/// Criteria from the parameters: spread_length = max(3 h0*, 2 h0) for constant
/// coefficients with kappa1 > kappa2, 3 h* (effective potential b1 - delta1 phi_v*)
/// otherwise, 4 h0 when no critical length exists; u_tol = 1e-3 M1, u_floor = 1e-2 M1.
ClassifyCriteria classify_criteria(const model::ModelParams& params, const model::InitialData& init,
                                   const Grid& grid);

Regime classify(std::span<const SeriesSample> series, const ClassifyCriteria& criteria);
Regime classify(std::span<const SeriesSample> series, const model::ModelParams& params,
                const model::InitialData& init, const Grid& grid);

/// Integrates to the horizon (or a stop rule) and classifies the outcome.
/// Throws TruncationError if the front reaches x_max.
RunResult run(const SimulationConfig& config, SolverHooks hooks = {});

/// Least-squares slope of h(t) over the trailing `tail_fraction` of the
/// series. DomainError unless the run was classified Spreading.
double measure_speed(const RunResult& result, double tail_fraction = 0.5);

/// Least-squares slope through (t, h) pairs.
double fit_slope(std::span<const SeriesSample> samples);

struct StationaryProfile {
  std::vector<double> x;
  std::vector<double> phi;
  double residual = 0.0;
  int iterations = 0;
};

/// Positive steady state of d2 v'' + v (b2(x) - delta2 v) = 0 on [0, x_max],
/// zero flux at both ends, by damped Newton from the supersolution
/// max(sup b2 / delta2, 1).
StationaryProfile solve_stationary_v(const model::ModelParams& params, const Grid& grid);

}  // namespace wolbachia::pde
