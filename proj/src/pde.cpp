#include "wolbachia/pde.hpp"

#include <algorithm>
#include <cmath>

#include "wolbachia/errors.hpp"
#include "wolbachia/kernels.hpp"
#include "wolbachia/tridiag.hpp"

namespace wolbachia::pde {

namespace {

constexpr int kMaxHalvings = 20;
constexpr double kClipTolerance = 1e-12;

double max_of(std::span<const double> values) { return *std::max_element(values.begin(), values.end()); }

std::pair<double, double> range_of(std::span<const double> values) {
  double lo = values[0], hi = values[0];
  for (double x : values) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return {lo, hi};
}

/// Clips tiny negative undershoots; false when one exceeds the tolerance.
bool clip_undershoot(std::span<double> values, double tolerance) {
  for (double& value : values) {
    if (value < 0.0) {
      if (value < -tolerance) return false;
      value = 0.0;
    }
  }
  return true;
}

bool all_finite(std::span<const double> values) {
  // A NaN or infinity anywhere makes the product-with-zero NaN.
  double probe = 0.0;
  for (double x : values) probe += x * 0.0;
  return probe == 0.0;
}

}  // namespace

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Spreading: return "Spreading";
    case Regime::Vanishing: return "Vanishing";
    case Regime::Undecided: return "Undecided";
  }
  return "Undecided";
}

void Grid::resolve(double h0) {
  if (x_max <= 0.0) x_max = 4.0 * h0;
  if (n_u < 16) throw ValidationError("grid.n_u", "must be at least 16");
  if (n_v < 16) throw ValidationError("grid.n_v", "must be at least 16");
  if (!(x_max > h0)) throw ValidationError("grid.x_max", "must exceed h0");
  if (dt_policy.mode == DtPolicy::Mode::fixed && !(dt_policy.dt_fixed > 0.0)) {
    throw ValidationError("grid.dt", "fixed time step must be positive");
  }
  if (!(dt_policy.cfl > 0.0)) throw ValidationError("grid.cfl", "must be positive");
  if (!(dt_policy.dt_max > 0.0)) throw ValidationError("grid.dt_max", "must be positive");
}

Stepper::Stepper(model::ModelParams params, Grid grid, SolverHooks hooks)
    : params_(std::move(params)), grid_(grid), hooks_(std::move(hooks)) {
  params_.validate();
  grid_.resolve(params_.h0);
  dxi_ = 1.0 / grid_.n_u;
  dxv_ = grid_.x_max / grid_.n_v;
  model::DerivedBounds b;
  b.M1 = params_.b1.sup_on(grid_.x_max) / params_.delta1;
  b.M2 = params_.b2.sup_on(grid_.x_max) / params_.delta2;
  set_bounds(b);

  b2_on_v_.resize(static_cast<std::size_t>(grid_.n_v) + 1);
  for (int j = 0; j <= grid_.n_v; ++j) b2_on_v_[j] = params_.b2(j * dxv_);
  b1_max_ = params_.b1.sup_on(grid_.x_max);
  b2_max_ = std::max(params_.b2.sup_on(grid_.x_max), max_of(b2_on_v_));

  const std::size_t nu = static_cast<std::size_t>(grid_.n_u) + 1;
  const std::size_t nv = static_cast<std::size_t>(grid_.n_v) + 1;
  vu_.resize(nu);
  b1u_.resize(nu);
  rhs_w_.resize(nu);
  uv_.resize(nv);
  rhs_v_.resize(nv);
  const std::size_t widest = std::max(nu, nv);
  lo_.resize(widest);
  di_.resize(widest);
  up_.resize(widest);
  if (params_.b1.is_constant()) std::fill(b1u_.begin(), b1u_.end(), params_.b1.constant_value());
}

void Stepper::set_bounds(model::DerivedBounds bounds) {
  bounds_ = bounds;
  eps_div_ = 1e-12 * std::max(bounds_.M2, 1e-300);
}

SimState Stepper::initial_state(const model::InitialData& init) const {
  SimState s;
  s.t = 0.0;
  s.h = params_.h0;
  s.w.resize(static_cast<std::size_t>(grid_.n_u) + 1);
  for (int i = 0; i < grid_.n_u; ++i) s.w[i] = init.u0(i * dxi_ * params_.h0);
  s.w.back() = 0.0;
  s.v.resize(static_cast<std::size_t>(grid_.n_v) + 1);
  for (int j = 0; j <= grid_.n_v; ++j) s.v[j] = init.v0(j * dxv_);
  s.dhdt = hooks_.pin_front ? 0.0 : front_speed(s.w, s.h);
  return s;
}

double Stepper::front_speed(std::span<const double> w, double h) const {
  const std::size_t n = w.size() - 1;
  const double slope = (3.0 * w[n] - 4.0 * w[n - 1] + w[n - 2]) / (2.0 * dxi_);
  return std::max(0.0, -params_.mu / h * slope);
}

double Stepper::stable_dt(const SimState& state) const {
  const DtPolicy& policy = grid_.dt_policy;
  if (policy.mode == DtPolicy::Mode::fixed) return policy.dt_fixed;
  const double du = state.h * state.h * dxi_ * dxi_ / params_.d1;
  double dt = policy.cfl * du;
  const double M1 = bounds_.M1;
  const double M2 = bounds_.M2;
  dt = std::min(dt, 0.25 / (b1_max_ + params_.delta1 * (2.0 * M1 + M2)));
  if (!hooks_.freeze_v) {
    dt = std::min(dt, policy.cfl * dxv_ * dxv_ / params_.d2);
    dt = std::min(dt, 0.25 / (b2_max_ + params_.delta2 * (2.0 * M2 + M1)));
  }
  return std::min(dt, policy.dt_max);
}

void Stepper::interpolate_v_to_u(const SimState& s, std::span<double> out) const {
  const int nv = grid_.n_v;
  for (int i = 0; i <= grid_.n_u; ++i) {
    const double pos = i * dxi_ * s.h / dxv_;
    const int j = static_cast<int>(pos);
    if (j >= nv) {
      out[i] = s.v[nv];
      continue;
    }
    const double frac = pos - j;
    out[i] = s.v[j] + frac * (s.v[j + 1] - s.v[j]);
  }
}

void Stepper::interpolate_u_to_v(const SimState& s, std::span<double> out) const {
  const int nu = grid_.n_u;
  const double scale = dxv_ / s.h * nu;
  int inside = std::min(grid_.n_v + 1, static_cast<int>(std::ceil(s.h / dxv_)));
  while (inside > 0 && (inside - 1) * dxv_ >= s.h) --inside;
  while (inside <= grid_.n_v && inside * dxv_ < s.h) ++inside;
  std::fill(out.begin() + inside, out.begin() + grid_.n_v + 1, 0.0);
  for (int j = 0; j < inside; ++j) {
    const double pos = j * scale;
    const int i = std::min(static_cast<int>(pos), nu - 1);
    const double frac = pos - i;
    out[j] = s.w[i] + frac * (s.w[i + 1] - s.w[i]);
  }
}

std::optional<SimState> Stepper::try_step(const SimState& state, double dt) {
  const auto& k = kernels::active();
  const int n = grid_.n_u;
  const double h = state.h;
  const double speed = hooks_.pin_front ? 0.0 : front_speed(state.w, h);

  SimState next;
  next.t = state.t + dt;

  // u: explicit reaction on the moving nodes.
  interpolate_v_to_u(state, vu_);
  if (!params_.b1.is_constant()) {
    for (int i = 0; i <= n; ++i) b1u_[i] = params_.b1(i * dxi_ * h);
  }
  const std::size_t nu = static_cast<std::size_t>(n);
  k.u_reaction(std::span<const double>(state.w).first(nu), std::span<const double>(vu_).first(nu),
               std::span<const double>(b1u_).first(nu), params_.delta1, dt,
               std::span<double>(rhs_w_).first(nu));
  if (hooks_.source_u) {
    for (int i = 0; i < n; ++i) rhs_w_[i] += dt * hooks_.source_u(i * dxi_ * h, state.t);
  }
  if (!clip_undershoot(std::span<double>(rhs_w_).first(nu), kClipTolerance * bounds_.M1)) return std::nullopt;

  // u: implicit diffusion + advection, central where the cell Peclet number
  // allows an M-matrix, upwind otherwise.
  const double r = dt * params_.d1 / (h * h) / (dxi_ * dxi_);
  di_[0] = 1.0 + 2.0 * r;
  up_[0] = -2.0 * r;
  for (int i = 1; i < n; ++i) {
    const double a = dt * (i * dxi_) * speed / h / (2.0 * dxi_);
    if (a <= r) {
      lo_[i] = -(r - a);
      di_[i] = 1.0 + 2.0 * r;
      up_[i] = -(r + a);
    } else {
      lo_[i] = -r;
      di_[i] = 1.0 + 2.0 * r + 2.0 * a;
      up_[i] = -(r + 2.0 * a);
    }
  }
  u_solver_.solve(std::span<const double>(lo_).first(nu), std::span<const double>(di_).first(nu),
                  std::span<const double>(up_).first(nu), std::span<double>(rhs_w_).first(nu));
  next.w.assign(rhs_w_.begin(), rhs_w_.begin() + n);
  next.w.push_back(0.0);

  // v on the fixed grid.
  if (hooks_.freeze_v) {
    next.v = state.v;
  } else {
    const std::size_t nv = static_cast<std::size_t>(grid_.n_v) + 1;
    rhs_v_.resize(nv);
    interpolate_u_to_v(state, uv_);
    k.v_reaction(state.v, uv_, b2_on_v_, params_.delta2, eps_div_, dt, rhs_v_);
    if (hooks_.source_v) {
      for (std::size_t j = 0; j < nv; ++j) rhs_v_[j] += dt * hooks_.source_v(j * dxv_, state.t);
    }
    if (!clip_undershoot(rhs_v_, kClipTolerance * bounds_.M2)) return std::nullopt;
    const double rv = dt * params_.d2 / (dxv_ * dxv_);
    if (rv != v_factored_rv_) {
      for (std::size_t j = 0; j < nv; ++j) {
        lo_[j] = -rv;
        di_[j] = 1.0 + 2.0 * rv;
        up_[j] = -rv;
      }
      up_[0] = -2.0 * rv;
      lo_[nv - 1] = -2.0 * rv;
      v_solver_.factor(std::span<const double>(lo_).first(nv), std::span<const double>(di_).first(nv),
                       std::span<const double>(up_).first(nv));
      v_factored_rv_ = rv;
    }
    v_solver_.solve_factored(rhs_v_);
    next.v.swap(rhs_v_);
  }

  // Front: Heun predictor-corrector.
  if (hooks_.pin_front) {
    next.h = h;
    next.dhdt = 0.0;
  } else {
    const double predicted = h + dt * speed;
    const double corrected_speed = front_speed(next.w, predicted);
    next.h = h + 0.5 * dt * (speed + corrected_speed);
    next.dhdt = front_speed(next.w, next.h);
  }

  if (!std::isfinite(next.h) || !all_finite(next.w) || !all_finite(next.v)) {
    throw NumericalError("non-finite value in solution", steps_);
  }
  return next;
}

double Stepper::advance(SimState& state, double dt) {
  for (int attempt = 0; attempt <= kMaxHalvings; ++attempt) {
    if (auto next = try_step(state, dt)) {
      std::swap(state, *next);
      if (next->v.size() == state.v.size()) rhs_v_.swap(next->v);
      ++steps_;
      return dt;
    }
    ++rejected_;
    dt *= 0.5;
  }
  throw NumericalError("negative undershoot persists after 20 step halvings", steps_);
}

SeriesSample Stepper::sample(const SimState& state) const {
  SeriesSample s{};
  s.t = state.t;
  s.h = state.h;
  s.dhdt = state.dhdt;
  s.sup_u = max_of(state.w);
  s.sup_v = max_of(state.v);
  double sum = 0.0;
  for (double w : state.w) sum += w;
  sum -= 0.5 * (state.w.front() + state.w.back());
  s.mass_u = state.h * dxi_ * sum;
  const double core = params_.h0 * (1.0 + 1e-12);
  s.sup_u_core = 0.0;
  for (int i = 0; i <= grid_.n_u && i * dxi_ * state.h <= core; ++i) {
    s.sup_u_core = std::max(s.sup_u_core, state.w[i]);
  }
  return s;
}

SimState step(const SimState& state, const model::ModelParams& params, const Grid& grid, double dt) {
  Stepper stepper(params, grid);
  SimState next = state;
  stepper.advance(next, dt);
  return next;
}

RunResult run(const SimulationConfig& config, SolverHooks hooks) {
  config.params.validate();
  Grid grid = config.grid;
  grid.resolve(config.params.h0);
  if (!hooks.freeze_v) config.init.validate(config.params.h0, grid.x_max);
  if (!(config.run.horizon > 0.0)) throw ValidationError("run.horizon", "must be positive");

  Stepper stepper(config.params, grid, hooks);
  const auto bounds = model::derive_bounds(config.params, config.init, grid.x_max);
  stepper.set_bounds(bounds);
  const double upper_u = bounds.M1 * (1.0 + kBoundSlack);
  const double upper_v = bounds.M2 * (1.0 + kBoundSlack);

  const double horizon = config.run.horizon;
  const double interval = config.run.sample_interval > 0.0 ? config.run.sample_interval : horizon / 200.0;
  const StopRules& stop = config.run.stop;

  RunResult result;
  SimState state = stepper.initial_state(config.init);
  result.series.push_back(stepper.sample(state));
  Diagnostics& diag = result.diagnostics;
  diag.lambda_measured = state.dhdt;

  long next_index = 1;
  bool stopped = false;
  while (!stopped && state.t < horizon) {
    const double target = std::min(static_cast<double>(next_index) * interval, horizon);
    const double limit = stepper.stable_dt(state);
    const bool clamped = target - state.t <= limit;
    const double wanted = clamped ? target - state.t : limit;
    const double taken = stepper.advance(state, wanted);
    if ((clamped && taken == wanted) || std::abs(state.t - target) <= 1e-12 * std::max(1.0, target)) {
      state.t = target;
    }

    diag.dt_min = std::min(diag.dt_min, taken);
    diag.dt_max = std::max(diag.dt_max, taken);
    diag.lambda_measured = std::max(diag.lambda_measured, state.dhdt);
    const auto [wmin, wmax] = range_of(state.w);
    const auto [vmin, vmax] = range_of(state.v);
    const bool v_ok = hooks.freeze_v || (vmin > 0.0 && vmax <= upper_v);
    if (wmin < 0.0 || wmax > upper_u || !v_ok || state.dhdt < 0.0) ++diag.bound_violations;
    if (hooks.observer) hooks.observer(state);

    if (state.h >= grid.x_max) {
      throw TruncationError("truncation exceeded; increase Xmax", stepper.steps());
    }

    const bool stop_now = (stop.sup_u_floor > 0.0 && wmax < stop.sup_u_floor) || state.h >= stop.h_limit;
    if (state.t == target || stop_now) {
      result.series.push_back(stepper.sample(state));
      if (state.t == target) ++next_index;
    }
    stopped = stop_now;
  }

  diag.steps = stepper.steps();
  diag.rejected_steps = stepper.rejected();
  diag.final_sup_u = result.series.back().sup_u;
  diag.final_sup_v = result.series.back().sup_v;
  diag.refine_suggested = state.h / grid.n_u > 2.0 * grid.x_max / grid.n_v;
  result.final_state = std::move(state);
  result.classification = classify(result.series, classify_criteria(config.params, config.init, grid));
  return result;
}

double fit_slope(std::span<const SeriesSample> samples) {
  if (samples.size() < 2) throw DomainError("slope fit needs at least two samples");
  double tm = 0.0, hm = 0.0;
  for (const auto& s : samples) {
    tm += s.t;
    hm += s.h;
  }
  tm /= static_cast<double>(samples.size());
  hm /= static_cast<double>(samples.size());
  double sth = 0.0, stt = 0.0;
  for (const auto& s : samples) {
    sth += (s.t - tm) * (s.h - hm);
    stt += (s.t - tm) * (s.t - tm);
  }
  return sth / stt;
}

double measure_speed(const RunResult& result, double tail_fraction) {
  if (result.classification != Regime::Spreading) {
    throw DomainError("front speed is only defined for spreading runs");
  }
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw ValidationError("tail_fraction", "must lie in (0, 1]");
  }
  const std::size_t n = result.series.size();
  const auto count = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(tail_fraction * n)));
  return fit_slope(std::span(result.series).last(std::min(count, n)));
}

}  // namespace wolbachia::pde
