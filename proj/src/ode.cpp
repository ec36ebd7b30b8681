#include "wolbachia/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wolbachia/errors.hpp"

namespace wolbachia::ode {

namespace {

template <std::size_t N, class Field>
std::array<double, N> rk4(const Field& f, const std::array<double, N>& y, double dt) {
  auto shifted = [&](const std::array<double, N>& k, double c) {
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + c * dt * k[i];
    return out;
  };
  const auto k1 = f(y);
  const auto k2 = f(shifted(k1, 0.5));
  const auto k3 = f(shifted(k2, 0.5));
  const auto k4 = f(shifted(k3, 1.0));
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

template <std::size_t N>
void clip(std::array<double, N>& y, double scale, std::int64_t step) {
  for (double& value : y) {
    if (!std::isfinite(value)) throw NumericalError("non-finite state; reduce dt", step);
    if (value < 0.0) {
      if (value < -kClipTolerance * scale) throw NumericalError("negative state beyond clipping tolerance; reduce dt", step);
      value = 0.0;
    }
  }
}

void check_horizon(double horizon, double dt, int sample_every) {
  if (!(horizon > 0.0)) throw ValidationError("horizon", "must be positive");
  if (!(dt > 0.0)) throw ValidationError("dt", "must be positive");
  if (sample_every < 1) throw ValidationError("sample_every", "must be at least 1");
}

template <std::size_t N, class Field, class Emit>
void integrate(const Field& f, std::array<double, N> y, double horizon, double dt, int sample_every,
               double scale, Emit emit) {
  const auto steps = static_cast<std::int64_t>(std::ceil(horizon / dt - 1e-9));
  emit(0.0, y);
  for (std::int64_t k = 1; k <= steps; ++k) {
    y = rk4(f, y, dt);
    clip(y, scale, k);
    if (k % sample_every == 0 || k == steps) emit(static_cast<double>(k) * dt, y);
  }
}

}  // namespace

OdeParams OdeParams::equal_determination(double bI, double bU, double delta1, double delta2) {
  OdeParams p;
  p.bI = bI;
  p.bU = bU;
  p.b1 = bI / 2.0;
  p.b2 = bU / 2.0;
  p.delta1 = delta1;
  p.delta2 = delta2;
  p.delta_sex = 0.5;
  return p;
}

void OdeParams::validate() const {
  const std::pair<const char*, double> positive[] = {{"b1", b1},         {"b2", b2}, {"delta1", delta1},
                                                      {"delta2", delta2}, {"bI", bI}, {"bU", bU}};
  for (const auto& [name, value] : positive) {
    if (!(value > 0.0) || !std::isfinite(value)) throw ValidationError(name, "must be strictly positive");
  }
  if (!(delta_sex >= 0.0 && delta_sex <= 1.0)) throw ValidationError("deltaSex", "must lie in [0, 1]");
}

std::array<double, 2> uv_field(const OdeParams& p, const std::array<double, 2>& y, double eps_div) {
  const auto [u, v] = y;
  const double total = u + v;
  const double ratio = total > eps_div ? v / total : 1.0;
  return {u * (p.b1 - p.delta1 * total), v * (p.b2 * ratio - p.delta2 * total)};
}

UvTrajectory integrate_uv(const OdeParams& params, double u0, double v0, double horizon, double dt,
                          int sample_every) {
  params.validate();
  check_horizon(horizon, dt, sample_every);
  if (!(u0 >= 0.0)) throw ValidationError("u0", "must be nonnegative");
  if (!(v0 >= 0.0)) throw ValidationError("v0", "must be nonnegative");
  const double scale = std::max({params.b1 / params.delta1, params.b2 / params.delta2, u0, v0});
  const double eps_div = kDivEpsilon * std::max(params.b2 / params.delta2, v0);
  UvTrajectory out;
  integrate<2>([&](const std::array<double, 2>& y) { return uv_field(params, y, eps_div); },
               std::array<double, 2>{u0, v0}, horizon, dt, sample_every, scale,
               [&](double t, const std::array<double, 2>& y) {
                 out.t.push_back(t);
                 out.y.push_back(y);
               });
  return out;
}

std::array<double, 6> compartment_field(const OdeParams& p, const std::array<double, 6>& y) {
  const auto [rf, rm, If, Im, Uf, Um] = y;
  const double T = rf + rm + If + Im + Uf + Um;
  const double males = rm + Im + Um;
  // No males means no matings: the suppression factor is then 0.
  const double uninfected_matings = males > kDivEpsilon * T ? Uf * (Um / males) : 0.0;
  const double d = p.delta_sex;
  const double im_release = p.im_source == ImReleaseSource::rm ? rm : rf;
  return {
      -p.delta1 * rf * T,
      -p.delta1 * rm * T,
      d * p.bI * (If + rf) - p.delta1 * If * T,
      (1.0 - d) * p.bI * (If + im_release) - p.delta1 * Im * T,
      d * p.bU * uninfected_matings - p.delta2 * Uf * T,
      (1.0 - d) * p.bU * uninfected_matings - p.delta2 * Um * T,
  };
}

CompartmentTrajectory integrate_compartments(const OdeParams& params, const CompartmentState& state0,
                                             double horizon, double dt, int sample_every) {
  params.validate();
  check_horizon(horizon, dt, sample_every);
  const auto y0 = state0.as_array();
  for (std::size_t i = 0; i < y0.size(); ++i) {
    if (!(y0[i] >= 0.0)) throw ValidationError(std::string(kCompartmentNames[i]), "must be nonnegative");
  }
  const double scale = std::max({state0.total(), params.bI / params.delta1, params.bU / params.delta2});
  CompartmentTrajectory out;
  integrate<6>([&](const std::array<double, 6>& y) { return compartment_field(params, y); }, y0, horizon, dt,
               sample_every, scale, [&](double t, const std::array<double, 6>& y) {
                 out.t.push_back(t);
                 out.y.push_back(CompartmentState::from_array(y));
               });
  return out;
}

}  // namespace wolbachia::ode
