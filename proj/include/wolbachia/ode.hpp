#pragma once

#include <array>
#include <string_view>
#include <vector>

namespace wolbachia::ode {

/// Released compartment that enters the infected-male birth term (default `rm`).
enum class ImReleaseSource { rm, rf };

struct OdeParams {
  // Well-mixed two-species system.
  double b1 = 1.0;
  double b2 = 1.0;
  double delta1 = 1.0;
  double delta2 = 1.0;
  // Release and compartment system.
  double bI = 2.0;
  double bU = 2.0;
  double delta_sex = 0.5;
  ImReleaseSource im_source = ImReleaseSource::rm;

  /// b1 = bI / 2, b2 = bU / 2, delta_sex = 1/2.
  static OdeParams equal_determination(double bI, double bU, double delta1, double delta2);
  void validate() const;
};

/// Births of the uninfected class are scaled by v / (u + v); below this
/// fraction of the carrying scale the factor is taken as 1.
inline constexpr double kDivEpsilon = 1e-12;
inline constexpr double kClipTolerance = 1e-12;

struct UvTrajectory {
  std::vector<double> t;
  std::vector<std::array<double, 2>> y;  // (u, v)
};

/// du/dt = u (b1 - delta1 (u + v)), dv/dt = v (b2 v / (u + v) - delta2 (u + v)),
/// classical RK4 with fixed dt. Samples every `sample_every` steps plus the final state.
UvTrajectory integrate_uv(const OdeParams& params, double u0, double v0, double horizon, double dt,
                          int sample_every = 1);

/// Right-hand side of the two-species system (exposed for fixed-point checks).
std::array<double, 2> uv_field(const OdeParams& params, const std::array<double, 2>& y, double eps_div);

struct CompartmentState {
  double rf = 0.0;
  double rm = 0.0;
  double If = 0.0;
  double Im = 0.0;
  double Uf = 0.0;
  double Um = 0.0;

  double total() const { return rf + rm + If + Im + Uf + Um; }
  double u() const { return If + Im; }
  double v() const { return Uf + Um; }
  std::array<double, 6> as_array() const { return {rf, rm, If, Im, Uf, Um}; }
  static CompartmentState from_array(const std::array<double, 6>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5]};
  }
};

inline constexpr std::array<std::string_view, 6> kCompartmentNames = {"rf", "rm", "If", "Im", "Uf", "Um"};

struct CompartmentTrajectory {
  std::vector<double> t;
  std::vector<CompartmentState> y;
};

/// Released (rf, rm) and reproductive (If, Im, Uf, Um) compartments with
/// complete cytoplasmic incompatibility; RK4 with fixed dt.
CompartmentTrajectory integrate_compartments(const OdeParams& params, const CompartmentState& state0,
                                             double horizon, double dt, int sample_every = 1);

std::array<double, 6> compartment_field(const OdeParams& params, const std::array<double, 6>& y);

}  // namespace wolbachia::ode
