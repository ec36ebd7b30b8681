#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wolbachia/expression.hpp"

namespace wolbachia::model {

/// One (x, value) pair of a tabulated field.
struct Sample {
  double x;
  double value;
};

/// A scalar function of position on [0, inf): constant, tabulated (linear
/// interpolation, constant extrapolation at both ends) or a closed-form
/// expression. Immutable; copies share the compiled expression.
class Field {
 public:
  enum class Kind { constant, tabulated, expression };

  static Field constant(double value);
  /// Throws ValidationError(field_name) unless x is strictly increasing with >= 2 samples.
  static Field tabulated(std::vector<Sample> samples, const std::string& field_name = "samples");
  static Field expression(Expression expr);

  double operator()(double x) const;

  Kind kind() const noexcept { return kind_; }
  bool is_constant() const noexcept { return kind_ == Kind::constant; }
  /// Value of a constant field; DomainError otherwise.
  double constant_value() const;
  const std::vector<Sample>& samples() const noexcept { return samples_; }
  const std::optional<Expression>& expr() const noexcept { return expr_; }

  /// Supremum and infimum on [0, x_max]. Exact for constant and tabulated
  /// fields; expression fields are sampled at 10^4 + 1 equispaced points.
  double sup_on(double x_max) const;
  double inf_on(double x_max) const;

 private:
  Field() = default;

  Kind kind_ = Kind::constant;
  double value_ = 0.0;
  std::vector<Sample> samples_;
  std::optional<Expression> expr_;
};

/// Number of points used to estimate the bounds of expression fields.
inline constexpr int kSupSamples = 10000;

/// A nonnegative, bounded birth-rate field.
class BirthRateField {
 public:
  /// Validates nonnegativity on [0, check_extent] and reports failures under `field_name`.
  BirthRateField(Field field, const std::string& field_name, double check_extent);
  static BirthRateField constant(double value, const std::string& field_name = "b");

  double operator()(double x) const { return field_(x); }
  const Field& field() const noexcept { return field_; }
  bool is_constant() const noexcept { return field_.is_constant(); }
  double constant_value() const { return field_.constant_value(); }
  double sup_on(double x_max) const { return field_.sup_on(x_max); }
  double inf_on(double x_max) const { return field_.inf_on(x_max); }

 private:
  Field field_;
};

struct ModelParams {
  double d1 = 1.0;
  double d2 = 1.0;
  double delta1 = 1.0;
  double delta2 = 1.0;
  double mu = 1.0;
  double h0 = 1.0;
  BirthRateField b1 = BirthRateField::constant(1.0, "b1");
  BirthRateField b2 = BirthRateField::constant(1.0, "b2");

  /// Throws ValidationError naming the first non-positive scalar.
  void validate() const;

  bool constant_coefficients() const { return b1.is_constant() && b2.is_constant(); }
  /// b1/delta1 and b2/delta2; empty unless the birth rate is constant.
  std::optional<double> kappa1() const;
  std::optional<double> kappa2() const;
};

/// Initial data (u0 on [0, h0], v0 on [0, inf)).
struct InitialData {
  Field u0 = Field::constant(0.0);
  Field v0 = Field::constant(0.0);

  /// u0 = amplitude * cos(pi x / (2 h0)); satisfies u0'(0) = 0 and u0(h0) = 0.
  static InitialData cosine(double amplitude, double h0, Field v0);

  /// Checks u0(h0) = 0, u0 > 0 inside (0, h0), v0 > 0 on [0, x_max] by sampling.
  void validate(double h0, double x_max) const;
  double u0_sup(double h0) const;
  double v0_sup(double x_max) const;
};

struct DerivedBounds {
  double M1 = 0.0;
  double M2 = 0.0;
  /// Front speed bound; measured by the solver, never predicted.
  std::optional<double> Lambda;
};

/// M1 = max(sup b1 / delta1, sup u0), M2 = max(sup b2 / delta2, sup v0).
/// `x_max` is the extent over which b and v0 suprema are taken (default 4 h0).
DerivedBounds derive_bounds(const ModelParams& params, const InitialData& init,
                            std::optional<double> x_max = std::nullopt);

/// Critical initial habitat (pi/2) sqrt(d1 / (delta1 (kappa1 - kappa2))) above
/// which spreading is certain. Requires constant birth rates and kappa1 > kappa2.
double critical_h0_star(const ModelParams& params);

/// Critical length (pi/2) sqrt(d / b) of the Neumann-Dirichlet logistic problem.
double critical_length_Lstar(double d, double b);

}  // namespace wolbachia::model
