#include "wolbachia/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wolbachia/errors.hpp"

namespace wolbachia::model {

Field Field::constant(double value) {
  Field f;
  f.kind_ = Kind::constant;
  f.value_ = value;
  return f;
}

Field Field::tabulated(std::vector<Sample> samples, const std::string& field_name) {
  if (samples.size() < 2) throw ValidationError(field_name, "tabulated field needs at least 2 samples");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].x > samples[i - 1].x)) {
      throw ValidationError(field_name, "sample abscissae must be strictly increasing");
    }
  }
  Field f;
  f.kind_ = Kind::tabulated;
  f.samples_ = std::move(samples);
  return f;
}

Field Field::expression(Expression expr) {
  Field f;
  f.kind_ = Kind::expression;
  f.expr_ = std::move(expr);
  return f;
}

double Field::operator()(double x) const {
  switch (kind_) {
    case Kind::constant:
      return value_;
    case Kind::expression:
      return (*expr_)(x);
    case Kind::tabulated:
      break;
  }
  if (x <= samples_.front().x) return samples_.front().value;
  if (x >= samples_.back().x) return samples_.back().value;
  const auto hi = std::upper_bound(samples_.begin(), samples_.end(), x,
                                   [](double lhs, const Sample& s) { return lhs < s.x; });
  const auto lo = hi - 1;
  const double theta = (x - lo->x) / (hi->x - lo->x);
  return lo->value + theta * (hi->value - lo->value);
}

double Field::constant_value() const {
  if (kind_ != Kind::constant) throw DomainError("field is not constant");
  return value_;
}

namespace {

template <class Pick>
double extremum(const Field& f, double x_max, Pick pick) {
  switch (f.kind()) {
    case Field::Kind::constant:
      return f(0.0);
    case Field::Kind::tabulated: {
      // Piecewise linear: extrema sit at sample points inside the range or at its ends.
      double best = pick(f(0.0), f(x_max));
      for (const Sample& s : f.samples()) {
        if (s.x > 0.0 && s.x < x_max) best = pick(best, s.value);
      }
      return best;
    }
    case Field::Kind::expression:
      break;
  }
  double best = f(0.0);
  for (int i = 1; i <= kSupSamples; ++i) {
    best = pick(best, f(x_max * static_cast<double>(i) / kSupSamples));
  }
  return best;
}

}  // namespace

double Field::sup_on(double x_max) const {
  return extremum(*this, x_max, [](double a, double b) { return std::max(a, b); });
}

double Field::inf_on(double x_max) const {
  return extremum(*this, x_max, [](double a, double b) { return std::min(a, b); });
}

BirthRateField::BirthRateField(Field field, const std::string& field_name, double check_extent)
    : field_(std::move(field)) {
  const double lowest = field_.kind() == Field::Kind::tabulated
                            ? std::min_element(field_.samples().begin(), field_.samples().end(),
                                               [](const Sample& a, const Sample& b) {
                                                 return a.value < b.value;
                                               })->value
                            : field_.inf_on(check_extent);
  if (!std::isfinite(lowest) || lowest < 0.0) {
    throw ValidationError(field_name, "birth rate must be nonnegative and finite");
  }
  if (!std::isfinite(field_.sup_on(check_extent))) {
    throw ValidationError(field_name, "birth rate must be bounded");
  }
}

BirthRateField BirthRateField::constant(double value, const std::string& field_name) {
  return BirthRateField(Field::constant(value), field_name, 1.0);
}

void ModelParams::validate() const {
  const std::pair<const char*, double> scalars[] = {
      {"d1", d1}, {"d2", d2}, {"delta1", delta1}, {"delta2", delta2}, {"mu", mu}, {"h0", h0}};
  for (const auto& [name, value] : scalars) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      std::ostringstream msg;
      msg << "must be strictly positive and finite (got " << value << ")";
      throw ValidationError(name, msg.str());
    }
  }
}

std::optional<double> ModelParams::kappa1() const {
  if (!b1.is_constant()) return std::nullopt;
  return b1.constant_value() / delta1;
}

std::optional<double> ModelParams::kappa2() const {
  if (!b2.is_constant()) return std::nullopt;
  return b2.constant_value() / delta2;
}

InitialData InitialData::cosine(double amplitude, double h0, Field v0) {
  std::ostringstream text;
  text.precision(17);
  text << amplitude << "*cos(pi*x/(2*" << h0 << "))";
  return InitialData{Field::expression(Expression::parse(text.str())), std::move(v0)};
}

void InitialData::validate(double h0, double x_max) const {
  const double peak = u0_sup(h0);
  if (!(peak > 0.0) || !std::isfinite(peak)) throw ValidationError("init.u0", "u0 must be positive on (0, h0)");
  if (std::abs(u0(h0)) > 1e-12 * peak) throw ValidationError("init.u0", "u0(h0) must vanish");
  constexpr int kChecks = 1000;
  for (int i = 0; i < kChecks; ++i) {
    const double x = h0 * (static_cast<double>(i) + 0.5) / kChecks;
    if (!(u0(x) > 0.0)) throw ValidationError("init.u0", "u0 must be positive on (0, h0)");
  }
  const double vlow = v0.inf_on(x_max);
  if (!(vlow > 0.0)) throw ValidationError("init.v0", "v0 must be positive");
  if (!std::isfinite(v0.sup_on(x_max))) throw ValidationError("init.v0", "v0 must be bounded");
}

double InitialData::u0_sup(double h0) const { return u0.sup_on(h0); }

double InitialData::v0_sup(double x_max) const { return v0.sup_on(x_max); }

DerivedBounds derive_bounds(const ModelParams& params, const InitialData& init,
                            std::optional<double> x_max) {
  params.validate();
  const double extent = x_max.value_or(4.0 * params.h0);
  DerivedBounds bounds;
  bounds.M1 = std::max(params.b1.sup_on(extent) / params.delta1, init.u0_sup(params.h0));
  bounds.M2 = std::max(params.b2.sup_on(extent) / params.delta2, init.v0_sup(extent));
  return bounds;
}

double critical_h0_star(const ModelParams& params) {
  params.validate();
  const auto k1 = params.kappa1();
  const auto k2 = params.kappa2();
  if (!k1 || !k2) throw DomainError("h0* needs constant birth rates");
  if (!(*k1 > *k2)) throw DomainError("fitness-cost regime, h0* undefined (kappa1 <= kappa2)");
  return std::numbers::pi / 2.0 * std::sqrt(params.d1 / (params.delta1 * (*k1 - *k2)));
}

double critical_length_Lstar(double d, double b) {
  if (!(d > 0.0)) throw ValidationError("d", "must be strictly positive");
  if (!(b > 0.0)) throw ValidationError("b", "must be strictly positive");
  return std::numbers::pi / 2.0 * std::sqrt(d / b);
}

}  // namespace wolbachia::model
