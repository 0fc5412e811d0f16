#pragma once

// The LIGHT activation family: harvested growth curves used as a neuron's
// output nonlinearity.
//
//   LIGHT-V      Verhulst solution through (T, N_T)
//   LIGHT-G      Gompertz solution through (T, N_T)
//   generalised  eps K exp(c e^{-r(t-T)}),  c = ln_q(N_T/K) + E/r
//
// With q -> infinity and eps = e^{-E/r} the generalised form is LIGHT-G.
// Derivatives are the exact t-derivatives of these expressions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "light/errors.hpp"
#include "light/population.hpp"
#include "light/special_functions.hpp"

namespace light {

struct LightParams {
  double r = 1.0;
  double E = 0.0;
  double K = 1.0;
  double T = 0.0;
  double N_T = 0.5;
  QValue q = QValue::infinite();
  /// Unset means e^{-E/r}.
  std::optional<double> epsilon;

  double eps() const { return epsilon ? *epsilon : std::exp(-E / r); }

  /// c = ln_q(N_T/K) + E/r, the coefficient of e^{-r(t-T)} in the exponent.
  double growth_coefficient() const { return q_log(q, N_T / K) + E / r; }

  PopulationParams population() const { return {r, E, K, T, N_T}; }

  void validate() const {
    population().validate();
    if (epsilon && !(*epsilon > 0.0 && std::isfinite(*epsilon))) {
      throw ValidationError("light: epsilon must be a positive finite number");
    }
  }
};

enum class ConfigTag { Default, R, Eonly, Er };

inline std::string_view to_string(ConfigTag t) {
  switch (t) {
    case ConfigTag::Default: return "default";
    case ConfigTag::R: return "r";
    case ConfigTag::Eonly: return "E";
    case ConfigTag::Er: return "Er";
  }
  return "unknown";
}

inline std::optional<ConfigTag> parse_config_tag(std::string_view s) {
  if (s == "default" || s == "-default-") return ConfigTag::Default;
  if (s == "r" || s == "-r-") return ConfigTag::R;
  if (s == "E" || s == "-E-") return ConfigTag::Eonly;
  if (s == "Er" || s == "-Er-") return ConfigTag::Er;
  return std::nullopt;
}

struct NeuronConfiguration {
  ConfigTag tag = ConfigTag::Default;
  LightParams params;
};

/// T and N_T used by the non-default configurations unless overridden: the
/// lowest points of the search grid's T and N_T axes. For the rate-maximising
/// E of either law this is the only grid pair giving an increasing, pole-free,
/// non-constant curve.
inline constexpr double kDefaultHarvestStart = 0.1;
inline constexpr double kDefaultInitialPopulation = 0.2;

struct LightOverrides {
  std::optional<double> r;
  std::optional<double> E;
  std::optional<double> T;
  std::optional<double> N_T;
  std::optional<QValue> q;
  std::optional<double> epsilon;
};

/// Fills a LightParams for `tag`. Frozen fields:
///   Default  r = 1, E = 0, K = 1, T = 0, N_T = 1/2 (the sigmoid)
///   R        E = 0
///   Eonly    r = 1
///   Er       none
/// Overriding a frozen field throws ValidationError.
inline LightParams config_to_params(ConfigTag tag, const LightOverrides& o = {}) {
  auto frozen = [&](bool set, const char* field) {
    if (set) {
      throw ValidationError(std::string("configuration -") + std::string(to_string(tag)) + "- freezes " + field);
    }
  };
  LightParams p;
  p.K = 1.0;
  if (tag == ConfigTag::Default) {
    frozen(o.r.has_value(), "r");
    frozen(o.E.has_value(), "E");
    frozen(o.T.has_value(), "T");
    frozen(o.N_T.has_value(), "N_T");
    p.r = 1.0;
    p.E = 0.0;
    p.T = 0.0;
    p.N_T = 0.5;
  } else {
    if (tag == ConfigTag::R) frozen(o.E.has_value(), "E");
    if (tag == ConfigTag::Eonly) frozen(o.r.has_value(), "r");
    p.r = o.r.value_or(1.0);
    p.E = o.E.value_or(0.0);
    p.T = o.T.value_or(kDefaultHarvestStart);
    p.N_T = o.N_T.value_or(kDefaultInitialPopulation);
  }
  if (o.q) p.q = *o.q;
  p.epsilon = o.epsilon;
  p.validate();
  return p;
}

inline NeuronConfiguration make_configuration(ConfigTag tag, const LightOverrides& o = {}) {
  return {tag, config_to_params(tag, o)};
}

namespace detail {

// c * e^u without producing NaN when e^u overflows.
inline double scaled_exp(double c, double u) {
  if (c == 0.0) return 0.0;
  const double eu = std::exp(u);
  return std::isinf(eu) ? std::copysign(eu, c) : c * eu;
}

// eps K exp(c e^{-r(t-T)})
inline double generalized_value(double t, double eps, double K, double r, double T, double c) {
  return eps * K * std::exp(scaled_exp(c, -r * (t - T)));
}

// -eps K r c e^{u} exp(c e^{u}),  u = -r(t-T); combined into one exponent.
inline double generalized_slope(double t, double eps, double K, double r, double T, double c) {
  if (c == 0.0) return 0.0;
  const double u = -r * (t - T);
  const double inner = scaled_exp(c, u);
  const double expo = std::isinf(inner) ? inner : u + inner;
  if (std::isinf(expo) && expo > 0.0) {
    return -std::copysign(std::numeric_limits<double>::infinity(), c);
  }
  return -eps * K * r * c * std::exp(expo);
}

inline double verhulst_slope(double t, const PopulationParams& p) {
  const double tau = t - p.T;
  const double k = p.r - p.E;
  double value;
  if (k == 0.0) {
    const double den = 1.0 + p.r * p.N_T * tau / p.K;
    value = -(p.r * p.N_T * p.N_T / p.K) / (den * den);
  } else {
    const double s = p.K * (1.0 - p.E / p.r);
    const double a = 1.0 - s / p.N_T;
    const double kt = k * tau;
    double den;
    if (kt >= 0.0) {
      const double e = std::exp(-kt);
      den = 1.0 - a * e;
      value = -s * a * k * e / (den * den);
    } else {
      const double f = std::exp(kt);
      den = f - a;
      value = -s * a * k * f / (den * den);
    }
    if (std::abs(den) <= kPoleTolerance * std::max(1.0, std::abs(a))) value = std::numeric_limits<double>::infinity();
  }
  if (!std::isfinite(value)) {
    throw NumericError("light_derivative: Verhulst denominator vanishes at t = " + std::to_string(t));
  }
  return value;
}

}  // namespace detail

/// l(t) for the chosen growth law.
inline double light_forward(double t, GrowthModel model, const LightParams& p) {
  switch (model) {
    case GrowthModel::Verhulst: return verhulst_solution(t, p.population());
    case GrowthModel::Gompertz: return gompertz_solution(t, p.population());
    case GrowthModel::Generalized:
      p.validate();
      return detail::generalized_value(t, p.eps(), p.K, p.r, p.T, p.growth_coefficient());
  }
  throw ValidationError("light_forward: unknown growth model");
}

/// dl/dt, exact.
///
///   V: -s a k e^{-k tau} / (1 - a e^{-k tau})^2,  k = r - E, a = 1 - s/N_T
///   G and generalised: -eps K r c e^{-r tau} exp(c e^{-r tau})
inline double light_derivative(double t, GrowthModel model, const LightParams& p) {
  switch (model) {
    case GrowthModel::Verhulst: {
      const auto pp = p.population();
      pp.validate();
      return detail::verhulst_slope(t, pp);
    }
    case GrowthModel::Gompertz: {
      const auto pp = p.population();
      pp.validate();
      const double c = std::log(p.N_T / p.K) + p.E / p.r;
      return detail::generalized_slope(t, std::exp(-p.E / p.r), p.K, p.r, p.T, c);
    }
    case GrowthModel::Generalized:
      p.validate();
      return detail::generalized_slope(t, p.eps(), p.K, p.r, p.T, p.growth_coefficient());
  }
  throw ValidationError("light_derivative: unknown growth model");
}

/// lim_{t -> +inf} l(t): s for Verhulst when E < r (0 otherwise), K e^{-E/r}
/// for Gompertz, eps K for the generalised form.
inline double light_upper_limit(GrowthModel model, const LightParams& p) {
  switch (model) {
    case GrowthModel::Verhulst: return p.E < p.r ? p.K * (1.0 - p.E / p.r) : 0.0;
    case GrowthModel::Gompertz: return p.K * std::exp(-p.E / p.r);
    case GrowthModel::Generalized: return p.eps() * p.K;
  }
  return p.K;
}

/// l' written as a function of l (the phase-plane view):
///   V: (r - E) l (1 - l/s)     G: r l ln(K e^{-E/r} / l)     generalised: r l ln(eps K / l)
/// Zero at l = 0 and at the nontrivial equilibrium.
inline double light_phase(double l, GrowthModel model, const LightParams& p) {
  if (l == 0.0) return 0.0;
  switch (model) {
    case GrowthModel::Verhulst: return verhulst_rhs(l, p.population());
    case GrowthModel::Gompertz: return gompertz_rhs(l, p.population());
    case GrowthModel::Generalized: return p.r * l * (std::log(p.eps() * p.K) - std::log(l));
  }
  return 0.0;
}

/// Output level that separates the two predicted classes: half of the
/// curve's upper limit, or K/2 when that limit is not positive. Equal to K/2
/// whenever E = 0.
inline double decision_threshold(GrowthModel model, const LightParams& p) {
  const double top = light_upper_limit(model, p);
  return top > 0.0 ? 0.5 * top : 0.5 * p.K;
}

}  // namespace light
