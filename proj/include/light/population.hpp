#pragma once

// Harvested single-species growth laws with proportional harvesting
// H(t) = E N(t):
//
//   Verhulst:  dN/dt = r N (1 - N/K) - E N
//   Gompertz:  dN/dt = r N ln(K/N)   - E N
//
// together with their closed-form solutions through (T, N_T), equilibria and
// the maximum-sustainable-yield rates.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "light/errors.hpp"

namespace light {

enum class GrowthModel { Verhulst, Gompertz, Generalized };

inline std::string_view to_string(GrowthModel m) {
  switch (m) {
    case GrowthModel::Verhulst: return "verhulst";
    case GrowthModel::Gompertz: return "gompertz";
    case GrowthModel::Generalized: return "generalized";
  }
  return "unknown";
}

/// Accepts the long names and the one-letter tags V, G, Q.
inline std::optional<GrowthModel> parse_growth_model(std::string_view s) {
  if (s == "verhulst" || s == "V" || s == "v") return GrowthModel::Verhulst;
  if (s == "gompertz" || s == "G" || s == "g") return GrowthModel::Gompertz;
  if (s == "generalized" || s == "Q" || s == "q") return GrowthModel::Generalized;
  return std::nullopt;
}

struct PopulationParams {
  double r = 1.0;    ///< per-capita growth rate
  double E = 0.0;    ///< per-capita harvesting rate
  double K = 1.0;    ///< carrying capacity
  double T = 0.0;    ///< harvesting start time
  double N_T = 0.5;  ///< population at T

  void validate() const {
    if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("population: r must be > 0");
    if (!(K > 0.0) || !std::isfinite(K)) throw ValidationError("population: K must be > 0");
    if (!(E >= 0.0) || !std::isfinite(E)) throw ValidationError("population: E must be >= 0");
    if (!std::isfinite(T)) throw ValidationError("population: T must be finite");
    if (!(N_T > 0.0 && N_T < K)) throw ValidationError("population: N_T must lie in (0, K)");
  }

  /// Verhulst with E >= r has no positive equilibrium. Such parameters stay
  /// evaluable; callers can consult this flag.
  bool extinction_regime() const noexcept { return E >= r; }
};

/// Relative size below which the Verhulst denominator counts as vanished.
inline constexpr double kPoleTolerance = 1e-12;

/// Harvested Verhulst N(t) = s / (1 - (1 - s/N_T) e^{-(r-E)(t-T)}),
/// s = K (1 - E/r). N(T) returns N_T exactly.
///
/// For E == r the growth term is -r N^2 / K and N = N_T / (1 + r N_T (t-T)/K).
/// Throws NumericError where the denominator vanishes.
inline double verhulst_solution(double t, const PopulationParams& p) {
  p.validate();
  if (t == p.T) return p.N_T;
  const double tau = t - p.T;
  const double k = p.r - p.E;
  double num, den, den_scale = 1.0;
  if (k == 0.0) {
    num = p.N_T;
    den = 1.0 + p.r * p.N_T * tau / p.K;
  } else {
    const double s = p.K * (1.0 - p.E / p.r);
    const double a = 1.0 - s / p.N_T;
    const double kt = k * tau;
    if (kt >= 0.0) {
      num = s;
      den = 1.0 - a * std::exp(-kt);
    } else {
      // multiply through by e^{k tau} <= 1 so nothing overflows
      const double f = std::exp(kt);
      num = s * f;
      den = f - a;
    }
    den_scale = std::max(1.0, std::abs(a));
  }
  const double value = num / den;
  if (std::abs(den) <= kPoleTolerance * den_scale || !std::isfinite(value)) {
    throw NumericError("verhulst_solution: denominator vanishes at t = " + std::to_string(t));
  }
  return value;
}

/// dN/dt of the harvested Verhulst law at population N.
inline double verhulst_rhs(double N, const PopulationParams& p) {
  return p.r * N * (1.0 - N / p.K) - p.E * N;
}

/// Harvested Gompertz N(t) = K exp(-E/r + s e^{-r(t-T)}), s = ln(N_T/K) + E/r.
/// N(T) returns N_T exactly. For s > 0 the value grows without bound as
/// t -> -inf and +inf is returned once it overflows.
inline double gompertz_solution(double t, const PopulationParams& p) {
  p.validate();
  if (t == p.T) return p.N_T;
  const double s = std::log(p.N_T / p.K) + p.E / p.r;
  const double u = -p.r * (t - p.T);
  double inner;
  if (s == 0.0) {
    inner = 0.0;
  } else {
    const double eu = std::exp(u);
    inner = std::isinf(eu) ? std::copysign(eu, s) : s * eu;
  }
  return p.K * std::exp(-p.E / p.r + inner);
}

/// dN/dt of the harvested Gompertz law; the N -> 0 limit is 0.
inline double gompertz_rhs(double N, const PopulationParams& p) {
  if (N == 0.0) return 0.0;
  return p.r * N * (std::log(p.K) - std::log(N)) - p.E * N;
}

enum class Stability { Stable, Unstable, Collapsed };

inline std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Collapsed: return "collapsed";
  }
  return "unknown";
}

struct EquilibriumReport {
  double trivial_point = 0.0;
  double nontrivial_point = 0.0;        ///< N*
  double harvest_at_equilibrium = 0.0;  ///< H = E N*, 0 when N* <= 0
  Stability stability_note = Stability::Stable;
};

/// Positive equilibrium N* of the harvested law.
///   Verhulst: K (1 - E/r)     Gompertz (and the generalised law): K e^{-E/r}
inline double nontrivial_equilibrium(GrowthModel model, double r, double E, double K) {
  if (model == GrowthModel::Verhulst) return K * (1.0 - E / r);
  return K * std::exp(-E / r);
}

/// Sustained harvest H = E N* with N* clamped at zero.
inline double realized_harvest(GrowthModel model, double r, double E, double K = 1.0) {
  const double n_star = nontrivial_equilibrium(model, r, E, K);
  return n_star > 0.0 ? E * n_star : 0.0;
}

/// The generalised law is reported with its q -> infinity (Gompertz) equilibrium.
inline EquilibriumReport equilibria(GrowthModel model, const PopulationParams& p) {
  p.validate();
  EquilibriumReport rep;
  rep.nontrivial_point = nontrivial_equilibrium(model, p.r, p.E, p.K);
  rep.harvest_at_equilibrium = rep.nontrivial_point > 0.0 ? p.E * rep.nontrivial_point : 0.0;
  if (model == GrowthModel::Verhulst && p.extinction_regime()) rep.stability_note = Stability::Collapsed;
  return rep;
}

struct PredefinedRates {
  double E_star;
  double N_star;
  double H_star;
};

/// Harvesting rate maximising the sustained yield E N*(E) for a given r.
///   Verhulst: (r/2, K/2, rK/4)     Gompertz: (r, K/e, rK/e)
inline PredefinedRates predefined_rates(GrowthModel model, double r, double K = 1.0) {
  if (!(r > 0.0)) throw ValidationError("predefined_rates: r must be > 0");
  if (!(K > 0.0)) throw ValidationError("predefined_rates: K must be > 0");
  if (model == GrowthModel::Verhulst) return {r / 2.0, K / 2.0, r * K / 4.0};
  return {r, K / std::numbers::e, r * K / std::numbers::e};
}

}  // namespace light
