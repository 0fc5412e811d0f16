#pragma once

// Scalar special functions shared by the rest of the toolkit: the deformed
// logarithm ln_q and the principal branch W_0 of the Lambert W function.
// Everything here is a pure function of its arguments.

#include <cmath>
#include <limits>
#include <string>

#include "light/errors.hpp"

namespace light {

/// Deformation parameter of the q-logarithm. A finite value must be
/// positive; the infinite variant selects the natural logarithm.
class QValue {
 public:
  /// The q -> infinity limit, ln_q == ln.
  static constexpr QValue infinite() noexcept { return QValue{}; }

  static QValue finite(double q) {
    if (!(q > 0.0) || !std::isfinite(q)) {
      throw ValidationError("q must be a positive finite number, got " + std::to_string(q));
    }
    QValue v;
    v.q_ = q;
    return v;
  }

  constexpr bool is_infinite() const noexcept { return q_ == std::numeric_limits<double>::infinity(); }
  /// +inf for the infinite variant.
  constexpr double value() const noexcept { return q_; }

  friend constexpr bool operator==(const QValue&, const QValue&) = default;

 private:
  constexpr QValue() = default;
  double q_ = std::numeric_limits<double>::infinity();
};

/// ln_q(x) = q (x^(1/q) - 1); the infinite variant returns ln(x).
///
/// This family gives ln_1(x) = x - 1 and tends to ln(x) as q grows. It is
/// evaluated as q * expm1(ln(x) / q) so large q keeps full precision.
inline double q_log(QValue q, double x) {
  if (!(x > 0.0)) {
    throw DomainError("q_log: argument must be > 0, got " + std::to_string(x));
  }
  if (q.is_infinite()) return std::log(x);
  const double qv = q.value();
  return qv * std::expm1(std::log(x) / qv);
}

namespace detail {

// 1/e split as hi + lo so that x + 1/e keeps its low bits near the branch point.
inline constexpr double kInvEHi = 0.36787944117144233;
inline constexpr double kInvELo = -1.2428753672788363e-17;
inline constexpr double kE = 2.718281828459045;

// Below this value of p = sqrt(2 (1 + e x)) the branch-point series is used
// directly; its truncation error there is below 1e-16.
inline constexpr double kBranchSeriesCutoff = 0.03;

// W_0 around -1/e as a power series in p.
inline double lambert_branch_series(double p) {
  constexpr double c[] = {-1.0,
                          1.0,
                          -1.0 / 3.0,
                          11.0 / 72.0,
                          -43.0 / 540.0,
                          769.0 / 17280.0,
                          -221.0 / 8505.0,
                          680863.0 / 43545600.0,
                          -1963.0 / 204120.0,
                          226287557.0 / 37623398400.0};
  double acc = 0.0;
  for (int i = 9; i >= 0; --i) acc = acc * p + c[i];
  return acc;
}

}  // namespace detail

/// Settings for lambert_w0. The defaults are the library contract:
/// residual |w e^w - x| <= 1e-12 max(1, |x|) within 64 iterations.
struct LambertOptions {
  /// Arguments in [-1/e - branch_tolerance, -1/e) are treated as -1/e.
  double branch_tolerance = 1e-15;
  double residual_tolerance = 1e-12;
  int max_iterations = 64;
};

/// Principal branch W_0(x) for x >= -1/e: the unique w >= -1 with w e^w = x.
///
/// Initial guess: the branch-point series for x < -0.25, ln(1 + x) scaled
/// for moderate x, and ln x - ln ln x + ln ln x / ln x for x > e. Refined by
/// Halley steps, damped so that an iterate never drops below -1.
inline double lambert_w0(double x, const LambertOptions& opt = {}) {
  using detail::kE;
  if (std::isnan(x)) throw DomainError("lambert_w0: NaN argument");
  if (x == std::numeric_limits<double>::infinity()) return x;

  // z = x + 1/e in extended precision.
  const double z = (x + detail::kInvEHi) + detail::kInvELo;
  if (z < 0.0) {
    if (z >= -opt.branch_tolerance) return -1.0;
    throw DomainError("lambert_w0: argument " + std::to_string(x) + " is below -1/e");
  }
  if (x == 0.0) return 0.0;

  const double p = std::sqrt(2.0 * kE * z);
  if (p < detail::kBranchSeriesCutoff) return detail::lambert_branch_series(p);

  double w;
  if (x < -0.25) {
    w = detail::lambert_branch_series(p);
  } else if (x < kE) {
    w = std::log1p(x) * (1.0 - std::log1p(std::log1p(x)) / (2.0 + std::log1p(x)));
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  const double scale = std::max(1.0, std::abs(x));
  for (int it = 0; it < opt.max_iterations; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    double step = f / denom;
    double next = w - step;
    while (next <= -1.0) {
      step *= 0.5;
      next = w - step;
    }
    const bool small_step = std::abs(next - w) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(next));
    w = next;
    if (small_step) {
      const double residual = std::abs(w * std::exp(w) - x);
      if (residual <= opt.residual_tolerance * scale) return w;
    }
  }
  const double residual = std::abs(w * std::exp(w) - x);
  if (residual <= opt.residual_tolerance * scale) return w;
  throw NumericError("lambert_w0: no convergence for x = " + std::to_string(x));
}

}  // namespace light
