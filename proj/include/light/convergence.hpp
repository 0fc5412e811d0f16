#pragma once

// Margin convergence of gradient descent with a LIGHT output on separable
// data.
//
// For the generalised form l(u) = eps K exp(c e^{-r(u-T)}) the slope factors
// as -l'(u) = a e^{-f(u)} with a = eps K r c and
//
//   f(u) = r(u - T) - c e^{-r(u-T)}.
//
// Solving f(g) = ln(t + C) with w = r(g - T) = L + z gives z e^z = c e^{-L},
// so
//
//   g(t) = T + (L + W0(c e^{-L})) / r,   L = ln(t + C).
//
// W0 is the branch on which f is increasing (z >= -1 <=> f' >= 0).
// rate_g_printed keeps the closed form with the extra E/r^2 offset and the
// exponent -E/r - T r - ln t; it is not the inverse of f.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "light/datasets.hpp"
#include "light/errors.hpp"
#include "light/light_activation.hpp"
#include "light/special_functions.hpp"

namespace light {

struct RateParams {
  LightParams light;
  double C = 0.0;  ///< integration constant
};

inline double rate_coefficient(const RateParams& p) { return p.light.growth_coefficient(); }

/// a = eps K r c, the prefactor of -l'.
inline double rate_prefactor(const RateParams& p) {
  return p.light.eps() * p.light.K * p.light.r * rate_coefficient(p);
}

/// f(u) = -ln(-l'(u) / a).
inline double rate_f(double u, const RateParams& p) {
  p.light.validate();
  const double c = rate_coefficient(p);
  if (c == 0.0) throw DomainError("rate_f: c = 0, the slope vanishes identically");
  const double w = p.light.r * (u - p.light.T);
  return w - detail::scaled_exp(c, -w);
}

/// Exact inverse g(t) = f^{-1}(ln(t + C)) on the increasing branch.
inline double rate_g(double t, const RateParams& p) {
  p.light.validate();
  if (!(t + p.C > 0.0)) throw DomainError("rate_g: t + C must be > 0, got t = " + std::to_string(t));
  const double c = rate_coefficient(p);
  const double L = std::log(t + p.C);
  const double arg = c * std::exp(-L);
  double w;
  try {
    w = lambert_w0(arg);
  } catch (const DomainError&) {
    throw DomainError("rate_g: Lambert argument " + std::to_string(arg) + " below -1/e at t = " + std::to_string(t));
  }
  return p.light.T + (L + w) / p.light.r;
}

/// The closed form as printed alongside the convergence theorem:
///   E/r^2 + T + (ln t + W0(c e^{-E/r - T r - ln t})) / r
inline double rate_g_printed(double t, const RateParams& p) {
  p.light.validate();
  if (!(t > 0.0)) throw DomainError("rate_g_printed: t must be > 0");
  const auto& l = p.light;
  const double c = rate_coefficient(p);
  const double arg = c * std::exp(-l.E / l.r - l.T * l.r - std::log(t));
  double w;
  try {
    w = lambert_w0(arg);
  } catch (const DomainError&) {
    throw DomainError("rate_g_printed: Lambert argument " + std::to_string(arg) + " below -1/e at t = " +
                      std::to_string(t));
  }
  return l.E / (l.r * l.r) + l.T + (std::log(t) + w) / l.r;
}

// ---------------------------------------------------------------------------
// max margin

struct MaxMarginResult {
  double d;                   ///< max over unit theta of min_i theta^T z_i
  Eigen::VectorXd direction;  ///< unit vector attaining it
  Eigen::VectorXd weights;    ///< convex weights of the minimum-norm point
};

/// Rows of X multiplied by their labels.
inline Eigen::MatrixXd fold_labels(const Dataset& data) {
  Eigen::MatrixXd Z = data.X;
  for (Eigen::Index i = 0; i < Z.rows(); ++i) Z.row(i) *= static_cast<double>(data.y[static_cast<std::size_t>(i)]);
  return Z;
}

struct MinNormOptions {
  double tolerance = 1e-12;
  int max_iterations = 10000;
};

/// Wolfe's minimum-norm-point algorithm on conv{rows of Z}. The max-margin
/// direction is that point normalised, and d is its norm.
/// Throws ValidationError when the hull contains the origin (not separable).
inline MaxMarginResult max_margin(const Eigen::MatrixXd& Z, const MinNormOptions& opt = {}) {
  const Eigen::Index m = Z.rows();
  if (m == 0) throw ValidationError("max_margin: no points");
  const double scale = Z.rowwise().squaredNorm().maxCoeff();
  if (!(scale > 0.0)) throw ValidationError("max_margin: data not separable (all points at the origin)");

  std::vector<Eigen::Index> S;
  std::vector<double> lam;
  Eigen::Index first;
  Z.rowwise().squaredNorm().minCoeff(&first);
  S.push_back(first);
  lam.push_back(1.0);
  Eigen::VectorXd x = Z.row(first).transpose();

  auto affine_min = [&](const std::vector<Eigen::Index>& set) {
    const auto k = static_cast<Eigen::Index>(set.size());
    Eigen::MatrixXd A(k + 1, k + 1);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) A(i, j) = Z.row(set[i]).dot(Z.row(set[j]));
      A(i, k) = 1.0;
      A(k, i) = 1.0;
    }
    A(k, k) = 0.0;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
    rhs(k) = 1.0;
    return Eigen::VectorXd(A.colPivHouseholderQr().solve(rhs).head(k));
  };

  for (int it = 0; it < opt.max_iterations; ++it) {
    Eigen::Index j;
    (Z * x).minCoeff(&j);
    const double gap = x.squaredNorm() - Z.row(j).dot(x);
    if (gap <= opt.tolerance * scale) break;
    if (std::find(S.begin(), S.end(), j) != S.end()) break;  // no progress possible in floating point
    S.push_back(j);
    lam.push_back(0.0);
    while (true) {
      const Eigen::VectorXd alpha = affine_min(S);
      bool interior = true;
      for (Eigen::Index i = 0; i < alpha.size(); ++i) interior &= alpha(i) > opt.tolerance;
      if (interior) {
        for (std::size_t i = 0; i < S.size(); ++i) lam[i] = alpha(static_cast<Eigen::Index>(i));
        break;
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < S.size(); ++i) {
        const double a = alpha(static_cast<Eigen::Index>(i));
        if (a <= opt.tolerance && lam[i] - a > 0.0) theta = std::min(theta, lam[i] / (lam[i] - a));
      }
      std::vector<Eigen::Index> S2;
      std::vector<double> lam2;
      for (std::size_t i = 0; i < S.size(); ++i) {
        const double v = theta * alpha(static_cast<Eigen::Index>(i)) + (1.0 - theta) * lam[i];
        if (v > opt.tolerance) {
          S2.push_back(S[i]);
          lam2.push_back(v);
        }
      }
      if (S2.empty()) {  // keep the best single point
        S2.push_back(j);
        lam2.push_back(1.0);
      }
      const double total = std::accumulate(lam2.begin(), lam2.end(), 0.0);
      for (auto& v : lam2) v /= total;
      S = std::move(S2);
      lam = std::move(lam2);
    }
    x.setZero();
    for (std::size_t i = 0; i < S.size(); ++i) x += lam[i] * Z.row(S[i]).transpose();
  }

  const double norm = x.norm();
  MaxMarginResult res;
  res.weights = Eigen::VectorXd::Zero(m);
  for (std::size_t i = 0; i < S.size(); ++i) res.weights(S[i]) = lam[i];
  if (norm <= 1e-9 * std::sqrt(scale)) throw ValidationError("max_margin: data not linearly separable through the origin");
  res.direction = x / norm;
  const double achieved = (Z * res.direction).minCoeff();
  if (achieved <= 0.0) throw ValidationError("max_margin: data not linearly separable through the origin");
  res.d = norm;
  return res;
}

inline MaxMarginResult max_margin(const Dataset& data, const MinNormOptions& opt = {}) {
  return max_margin(fold_labels(data), opt);
}

// ---------------------------------------------------------------------------
// margin experiment

struct MarginTrace {
  std::vector<double> margin;   ///< min_i theta_t^T z_i / |theta_t|, t = 1..N
  std::vector<double> norm;     ///< |theta_t|
  double d = 0.0;               ///< max margin of the data
};

struct FitReport {
  std::size_t tail_start = 0;   ///< first iteration (1-based) of the fit window
  std::size_t points_used = 0;  ///< window points where g(t) was defined and positive
  double C_g = 0.0;             ///< least-squares constant of d - margin ~ C_g / g(t)
  double residual_g = 0.0;      ///< RMS residual of that fit
  double C_ln = 0.0;            ///< same against 1/ln(t)
  double residual_ln = 0.0;
};

struct MarginExperiment {
  MarginTrace trace;
  FitReport fit;
  std::vector<double> g_of_t;   ///< NaN where g is undefined
};

struct MarginOptions {
  double eta = 0.01;
  int iterations = 10000;
  double divergence_norm = 1e150;
};

/// Full-batch gradient flow in the direction that increases every l(theta^T z_i):
///   theta <- theta + eta * sum_i l'(theta^T z_i) z_i,   theta_0 = 0.
/// The LIGHT slope is positive, so this is descent on -sum_i l(theta^T z_i).
inline MarginExperiment margin_experiment(const Dataset& data, const LightParams& p, GrowthModel model,
                                          const MarginOptions& opt = {}, double C = 0.0) {
  if (opt.iterations < 2) throw ValidationError("margin_experiment: need at least 2 iterations");
  const Eigen::MatrixXd Z = fold_labels(data);
  MarginExperiment out;
  out.trace.d = max_margin(Z).d;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(Z.cols());
  Eigen::VectorXd s(Z.rows());
  for (int it = 1; it <= opt.iterations; ++it) {
    const Eigen::VectorXd u = Z * theta;
    for (Eigen::Index i = 0; i < u.size(); ++i) s(i) = light_derivative(u(i), model, p);
    theta += opt.eta * (Z.transpose() * s);
    const double nrm = theta.norm();
    if (!std::isfinite(nrm) || nrm > opt.divergence_norm) {
      throw NumericError("margin_experiment: weight norm diverged at iteration " + std::to_string(it));
    }
    out.trace.norm.push_back(nrm);
    out.trace.margin.push_back(nrm > 0.0 ? (Z * theta).minCoeff() / nrm : 0.0);
  }

  const RateParams rp{p, C};
  out.g_of_t.resize(static_cast<std::size_t>(opt.iterations));
  for (int it = 1; it <= opt.iterations; ++it) {
    double g = std::numeric_limits<double>::quiet_NaN();
    try {
      g = rate_g(static_cast<double>(it), rp);
    } catch (const DomainError&) {
    }
    out.g_of_t[static_cast<std::size_t>(it - 1)] = g;
  }

  // single-constant least squares on the tail half
  auto& f = out.fit;
  f.tail_start = static_cast<std::size_t>(opt.iterations) / 2 + 1;
  double sgy = 0, sgg = 0, sly = 0, sll = 0;
  std::vector<std::size_t> used;
  for (std::size_t t = f.tail_start; t <= static_cast<std::size_t>(opt.iterations); ++t) {
    const double g = out.g_of_t[t - 1];
    if (!(g > 0.0)) continue;
    const double y = out.trace.d - out.trace.margin[t - 1];
    const double hg = 1.0 / g, hl = 1.0 / std::log(static_cast<double>(t));
    sgy += hg * y, sgg += hg * hg, sly += hl * y, sll += hl * hl;
    used.push_back(t);
  }
  f.points_used = used.size();
  if (!used.empty()) {
    f.C_g = sgy / sgg;
    f.C_ln = sly / sll;
    double rg = 0, rl = 0;
    for (auto t : used) {
      const double y = out.trace.d - out.trace.margin[t - 1];
      const double eg = y - f.C_g / out.g_of_t[t - 1];
      const double el = y - f.C_ln / std::log(static_cast<double>(t));
      rg += eg * eg, rl += el * el;
    }
    f.residual_g = std::sqrt(rg / static_cast<double>(used.size()));
    f.residual_ln = std::sqrt(rl / static_cast<double>(used.size()));
  }
  return out;
}

}  // namespace light
