#include "light/convergence.hpp"
#include "light/hyper_search.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <random>

using namespace light;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

RateParams caption_rate() {
  RateParams p;
  p.light.r = 0.9;
  p.light.E = 0.1;
  p.light.K = 1.0;
  p.light.T = 4.0;
  p.light.N_T = 0.2;
  return p;
}

// f from its definition -ln(-l'(u)/a), using the library's slope
double f_from_slope(double u, const RateParams& p) {
  const double a = rate_prefactor(p);
  return -std::log(-light_derivative(u, GrowthModel::Generalized, p.light) / a);
}

// Bisection for f(u) = L on the increasing branch of f.
double invert_by_bisection(double L, const RateParams& p) {
  const double c = rate_coefficient(p);
  const auto& l = p.light;
  auto f = [&](double u) {
    const double w = l.r * (u - l.T);
    return w - c * std::exp(-w);
  };
  double lo = c < 0 ? l.T + std::log(-c) / l.r : l.T - 1.0;
  while (f(lo) > L) lo -= 1.0;
  double hi = std::max(lo, l.T) + 1.0;
  while (f(hi) < L) hi += (hi - lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < L ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// All minimal-norm points of affine hulls of subsets of size <= dim, kept when
// the weights are nonnegative and the point certifies itself as the global
// minimum over the hull of Z.
double brute_force_margin(const Eigen::MatrixXd& Z) {
  const auto m = Z.rows(), dim = Z.cols();
  double best = -1.0;
  std::vector<Eigen::Index> pick;
  std::function<void(Eigen::Index)> rec = [&](Eigen::Index start) {
    if (!pick.empty()) {
      const auto k = static_cast<Eigen::Index>(pick.size());
      Eigen::MatrixXd A(k + 1, k + 1);
      for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) A(i, j) = Z.row(pick[i]).dot(Z.row(pick[j]));
        A(i, k) = A(k, i) = 1.0;
      }
      A(k, k) = 0.0;
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
      rhs(k) = 1.0;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (lu.isInvertible()) {
        const Eigen::VectorXd sol = lu.solve(rhs);
        if (sol.head(k).minCoeff() >= -1e-12) {
          Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
          for (Eigen::Index i = 0; i < k; ++i) x += sol(i) * Z.row(pick[i]).transpose();
          const double nn = x.squaredNorm();
          if ((Z * x).minCoeff() >= nn - 1e-10 * std::max(1.0, nn) && nn > 0) best = std::sqrt(nn);
        }
      }
    }
    if (static_cast<Eigen::Index>(pick.size()) == dim) return;
    for (Eigen::Index i = start; i < m; ++i) {
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return best;
}

Eigen::MatrixXd separable_cloud(std::mt19937_64& rng, Eigen::Index m, Eigen::Index dim) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXd w(dim);
  for (Eigen::Index j = 0; j < dim; ++j) w(j) = nd(rng);
  w.normalize();
  Eigen::MatrixXd Z(m, dim);
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::VectorXd z(dim);
    do {
      for (Eigen::Index j = 0; j < dim; ++j) z(j) = nd(rng);
    } while (z.dot(w) < 0.2);
    Z.row(i) = z.transpose();
  }
  return Z;
}

}  // namespace

TEST_CASE("printed g(t) approaches its logarithmic asymptote", "[convergence]") {
  const auto p = caption_rate();
  const auto& l = p.light;
  const double t = 1e8;
  CHECK(std::abs(rate_g_printed(t, p) - (l.E / (l.r * l.r) + l.T + std::log(t) / l.r)) < 1e-6);
  CHECK(std::abs(rate_g(t, p) - (l.T + std::log(t) / l.r)) < 1e-6);
}

TEST_CASE("g(t) outside the Lambert domain", "[convergence]") {
  RateParams p;
  p.light.r = 1.0;
  p.light.E = 0.0;
  p.light.T = 0.0;
  p.light.N_T = 0.5;
  CHECK_THROWS_AS(rate_g(1.0, p), DomainError);
  CHECK_THROWS_AS(rate_g_printed(1.0, p), DomainError);
  CHECK_THROWS_AS(rate_g(-1.0, p), DomainError);
}

TEST_CASE("g inverts f", "[convergence]") {
  const auto p = caption_rate();
  CHECK_THAT(rate_g(10.0, p), WithinAbs(invert_by_bisection(std::log(10.0), p), 1e-8));
  for (double t : {10.0, 100.0, 1000.0}) CHECK_THAT(rate_f(rate_g(t, p), p), WithinAbs(std::log(t), 1e-8));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int tested = 0;
  for (int i = 0; i < 200 && tested < 60; ++i) {
    RateParams q;
    q.light.r = 0.2 + 5.0 * u(rng);
    q.light.E = 3.0 * u(rng);
    q.light.T = 5.0 * u(rng);
    q.light.N_T = 0.05 + 0.9 * u(rng);
    if (u(rng) < 0.3) q.light.q = QValue::finite(1.0 + 10.0 * u(rng));
    const double t = std::exp(1.0 + 8.0 * u(rng));
    double g;
    try {
      g = rate_g(t, q);
    } catch (const DomainError&) {
      continue;
    }
    CHECK_THAT(g, WithinAbs(invert_by_bisection(std::log(t), q), 1e-8));
    ++tested;
  }
  CHECK(tested >= 50);
}

TEST_CASE("f from the slope, monotone past T", "[convergence]") {
  const auto p = caption_rate();
  for (double u = p.light.T; u < p.light.T + 20; u += 0.5) CHECK(rate_f(u + 1.0, p) > rate_f(u, p));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ud(-2.0, 20.0);
  const double a = rate_prefactor(p);
  for (int i = 0; i < 100; ++i) {
    const double u = ud(rng);
    CHECK_THAT(f_from_slope(u, p), WithinAbs(rate_f(u, p), 1e-9));
    const double recovered = -light_derivative(u, GrowthModel::Generalized, p.light) * std::exp(rate_f(u, p));
    CHECK_THAT(recovered, WithinRel(a, 1e-10));
  }
  // for small t the Lambert argument falls below -1/e
  CHECK_THROWS_AS(rate_g(2.0, p), DomainError);
  double prev = -1e300;
  for (double t = 10.0; t < 1e6; t *= 1.7) {
    const double g = rate_g(t, p);
    CHECK(g > prev);
    prev = g;
  }
}

TEST_CASE("max margin small cases", "[convergence][margin]") {
  Eigen::MatrixXd two(2, 2);
  two << 1, 0, 0, 1;
  const auto r2 = max_margin(two);
  CHECK_THAT(r2.d, WithinAbs(1.0 / std::sqrt(2.0), 1e-12));
  CHECK_THAT(r2.direction(0), WithinAbs(1.0 / std::sqrt(2.0), 1e-12));
  CHECK_THAT(r2.direction(1), WithinAbs(1.0 / std::sqrt(2.0), 1e-12));

  Eigen::MatrixXd one(1, 2);
  one << 2, 0;
  const auto r1 = max_margin(one);
  CHECK_THAT(r1.d, WithinAbs(2.0, 1e-15));
  CHECK_THAT(r1.direction(0), WithinAbs(1.0, 1e-15));

  Eigen::MatrixXd bad(2, 2);
  bad << 1, 0, -1, 0;
  CHECK_THROWS_AS(max_margin(bad), ValidationError);
}

TEST_CASE("max margin matches support-set enumeration", "[convergence][margin][property]") {
  std::mt19937_64 rng(123);
  for (int k = 0; k < 40; ++k) {
    const Eigen::Index dim = k % 2 ? 3 : 2;
    const auto Z = separable_cloud(rng, 20, dim);
    const auto res = max_margin(Z);
    CHECK_THAT(res.d, WithinAbs(brute_force_margin(Z), 1e-8));
    CHECK_THAT((Z * res.direction).minCoeff(), WithinAbs(res.d, 1e-8));
    CHECK_THAT(res.direction.norm(), WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("margin experiment on a single point", "[convergence][margin]") {
  Dataset d;
  d.X.resize(1, 2);
  d.X << 2.0, 1.0;
  d.y = {1};
  d.split.train = {0};
  const auto run = margin_experiment(d, config_to_params(ConfigTag::Default), GrowthModel::Verhulst, {0.1, 200});
  CHECK_THAT(run.trace.d, WithinAbs(std::sqrt(5.0), 1e-12));
  for (double m : run.trace.margin) CHECK_THAT(m, WithinAbs(run.trace.d, 1e-12));
}

TEST_CASE("margin grows toward d on folded blobs", "[convergence][margin]") {
  BlobParams bp;
  bp.m = 200;
  bp.seed = 4;
  const auto d = make_blobs(bp);
  MarginOptions opt;
  opt.eta = 0.01;
  opt.iterations = 4000;
  const auto run = margin_experiment(d, config_to_params(ConfigTag::Default), GrowthModel::Verhulst, opt);
  const auto& m = run.trace.margin;
  CHECK(m.back() > m[m.size() / 4]);
  CHECK(m.back() <= run.trace.d + 1e-12);
  CHECK(m.back() > 0.0);
  // gap shrinks over the last quarter and the norm keeps growing
  CHECK(run.trace.d - m.back() < run.trace.d - m[3 * m.size() / 4]);
  CHECK(run.trace.norm.back() > run.trace.norm[run.trace.norm.size() / 2 - 1]);
  CHECK(run.fit.points_used > 0);
  CHECK(run.fit.tail_start == 2001);

  const auto er = apply_strategy(GrowthModel::Verhulst, 13.23);
  const auto fast = margin_experiment(d, er, GrowthModel::Verhulst, opt);
  UNSCOPED_INFO("residual -Er- vs 1/g: " << fast.fit.residual_g << ", default vs 1/ln t: " << run.fit.residual_ln);
  CHECK(std::isfinite(fast.fit.residual_g));
}
