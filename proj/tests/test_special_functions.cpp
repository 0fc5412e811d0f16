#include "light/special_functions.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

using namespace light;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("q_log point values", "[special][qlog]") {
  CHECK(q_log(QValue::finite(1.0), 1.0) == 0.0);
  CHECK_THAT(q_log(QValue::finite(2.0), 4.0), WithinAbs(2.0, 1e-15));
  CHECK_THAT(q_log(QValue::finite(1e6), 2.0), WithinAbs(std::numbers::ln2, 1e-6));
  // ln_1(x) = x - 1
  CHECK_THAT(q_log(QValue::finite(1.0), 0.5), WithinAbs(-0.5, 1e-15));
  CHECK(q_log(QValue::infinite(), 2.0) == std::log(2.0));
}

TEST_CASE("q_log domain", "[special][qlog]") {
  CHECK_THROWS_AS(q_log(QValue::finite(2.0), 0.0), DomainError);
  CHECK_THROWS_AS(q_log(QValue::infinite(), -1.0), DomainError);
  CHECK_THROWS_AS(QValue::finite(0.0), ValidationError);
  CHECK_THROWS_AS(QValue::finite(-3.0), ValidationError);
}

TEST_CASE("q_log vanishes at 1 and increases in x", "[special][qlog][property]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> qdist(0.05, 50.0);
  std::uniform_real_distribution<double> xdist(1e-3, 20.0);
  for (int i = 0; i < 200; ++i) {
    const auto q = QValue::finite(qdist(rng));
    CHECK(q_log(q, 1.0) == 0.0);
    std::vector<double> xs(50);
    for (auto& x : xs) x = xdist(rng);
    std::sort(xs.begin(), xs.end());
    for (std::size_t j = 1; j < xs.size(); ++j) {
      if (xs[j] > xs[j - 1]) CHECK(q_log(q, xs[j]) > q_log(q, xs[j - 1]));
    }
  }
}

TEST_CASE("q_log approaches ln monotonically as q grows", "[special][qlog][property]") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> xdist(1e-3, 10.0);
  for (int i = 0; i < 500; ++i) {
    const double x = xdist(rng);
    if (std::abs(x - 1.0) < 1e-3) continue;
    double prev = std::numeric_limits<double>::infinity();
    for (double q : {10.0, 1e2, 1e4, 1e6}) {
      const double gap = std::abs(q_log(QValue::finite(q), x) - std::log(x));
      CHECK(gap < prev);
      prev = gap;
    }
  }
}

TEST_CASE("lambert_w0 point values", "[special][lambert]") {
  CHECK(lambert_w0(0.0) == 0.0);
  CHECK_THAT(lambert_w0(std::numbers::e), WithinAbs(1.0, 1e-15));
  CHECK_THAT(lambert_w0(-1.0 / std::numbers::e), WithinAbs(-1.0, 1e-8));
  CHECK_THAT(lambert_w0(0.5 * std::exp(0.5)), WithinAbs(0.5, 1e-15));
  CHECK_THAT(lambert_w0(1.0), WithinAbs(0.56714329040978387, 1e-15));  // omega constant
}

TEST_CASE("lambert_w0 domain", "[special][lambert]") {
  CHECK_THROWS_AS(lambert_w0(-0.5), DomainError);
  CHECK_THROWS_AS(lambert_w0(std::log(0.5)), DomainError);
  CHECK_THROWS_AS(lambert_w0(std::nan("")), DomainError);
}

TEST_CASE("lambert_w0 residual and roundtrip", "[special][lambert][property]") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> wdist(-1.0, 10.0);
  for (int i = 0; i < 10000; ++i) {
    const double w = wdist(rng);
    const double x = w * std::exp(w);
    const double got = lambert_w0(x);
    REQUIRE_THAT(got, WithinAbs(w, 1e-10));
    REQUIRE(std::abs(got * std::exp(got) - x) <= 1e-12 * std::max(1.0, std::abs(x)));
    REQUIRE(got >= -1.0);
  }
}

TEST_CASE("lambert_w0 near the branch point and for large arguments", "[special][lambert]") {
  // x = -1/e + d^2/(2e) + ... ; W is about -1 + d there
  for (double d : {1e-7, 1e-5, 1e-3, 0.02, 0.04, 0.1}) {
    const double w = -1.0 + d;
    const double x = w * std::exp(w);
    const double got = lambert_w0(x);
    CHECK(std::abs(got * std::exp(got) - x) <= 1e-12);
    CHECK(got >= -1.0);
  }
  for (double x : {1e3, 1e10, 1e100, 1e300}) {
    const double got = lambert_w0(x);
    CHECK_THAT(got + std::log(got), WithinRel(std::log(x), 1e-14));
  }
}
