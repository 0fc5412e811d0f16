#include "light/hyper_search.hpp"

#include <catch_amalgamated.hpp>

#include <boost/math/special_functions/gamma.hpp>

#include <set>

using namespace light;
using Catch::Matchers::WithinAbs;

TEST_CASE("grid cardinalities and axes", "[search]") {
  CHECK(build_grid(ConfigTag::R, GrowthModel::Verhulst).size() == 45);
  CHECK(build_grid(ConfigTag::Eonly, GrowthModel::Verhulst).size() == 45);
  CHECK(build_grid(ConfigTag::Er, GrowthModel::Gompertz).size() == 225);
  CHECK(build_grid(ConfigTag::Default, GrowthModel::Verhulst).size() == 1);

  const auto r = build_grid(ConfigTag::R, GrowthModel::Verhulst);
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(r.point(i).E == 0.0);

  const auto er = build_grid(ConfigTag::Er, GrowthModel::Verhulst);
  CHECK(er.N_T == std::vector<double>{0.2, 0.5, 0.8});
  REQUIRE(er.T.size() == 3);
  CHECK(er.T[0] == 0.1);
  CHECK_THAT(er.T[1], WithinAbs(10.05, 1e-12));
  CHECK(er.T[2] == 20.0);
  CHECK(er.r.front() == 0.1);
  CHECK(er.r.back() == 20.0);
  CHECK(er.E.back() == 20.0 - 1e-6);
  CHECK(er.E.back() < 20.0);
  std::set<std::tuple<double, double, double, double>> seen;
  for (std::size_t i = 0; i < er.size(); ++i) {
    const auto p = er.point(i);
    CHECK(p.r >= 0.1);
    CHECK(p.r <= 20.0);
    CHECK(p.E >= 0.1);
    CHECK(p.E < 20.0);
    CHECK(p.K == 1.0);
    seen.insert({p.r, p.E, p.T, p.N_T});
  }
  CHECK(seen.size() == 225);
  CHECK_THROWS_AS(er.point(225), ValidationError);

  const auto e = build_grid(ConfigTag::Eonly, GrowthModel::Gompertz);
  for (std::size_t i = 0; i < e.size(); ++i) CHECK(e.point(i).r == 1.0);
}

TEST_CASE("random pick sizes", "[search]") {
  CHECK(random_pick(225, 0.025, 1).size() == 6);
  CHECK(random_pick(45, 0.025, 1).size() == 2);
  CHECK(random_pick(1, 0.025, 1).size() == 1);
  const auto all = random_pick(225, 1.0, 4);
  CHECK(std::set<std::size_t>(all.begin(), all.end()).size() == 225);
  const auto a = random_pick(225, 0.025, 42), b = random_pick(225, 0.025, 42);
  CHECK(a == b);
  CHECK(std::set<std::size_t>(a.begin(), a.end()).size() == a.size());
  CHECK_THROWS_AS(random_pick(10, 0.0, 1), ValidationError);
}

TEST_CASE("random pick covers the grid uniformly", "[search][property]") {
  std::vector<double> counts(225, 0.0);
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) {
    for (auto i : random_pick(225, 0.025, static_cast<std::uint64_t>(s))) counts[i] += 1.0;
  }
  const double expected = draws * 6.0 / 225.0;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  const double p = boost::math::gamma_q(224.0 / 2.0, chi2 / 2.0);
  INFO("chi2 = " << chi2 << ", p = " << p);
  CHECK(p > 0.01);
}

TEST_CASE("strategy rates", "[search]") {
  const auto v = apply_strategy(GrowthModel::Verhulst, 7.26);
  CHECK_THAT(v.E, WithinAbs(3.63, 1e-12));
  CHECK(v.K == 1.0);
  CHECK(v.T == kDefaultHarvestStart);
  CHECK(v.N_T == kDefaultInitialPopulation);
  const auto g = apply_strategy(GrowthModel::Gompertz, 12.04);
  CHECK(g.E == 12.04);
  CHECK_THAT(predefined_rates(GrowthModel::Gompertz, 12.04).H_star, WithinAbs(4.43, 0.01));
  CHECK(apply_strategy(GrowthModel::Verhulst, 2.0).E == 1.0);
}

TEST_CASE("harvest at mean rates", "[search]") {
  SearchResult v;
  v.mean_r = 13.23;
  v.mean_E = 7.6;
  fill_rate_summary(v, GrowthModel::Verhulst);
  CHECK_THAT(v.H, WithinAbs(3.23, 0.01));
  CHECK_THAT(v.E_star, WithinAbs(6.6, 0.02));
  CHECK_THAT(v.H_star, WithinAbs(3.3, 0.01));

  SearchResult g;
  g.mean_r = 12.04;
  g.mean_E = 6.0;
  fill_rate_summary(g, GrowthModel::Gompertz);
  CHECK_THAT(g.H, WithinAbs(3.65, 0.01));
  CHECK_THAT(g.H_star, WithinAbs(4.43, 0.01));

  SearchResult dead;
  dead.mean_r = 2.0;
  dead.mean_E = 5.0;
  fill_rate_summary(dead, GrowthModel::Verhulst);
  CHECK(dead.H == 0.0);
}

TEST_CASE("mean and population sd", "[search]") {
  const auto [m, s] = mean_sd({1.0, 3.0});
  CHECK(m == 2.0);
  CHECK(s == 1.0);
  CHECK(mean_sd({4.0}).second == 0.0);
}

TEST_CASE("tie breaking prefers lower E, then lower r", "[search]") {
  LightParams a, b;
  a.r = 2.0, a.E = 0.5;
  b.r = 1.0, b.E = 0.7;
  CHECK(prefer_candidate(0.9, a, 0.9, b));
  CHECK(!prefer_candidate(0.9, b, 0.9, a));
  CHECK(prefer_candidate(0.91, b, 0.9, a));
  b.E = 0.5;
  CHECK(prefer_candidate(0.9, b, 0.9, a));
}

TEST_CASE("search on small blobs", "[search]") {
  BlobParams bp;
  bp.m = 200;
  const auto data = make_blobs(bp);
  NetworkSpec base;
  base.input_dim = 2;
  base.L = 1;
  base.width = 8;

  SearchConfig cfg;
  cfg.runs = 3;
  cfg.seed = 5;
  const auto grid = build_grid(ConfigTag::Er, GrowthModel::Verhulst);
  const auto res = search(data, base, grid, cfg);
  REQUIRE(res.picks.size() == 3);
  for (const auto& p : res.picks) {
    CHECK(p.test_accuracy >= 0.0);
    CHECK(p.test_accuracy <= 1.0);
  }
  const auto again = search(data, base, grid, cfg);
  CHECK(again.mean_r == res.mean_r);
  CHECK(again.mean_E == res.mean_E);

  SearchConfig shared = cfg;
  shared.mode = SearchMode::SharedCandidates;
  const auto sh = search(data, base, grid, shared);
  CHECK(sh.picks.size() == 3);

  // a single candidate leaves no spread
  const auto one = search(data, base, build_grid(ConfigTag::Default, GrowthModel::Verhulst), cfg);
  CHECK(one.sd_r == 0.0);
  CHECK(one.sd_E == 0.0);
  CHECK(one.mean_r == 1.0);
}
