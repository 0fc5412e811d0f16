#pragma once

// Random search over the LIGHT rate grid, and the shortcut that fixes r and
// takes the yield-maximising E.
//
// Axes (K = 1 throughout):
//   r    5 points on [0.1, 20]
//   E    5 points on [0.1, 20), spaced as on [0.1, 20] with the last moved to 20 - 1e-6
//   T    3 points on [0.1, 20]
//   N_T  3 points on [0.2, 0.8]
// A configuration freezes some axes: -r- has E = 0, -E- has r = 1, -default-
// freezes all four.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "light/datasets.hpp"
#include "light/errors.hpp"
#include "light/light_activation.hpp"
#include "light/neural_net.hpp"
#include "light/population.hpp"

namespace light {

inline constexpr double kGridEdgeOffset = 1e-6;
inline constexpr double kDefaultPickFraction = 0.025;

/// n evenly spaced points from lo to hi inclusive.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

struct HyperGrid {
  ConfigTag tag = ConfigTag::Er;
  GrowthModel model = GrowthModel::Verhulst;
  std::vector<double> r, E, T, N_T;

  std::size_t size() const { return r.size() * E.size() * T.size() * N_T.size(); }

  /// Point i in row-major order over (r, E, T, N_T).
  LightParams point(std::size_t i) const {
    if (i >= size()) throw ValidationError("grid point index out of range");
    LightParams p;
    p.K = 1.0;
    p.N_T = N_T[i % N_T.size()];
    i /= N_T.size();
    p.T = T[i % T.size()];
    i /= T.size();
    p.E = E[i % E.size()];
    i /= E.size();
    p.r = r[i];
    return p;
  }
};

inline HyperGrid build_grid(ConfigTag tag, GrowthModel model) {
  HyperGrid g;
  g.tag = tag;
  g.model = model;
  if (tag == ConfigTag::Default) {
    const auto d = config_to_params(ConfigTag::Default);
    g.r = {d.r};
    g.E = {d.E};
    g.T = {d.T};
    g.N_T = {d.N_T};
    return g;
  }
  g.r = tag == ConfigTag::Eonly ? std::vector<double>{1.0} : linspace(0.1, 20.0, 5);
  if (tag == ConfigTag::R) {
    g.E = {0.0};
  } else {
    g.E = linspace(0.1, 20.0, 5);
    g.E.back() = 20.0 - kGridEdgeOffset;
  }
  g.T = linspace(0.1, 20.0, 3);
  g.N_T = linspace(0.2, 0.8, 3);
  return g;
}

/// ceil(fraction * grid_size) distinct indices (at least one), drawn
/// uniformly without replacement.
inline std::vector<std::size_t> random_pick(std::size_t grid_size, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("random_pick: fraction must lie in (0, 1]");
  if (grid_size == 0) throw ValidationError("random_pick: empty grid");
  // the small offset keeps exact products such as 1.0 * 225 from rounding up
  auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(grid_size) - 1e-9));
  k = std::clamp<std::size_t>(k, 1, grid_size);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> idx(grid_size);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, grid_size - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

inline std::vector<LightParams> random_pick(const HyperGrid& g, double fraction, std::uint64_t seed) {
  std::vector<LightParams> out;
  for (auto i : random_pick(g.size(), fraction, seed)) out.push_back(g.point(i));
  return out;
}

/// -Er- parameters from r alone: E is the yield-maximising rate, T and N_T
/// are the configuration defaults.
inline LightParams apply_strategy(GrowthModel model, double r) {
  const auto rates = predefined_rates(model, r, 1.0);
  LightOverrides o;
  o.r = r;
  o.E = rates.E_star;
  return config_to_params(ConfigTag::Er, o);
}

/// How the repeated runs relate.
///   IndependentSearches  each run draws its own candidates and seeds
///   SharedCandidates     one draw of candidates, each run retrains them with new seeds
enum class SearchMode { IndependentSearches, SharedCandidates };

struct SearchConfig {
  int h_epoch = 1;
  int runs = 10;
  double fraction = kDefaultPickFraction;
  std::uint64_t seed = 0;
  SearchMode mode = SearchMode::IndependentSearches;
  OptimizerSpec optimizer = OptimizerSpec::defaults(OptimizerKind::Sgd);
  std::size_t batch_size = 75;
};

struct RunPick {
  int run;
  std::size_t candidate;     ///< position in that run's candidate list
  LightParams params;
  double test_accuracy;
};

struct SearchResult {
  std::vector<RunPick> picks;
  double mean_r = 0, sd_r = 0, mean_E = 0, sd_E = 0;
  double H = 0;        ///< E N* at the mean rates, N* clamped at 0
  double E_star = 0;   ///< yield-maximising E for mean r
  double H_star = 0;
};

/// Population (divide-by-n) mean and standard deviation.
inline std::pair<double, double> mean_sd(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size()))};
}

/// (mean r, mean E) -> H, E*, H* as in the reference rate tables.
inline void fill_rate_summary(SearchResult& res, GrowthModel model) {
  const GrowthModel law = model == GrowthModel::Verhulst ? GrowthModel::Verhulst : GrowthModel::Gompertz;
  res.H = realized_harvest(law, res.mean_r, res.mean_E, 1.0);
  const auto pre = predefined_rates(law, res.mean_r, 1.0);
  res.E_star = pre.E_star;
  res.H_star = pre.H_star;
}

/// Higher accuracy wins; ties go to the lower E, then the lower r.
inline bool prefer_candidate(double acc, const LightParams& p, double best_acc, const LightParams& best) {
  if (acc != best_acc) return acc > best_acc;
  if (p.E != best.E) return p.E < best.E;
  return p.r < best.r;
}

/// Candidate scores are the test-split accuracy after h_epoch epochs. The
/// architecture comes from `base`; its output configuration is replaced by
/// each candidate. Candidate draw, init and shuffle seeds of run k all derive
/// from cfg.seed and k.
inline SearchResult search(const Dataset& data, const NetworkSpec& base, const HyperGrid& grid,
                           const SearchConfig& cfg,
                           const std::function<void(int, std::size_t, double)>& progress = {}) {
  if (cfg.runs < 1) throw ValidationError("search: runs must be >= 1");
  if (cfg.h_epoch < 1) throw ValidationError("search: h_epoch must be >= 1");
  SearchResult res;
  std::vector<double> rs, es;
  std::vector<LightParams> shared;
  if (cfg.mode == SearchMode::SharedCandidates) shared = random_pick(grid, cfg.fraction, cfg.seed);
  for (int run = 0; run < cfg.runs; ++run) {
    const std::uint64_t run_seed = cfg.seed + 1000003ULL * static_cast<std::uint64_t>(run);
    const auto candidates =
        cfg.mode == SearchMode::SharedCandidates ? shared : random_pick(grid, cfg.fraction, run_seed);
    std::size_t best = 0;
    double best_acc = -1.0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      NetworkSpec spec = base;
      spec.model = grid.model;
      spec.output = {grid.tag, candidates[c]};
      spec.init_seed = run_seed + c;
      TrainConfig tc;
      tc.epochs = cfg.h_epoch;
      tc.batch_size = cfg.batch_size;
      tc.shuffle_seed = run_seed + c;
      double acc;
      try {
        Network net(spec);
        acc = train(net, data, cfg.optimizer, tc).back().test_acc;
      } catch (const std::exception& e) {
        const auto& p = candidates[c];
        throw TrainingError("search run " + std::to_string(run) + ", candidate (r=" + std::to_string(p.r) +
                            ", E=" + std::to_string(p.E) + ", T=" + std::to_string(p.T) +
                            ", N_T=" + std::to_string(p.N_T) + "): " + e.what());
      }
      if (progress) progress(run, c, acc);
      if (prefer_candidate(acc, candidates[c], best_acc, candidates[best])) {
        best = c;
        best_acc = acc;
      }
    }
    res.picks.push_back({run, best, candidates[best], best_acc});
    rs.push_back(candidates[best].r);
    es.push_back(candidates[best].E);
  }
  std::tie(res.mean_r, res.sd_r) = mean_sd(rs);
  std::tie(res.mean_E, res.sd_E) = mean_sd(es);
  fill_rate_summary(res, grid.model);
  return res;
}

}  // namespace light
