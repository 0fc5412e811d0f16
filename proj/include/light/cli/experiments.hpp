#pragma once

// Experiment drivers behind light_cli. Each command reads its own INI
// section, writes CSVs (and optionally SVGs) under the output directory and
// fills a RunManifest. Work is split into cells that run on a worker pool;
// everything that ends up in a file is assembled in cell order.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "light/cli/config.hpp"
#include "light/cli/csv.hpp"
#include "light/cli/manifest.hpp"
#include "light/cli/pool.hpp"
#include "light/cli/svg.hpp"
#include "light/convergence.hpp"
#include "light/datasets.hpp"
#include "light/hyper_search.hpp"
#include "light/light_activation.hpp"
#include "light/neural_net.hpp"
#include "light/population.hpp"

namespace light::cli {

inline const char* kCurveHeader[] = {"epoch", "train_acc", "test_acc", "train_loss"};

struct RunOptions {
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  std::string scale = "paper";   ///< "paper" or "desk"
  unsigned jobs = 1;
  std::string format = "csv";    ///< "csv" or "csv+svg"

  bool svg() const { return format == "csv+svg"; }
};

/// Output sink shared by the cells of one command.
class Outputs {
 public:
  Outputs(const RunOptions& ro, RunManifest& m) : ro_(ro), m_(m) {}

  void write(const std::string& rel, const std::string& content) {
    const auto path = ro_.out / rel;
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path.string());
    std::lock_guard<std::mutex> lock(mu_);
    m_.outputs.push_back(rel);
  }
  void write(const std::string& rel, const CsvWriter& csv) { write(rel, csv.str()); }

  void time(const std::string& label, double seconds) {
    std::lock_guard<std::mutex> lock(mu_);
    m_.timings[label] = seconds;
  }

  void fail(const std::string& cell, const std::string& what) {
    std::lock_guard<std::mutex> lock(mu_);
    m_.failures.push_back({cell, what});
  }

  const RunOptions& options() const { return ro_; }

 private:
  const RunOptions& ro_;
  RunManifest& m_;
  std::mutex mu_;
};

// ---------------------------------------------------------------------------
// shared config readers

namespace detail {

inline std::uint64_t read_seed(Config& c, const std::string& sec, const RunOptions& ro) {
  if (ro.seed) c.force(sec, "seed", std::to_string(*ro.seed));
  return static_cast<std::uint64_t>(c.integer(sec, "seed", 0, 0));
}

inline GrowthModel read_model(const std::string& key_path, const std::string& s) {
  if (s == "V" || s == "verhulst") return GrowthModel::Verhulst;
  if (s == "G" || s == "gompertz") return GrowthModel::Gompertz;
  if (s == "Q" || s == "generalized") return GrowthModel::Generalized;
  throw ConfigError(key_path, "unknown growth model '" + s + "'");
}

inline std::string model_letter(GrowthModel m) {
  return m == GrowthModel::Verhulst ? "V" : m == GrowthModel::Gompertz ? "G" : "Q";
}

inline HiddenActivation read_hidden(Config& c, const std::string& sec) {
  const auto s = c.str(sec, "hidden", "linear");
  if (s == "linear") return HiddenActivation::Linear;
  if (s == "relu") return HiddenActivation::Relu;
  throw ConfigError(Config::path(sec, "hidden"), "expected linear or relu, got '" + s + "'");
}

inline QValue read_q(Config& c, const std::string& sec) {
  const double q = c.real(sec, "q", std::numeric_limits<double>::infinity());
  if (std::isinf(q)) return QValue::infinite();
  try {
    return QValue::finite(q);
  } catch (const ValidationError& e) {
    throw ConfigError(Config::path(sec, "q"), e.what());
  }
}

template <class F>
auto as_config_error(const std::string& key_path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ConfigError(key_path, e.what());
  }
}

/// Synthetic blobs or one of the tabular sets, from keys of `sec`.
inline Dataset read_dataset(Config& c, const std::string& sec, std::uint64_t seed, long long default_m) {
  const auto kind = c.str(sec, "dataset", "blobs");
  const auto data_seed = static_cast<std::uint64_t>(c.integer(sec, "data_seed", static_cast<long long>(seed), 0));
  const double tf = c.real(sec, "train_fraction", 0.8);
  if (!(tf > 0.0 && tf < 1.0)) throw ConfigError(Config::path(sec, "train_fraction"), "must lie in (0, 1)");
  if (kind == "blobs") {
    BlobParams bp;
    bp.m = static_cast<std::size_t>(c.integer(sec, "m", default_m, 2));
    bp.n = static_cast<std::size_t>(c.integer(sec, "n", 2, 2));
    bp.cluster_std = c.real(sec, "cluster_std", 0.25);
    bp.seed = data_seed;
    bp.train_fraction = tf;
    return as_config_error(Config::path(sec, "dataset"), [&] { return make_blobs(bp); });
  }
  if (auto schema = known_schema(kind)) {
    const auto path = c.required(sec, "path");
    try {
      return load_tabular(path, *schema, tf, data_seed);
    } catch (const std::runtime_error& e) {
      throw ConfigError(Config::path(sec, "path"), e.what());
    }
  }
  throw ConfigError(Config::path(sec, "dataset"), "unknown dataset '" + kind + "'");
}

/// Failure text for the manifest; numeric failures are tagged so the exit
/// code can tell them apart.
inline std::string describe(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const NumericError& ex) {
    return std::string("numeric: ") + ex.what();
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// training methods: "<optimizer>-default" for the sigmoid baselines and
// "<V|G|Q>-<r|E|Er|default>" for LIGHT outputs trained with light_optimizer

struct Method {
  std::string name;
  OptimizerSpec optimizer;
  GrowthModel model = GrowthModel::Verhulst;
  NeuronConfiguration output;
};

/// Rates that LIGHT methods start from, per growth law.
struct MethodRates {
  double rate[3] = {13.23, 12.04, 12.04};     ///< r for -r- and -Er-
  double harvest[3] = {0.5, 0.5, 0.5};        ///< E for -E-, and for -Er- when strategy is off
  bool strategy = true;                       ///< -Er- takes E from apply_strategy(r)
  QValue q = QValue::infinite();
};

inline MethodRates read_method_rates(Config& c, const std::string& sec) {
  MethodRates mr;
  for (int k = 0; k < 3; ++k) {
    const auto L = detail::model_letter(static_cast<GrowthModel>(k));
    mr.rate[k] = c.real(sec, "rate_" + L, mr.rate[k]);
    mr.harvest[k] = c.real(sec, "harvest_" + L, mr.harvest[k]);
  }
  mr.strategy = c.boolean(sec, "strategy", true);
  mr.q = detail::read_q(c, sec);
  return mr;
}

inline NeuronConfiguration light_output(GrowthModel model, ConfigTag tag, const MethodRates& mr) {
  const int k = static_cast<int>(model);
  LightOverrides o;
  if (model == GrowthModel::Generalized) o.q = mr.q;
  switch (tag) {
    case ConfigTag::Default: break;
    case ConfigTag::R: o.r = mr.rate[k]; break;
    case ConfigTag::Eonly: o.E = mr.harvest[k]; break;
    case ConfigTag::Er:
      o.r = mr.rate[k];
      o.E = mr.strategy ? apply_strategy(model == GrowthModel::Verhulst ? model : GrowthModel::Gompertz,
                                         mr.rate[k]).E
                        : mr.harvest[k];
      break;
  }
  return make_configuration(tag, o);
}

inline std::vector<Method> read_methods(Config& c, const std::string& sec, const MethodRates& mr,
                                        const std::vector<std::string>& def_opt,
                                        const std::vector<std::string>& def_cfg) {
  std::vector<Method> out;
  const auto opts = c.list(sec, "optimizers", def_opt);
  const auto cfgs = c.list(sec, "configurations", def_cfg);
  if (opts.empty()) throw ConfigError(Config::path(sec, "optimizers"), "optimizer list must not be empty");
  for (const auto& o : opts) {
    auto kind = parse_optimizer(o);
    if (!kind) throw ConfigError(Config::path(sec, "optimizers"), "unknown optimizer '" + o + "'");
    out.push_back({o + "-default", OptimizerSpec::defaults(*kind), GrowthModel::Verhulst, {}});
  }
  const auto light_opt_name = c.str(sec, "light_optimizer", "sgd");
  auto light_opt = parse_optimizer(light_opt_name);
  if (!light_opt) {
    throw ConfigError(Config::path(sec, "light_optimizer"), "unknown optimizer '" + light_opt_name + "'");
  }
  for (const auto& s : cfgs) {
    const auto dash = s.find('-');
    const auto key = Config::path(sec, "configurations");
    if (dash == std::string::npos) throw ConfigError(key, "expected <V|G|Q>-<configuration>, got '" + s + "'");
    const auto model = detail::read_model(key, s.substr(0, dash));
    auto tag = parse_config_tag(s.substr(dash + 1));
    if (!tag) throw ConfigError(key, "unknown configuration in '" + s + "'");
    Method m{s, OptimizerSpec::defaults(*light_opt), model, {}};
    m.output = detail::as_config_error(key, [&] { return light_output(model, *tag, mr); });
    out.push_back(m);
  }
  return out;
}

inline std::string curve_csv(const AccuracyCurve& curve) {
  CsvWriter w({kCurveHeader[0], kCurveHeader[1], kCurveHeader[2], kCurveHeader[3]});
  for (const auto& r : curve) w.cell(r.epoch).cell(r.train_acc).cell(r.test_acc).cell(r.train_loss).end_row();
  return w.str();
}

inline const std::vector<std::string>& summary_header() {
  static const std::vector<std::string> h{"cell", "L", "width", "method", "runs", "mean_final_test_acc",
                                          "sd_final_test_acc", "median_final_test_acc", "mean_epochs_to_95",
                                          "median_epochs_to_95"};
  return h;
}

/// One row of summary.csv, recomputable from that cell's curve files.
struct CellSummary {
  std::size_t runs = 0;
  double mean_final = 0, sd_final = 0, median_final = 0, mean_e95 = 0, median_e95 = 0;
};

inline CellSummary summarize(const std::vector<AccuracyCurve>& curves) {
  std::vector<double> fin, e95;
  for (const auto& c : curves) {
    fin.push_back(c.back().test_acc);
    e95.push_back(static_cast<double>(epochs_to_fraction_of_final(c, 0.95)));
  }
  CellSummary s;
  s.runs = curves.size();
  std::tie(s.mean_final, s.sd_final) = mean_sd(fin);
  s.median_final = detail::median(fin);
  s.mean_e95 = mean_sd(e95).first;
  s.median_e95 = detail::median(e95);
  return s;
}

/// Trains every (architecture, method, run) of one dataset and writes
/// curves/<prefix><cell>_run<k>.csv, a summary and optional plots.
struct TrainingPlan {
  std::string prefix;                 ///< file-name prefix, e.g. "pima/"
  const Dataset* data = nullptr;
  std::vector<std::pair<int, std::size_t>> architectures;  ///< (L, width)
  std::vector<Method> methods;
  HiddenActivation hidden = HiddenActivation::Linear;
  int epochs = 1500;
  int runs = 10;
  std::size_t batch_size = 75;
  std::uint64_t seed = 0;
};

inline std::string cell_name(int L, std::size_t width, const Method& m) {
  return "L" + std::to_string(L) + "_w" + std::to_string(width) + "_" + m.name;
}

inline void run_training_plan(const TrainingPlan& plan, Outputs& out) {
  const std::size_t n_cells = plan.architectures.size() * plan.methods.size();
  const std::size_t runs = static_cast<std::size_t>(plan.runs);
  std::vector<AccuracyCurve> curves(n_cells * runs);
  auto errors = run_indexed(n_cells * runs, out.options().jobs, [&](std::size_t job) {
    const std::size_t cell = job / runs, k = job % runs;
    const auto [L, width] = plan.architectures[cell / plan.methods.size()];
    const auto& m = plan.methods[cell % plan.methods.size()];
    Stopwatch sw;
    NetworkSpec spec;
    spec.input_dim = plan.data->n();
    spec.L = L;
    spec.width = L == 0 ? 1 : width;
    spec.hidden = plan.hidden;
    spec.model = m.model;
    spec.output = m.output;
    spec.init_seed = plan.seed + k;
    TrainConfig tc;
    tc.epochs = plan.epochs;
    tc.batch_size = plan.batch_size;
    tc.shuffle_seed = plan.seed + k;
    Network net(spec);
    curves[job] = train(net, *plan.data, m.optimizer, tc);
    const auto name = cell_name(L, width, m) + "_run" + std::to_string(k);
    out.write("curves/" + plan.prefix + name + ".csv", curve_csv(curves[job]));
    out.time(plan.prefix + name, sw.seconds());
  });

  CsvWriter summary(summary_header());
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    const auto [L, width] = plan.architectures[cell / plan.methods.size()];
    const auto& m = plan.methods[cell % plan.methods.size()];
    const auto name = cell_name(L, width, m);
    bool ok = true;
    for (std::size_t k = 0; k < runs; ++k) {
      if (auto& e = errors[cell * runs + k]) {
        ok = false;
        out.fail(plan.prefix + name + "_run" + std::to_string(k), detail::describe(e));
      }
    }
    if (!ok) continue;
    const auto s = summarize({curves.begin() + static_cast<std::ptrdiff_t>(cell * runs),
                              curves.begin() + static_cast<std::ptrdiff_t>((cell + 1) * runs)});
    summary.cell(name).cell(L).cell(width).cell(m.name).cell(s.runs).cell(s.mean_final).cell(s.sd_final);
    summary.cell(s.median_final).cell(s.mean_e95).cell(s.median_e95).end_row();
  }
  out.write(plan.prefix + "summary.csv", summary);

  if (!out.options().svg()) return;
  for (std::size_t a = 0; a < plan.architectures.size(); ++a) {
    const auto [L, width] = plan.architectures[a];
    std::vector<Series> series;
    for (std::size_t mi = 0; mi < plan.methods.size(); ++mi) {
      const std::size_t cell = a * plan.methods.size() + mi;
      Series s{plan.methods[mi].name, {}, {}};
      bool ok = true;
      for (std::size_t k = 0; k < runs; ++k) ok = ok && !errors[cell * runs + k];
      if (!ok) continue;
      for (int e = 0; e < plan.epochs; ++e) {
        double acc = 0.0;
        for (std::size_t k = 0; k < runs; ++k) acc += curves[cell * runs + k][static_cast<std::size_t>(e)].test_acc;
        s.x.push_back(e + 1);
        s.y.push_back(acc / static_cast<double>(runs));
      }
      series.push_back(std::move(s));
    }
    const auto arch = "L" + std::to_string(L) + "_w" + std::to_string(width);
    out.write("plots/" + plan.prefix + arch + ".svg",
              svg_line_chart("test accuracy, " + arch, "epoch", "mean test accuracy", series));
  }
}

inline std::vector<std::pair<int, std::size_t>> read_architectures(Config& c, const std::string& sec,
                                                                  long long def_L, long long def_w) {
  const auto Ls = c.integers(sec, "L", {def_L}, 0, 3);
  const auto ws = c.integers(sec, "width", {def_w}, 1, 1 << 20);
  std::vector<std::pair<int, std::size_t>> out;
  for (auto L : Ls) {
    if (L == 0) {
      out.emplace_back(0, 0);  // no hidden layer, width is meaningless
      continue;
    }
    for (auto w : ws) out.emplace_back(static_cast<int>(L), static_cast<std::size_t>(w));
  }
  return out;
}

inline void apply_desk_scale(Config& c, const std::string& sec, const RunOptions& ro, bool architecture) {
  if (ro.scale != "desk") return;
  c.force(sec, "epochs", "300");
  c.force(sec, "runs", "3");
  if (architecture) {
    c.force(sec, "L", "1");
    c.force(sec, "width", "100");
  }
}

// ---------------------------------------------------------------------------
// commands

inline void cmd_sweep_synthetic(Config& c, const RunOptions& ro, RunManifest& m) {
  const std::string sec = "sweep";
  apply_desk_scale(c, sec, ro, true);
  m.seed = detail::read_seed(c, sec, ro);
  TrainingPlan plan;
  plan.seed = m.seed;
  plan.architectures = read_architectures(c, sec, 1, 100);
  plan.hidden = detail::read_hidden(c, sec);
  plan.epochs = static_cast<int>(c.integer(sec, "epochs", 1500, 1));
  plan.runs = static_cast<int>(c.integer(sec, "runs", 10, 1));
  plan.batch_size = static_cast<std::size_t>(c.integer(sec, "batch_size", 75, 1));
  const auto rates = read_method_rates(c, sec);
  plan.methods = read_methods(c, sec, rates, {"sgd", "adam", "adagrad"}, {"V-Er", "G-Er"});
  const Dataset data = detail::read_dataset(c, sec, m.seed, 1000);
  c.reject_unknown();
  m.config = c.resolved();
  plan.data = &data;
  Outputs out(ro, m);
  run_training_plan(plan, out);
}

inline const std::vector<std::string>& rates_header() {
  static const std::vector<std::string> h{"model", "configuration", "mean_r", "sd_r", "mean_E",
                                          "sd_E",  "H",             "E_star", "H_star"};
  return h;
}

struct SearchCell {
  GrowthModel model;
  ConfigTag tag;
};

inline SearchConfig read_search_config(Config& c, const std::string& sec, std::uint64_t seed) {
  SearchConfig sc;
  sc.seed = seed;
  sc.h_epoch = static_cast<int>(c.integer(sec, "h_epoch", 1, 1));
  sc.runs = static_cast<int>(c.integer(sec, sec == "hyperopt" ? "runs" : "search_runs", 10, 1));
  sc.fraction = c.real(sec, "fraction", kDefaultPickFraction);
  if (!(sc.fraction > 0.0 && sc.fraction <= 1.0)) throw ConfigError(Config::path(sec, "fraction"), "must lie in (0, 1]");
  const auto mode = c.str(sec, "mode", "independent");
  if (mode == "independent") sc.mode = SearchMode::IndependentSearches;
  else if (mode == "shared") sc.mode = SearchMode::SharedCandidates;
  else throw ConfigError(Config::path(sec, "mode"), "expected independent or shared, got '" + mode + "'");
  sc.batch_size = static_cast<std::size_t>(c.integer(sec, "batch_size", 75, 1));
  const auto opt = c.str(sec, sec == "hyperopt" ? "optimizer" : "light_optimizer", "sgd");
  auto k = parse_optimizer(opt);
  if (!k) throw ConfigError(Config::path(sec, "optimizer"), "unknown optimizer '" + opt + "'");
  sc.optimizer = OptimizerSpec::defaults(*k);
  return sc;
}

/// Runs one search per cell on the pool; failed cells are reported and
/// left empty.
inline std::vector<std::optional<SearchResult>> run_searches(const Dataset& data, const NetworkSpec& base,
                                                             const std::vector<SearchCell>& cells,
                                                             const SearchConfig& sc, const std::string& prefix,
                                                             Outputs& out) {
  std::vector<std::optional<SearchResult>> res(cells.size());
  auto errors = run_indexed(cells.size(), out.options().jobs, [&](std::size_t i) {
    Stopwatch sw;
    res[i] = search(data, base, build_grid(cells[i].tag, cells[i].model), sc);
    out.time(prefix + "search_" + detail::model_letter(cells[i].model) + "-" + std::string(to_string(cells[i].tag)),
             sw.seconds());
  });
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!errors[i]) continue;
    out.fail(prefix + "search_" + detail::model_letter(cells[i].model) + "-" + std::string(to_string(cells[i].tag)),
             detail::describe(errors[i]));
  }
  return res;
}

inline void write_rate_tables(const std::vector<SearchCell>& cells, const std::vector<std::optional<SearchResult>>& res,
                              const std::string& stem, Outputs& out) {
  CsvWriter t(rates_header());
  CsvWriter p({"model", "configuration", "run", "candidate", "r", "E", "T", "N_T", "test_acc"});
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!res[i]) continue;
    const auto& r = *res[i];
    const auto model = std::string(to_string(cells[i].model));
    const auto tag = std::string(to_string(cells[i].tag));
    t.cell(model).cell(tag).cell(r.mean_r).cell(r.sd_r).cell(r.mean_E).cell(r.sd_E).cell(r.H).cell(r.E_star);
    t.cell(r.H_star).end_row();
    for (const auto& pk : r.picks) {
      p.cell(model).cell(tag).cell(pk.run).cell(pk.candidate).cell(pk.params.r).cell(pk.params.E);
      p.cell(pk.params.T).cell(pk.params.N_T).cell(pk.test_accuracy).end_row();
    }
  }
  out.write(stem + ".csv", t);
  out.write(stem + "_picks.csv", p);
}

inline std::vector<SearchCell> read_search_cells(Config& c, const std::string& sec) {
  std::vector<SearchCell> cells;
  const auto models = c.list(sec, "models", {"verhulst", "gompertz"});
  const auto tags = c.list(sec, "search_configurations", {"r", "E", "Er"});
  if (models.empty()) throw ConfigError(Config::path(sec, "models"), "model list must not be empty");
  if (tags.empty()) throw ConfigError(Config::path(sec, "search_configurations"), "list must not be empty");
  for (const auto& ms : models) {
    const auto model = detail::read_model(Config::path(sec, "models"), ms);
    if (model == GrowthModel::Generalized) {
      throw ConfigError(Config::path(sec, "models"), "the search grid is defined for verhulst and gompertz only");
    }
    for (const auto& ts : tags) {
      auto tag = parse_config_tag(ts);
      if (!tag || *tag == ConfigTag::Default) {
        throw ConfigError(Config::path(sec, "search_configurations"), "expected r, E or Er, got '" + ts + "'");
      }
      cells.push_back({model, *tag});
    }
  }
  return cells;
}

inline void cmd_hyperopt(Config& c, const RunOptions& ro, RunManifest& m) {
  const std::string sec = "hyperopt";
  if (ro.scale == "desk") c.force(sec, "runs", "3");
  m.seed = detail::read_seed(c, sec, ro);
  NetworkSpec base;
  base.L = static_cast<int>(c.integer(sec, "L", 1, 0, 3));
  base.width = static_cast<std::size_t>(c.integer(sec, "width", 100, 1));
  base.hidden = detail::read_hidden(c, sec);
  const auto sc = read_search_config(c, sec, m.seed);
  const auto cells = read_search_cells(c, sec);
  const Dataset data = detail::read_dataset(c, sec, m.seed, 1000);
  base.input_dim = data.n();
  c.reject_unknown();
  m.config = c.resolved();
  Outputs out(ro, m);
  const auto res = run_searches(data, base, cells, sc, "", out);
  write_rate_tables(cells, res, "hyperopt", out);
}

// image sets: (default train file, default test file, pixels, channels, format)
struct ImageDefaults {
  const char* name;
  const char* train;
  const char* test;
  long long pixels;
  long long channels;
  const char* format;
};

inline const ImageDefaults* image_defaults(const std::string& name) {
  static const ImageDefaults table[] = {
      {"mnist", "mnist_train.csv", "mnist_test.csv", 784, 1, "csv"},
      {"fmnist", "fashion-mnist_train.csv", "fashion-mnist_test.csv", 784, 1, "csv"},
      {"cifar10", "cifar-10-batches-bin/data_batch_1.bin", "cifar-10-batches-bin/test_batch.bin", 1024, 3,
       "records"},
  };
  for (const auto& d : table) {
    if (name == d.name) return &d;
  }
  return nullptr;
}

inline const char* tabular_default_file(const std::string& name) {
  if (name == "pima") return "pima-indians-diabetes.csv";
  if (name == "breast") return "breast-cancer-wisconsin.data";
  if (name == "heart") return "heart.dat";
  return nullptr;
}

inline Dataset load_uci_dataset(Config& c, const std::string& name, const std::string& data_dir, std::uint64_t seed,
                                double tf) {
  const std::string sec = "uci." + name;
  if (auto schema = known_schema(name)) {
    const auto path = c.str(sec, "path", (std::filesystem::path(data_dir) / tabular_default_file(name)).string());
    return load_tabular(path, *schema, tf, seed);
  }
  const auto* d = image_defaults(name);
  if (!d) throw ConfigError("uci.datasets", "unknown dataset '" + name + "'");
  const auto train_path = c.str(sec, "train_path", (std::filesystem::path(data_dir) / d->train).string());
  const auto test_path = c.str(sec, "test_path", (std::filesystem::path(data_dir) / d->test).string());
  const auto pixels = static_cast<std::size_t>(c.integer(sec, "pixels", d->pixels, 1));
  const auto channels = static_cast<std::size_t>(c.integer(sec, "channels", d->channels, 1, 3));
  const auto format = c.str(sec, "format", d->format);
  const auto m_train = static_cast<std::size_t>(c.integer(sec, "m_train", 1000, 1));
  const auto m_test = static_cast<std::size_t>(c.integer(sec, "m_test", 200, 1));
  BinarizationRule rule;
  rule.threshold = static_cast<int>(c.integer(sec, "positive_from_class", 5, 0));
  if (format != "csv" && format != "records") {
    throw ConfigError(Config::path(sec, "format"), "expected csv or records, got '" + format + "'");
  }
  auto load = [&](const std::string& p) {
    return format == "csv" ? load_image_csv(p, pixels, channels) : load_image_records(p, pixels, channels);
  };
  return binarize_and_subsample(load(train_path), load(test_path), rule, m_train, m_test, seed);
}

inline void cmd_uci(Config& c, const RunOptions& ro, RunManifest& m) {
  const std::string sec = "uci";
  apply_desk_scale(c, sec, ro, false);
  m.seed = detail::read_seed(c, sec, ro);
  const auto names = c.list(sec, "datasets", {"breast", "heart", "pima", "mnist", "fmnist", "cifar10"});
  if (names.empty()) throw ConfigError(Config::path(sec, "datasets"), "dataset list must not be empty");
  const auto data_dir = c.str(sec, "data_dir", "data");
  const double tf = c.real(sec, "train_fraction", 0.8);
  if (!(tf > 0.0 && tf < 1.0)) throw ConfigError(Config::path(sec, "train_fraction"), "must lie in (0, 1)");
  const auto rates_mode = c.str(sec, "rates", "search");
  if (rates_mode != "search" && rates_mode != "fixed") {
    throw ConfigError(Config::path(sec, "rates"), "expected search or fixed, got '" + rates_mode + "'");
  }
  TrainingPlan plan;
  plan.seed = m.seed;
  plan.architectures = read_architectures(c, sec, 1, 10);
  plan.hidden = detail::read_hidden(c, sec);
  plan.epochs = static_cast<int>(c.integer(sec, "epochs", 1500, 1));
  plan.runs = static_cast<int>(c.integer(sec, "runs", 10, 1));
  plan.batch_size = static_cast<std::size_t>(c.integer(sec, "batch_size", 75, 1));
  const auto base_rates = read_method_rates(c, sec);
  const auto methods_fixed = read_methods(c, sec, base_rates, {"sgd", "adam", "adagrad"}, {"V-Er", "G-Er"});
  std::optional<SearchConfig> sc;
  if (rates_mode == "search") sc = read_search_config(c, sec, m.seed);
  // every dataset section's keys are read up front so config errors surface before any training
  std::vector<std::optional<Dataset>> sets(names.size());
  std::vector<std::string> load_errors(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!known_schema(names[i]) && !image_defaults(names[i])) {
      throw ConfigError(Config::path(sec, "datasets"), "unknown dataset '" + names[i] + "'");
    }
    try {
      sets[i] = load_uci_dataset(c, names[i], data_dir, m.seed, tf);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      load_errors[i] = e.what();
    }
  }
  c.reject_unknown();
  m.config = c.resolved();
  Outputs out(ro, m);

  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto prefix = names[i] + "/";
    if (!sets[i]) {
      out.fail(names[i], load_errors[i]);
      continue;
    }
    plan.methods = methods_fixed;
    if (sc) {
      // search each LIGHT configuration, then train with the estimated rates
      std::vector<SearchCell> cells;
      std::vector<std::size_t> method_of;
      for (std::size_t k = 0; k < plan.methods.size(); ++k) {
        const auto& mt = plan.methods[k];
        if (mt.output.tag == ConfigTag::Default) continue;
        const auto law = mt.model == GrowthModel::Verhulst ? GrowthModel::Verhulst : GrowthModel::Gompertz;
        cells.push_back({law, mt.output.tag});
        method_of.push_back(k);
      }
      NetworkSpec base;
      base.input_dim = sets[i]->n();
      base.L = plan.architectures.front().first;
      base.width = std::max<std::size_t>(1, plan.architectures.front().second);
      base.hidden = plan.hidden;
      const auto res = run_searches(*sets[i], base, cells, *sc, prefix, out);
      write_rate_tables(cells, res, names[i] + "/rates", out);
      for (std::size_t j = 0; j < cells.size(); ++j) {
        if (!res[j]) continue;
        auto& mt = plan.methods[method_of[j]];
        MethodRates mr = base_rates;
        const int k = static_cast<int>(mt.model);
        mr.rate[k] = res[j]->mean_r > 0.0 ? res[j]->mean_r : mr.rate[k];
        mr.harvest[k] = res[j]->mean_E;
        try {
          mt.output = light_output(mt.model, mt.output.tag, mr);
        } catch (const ValidationError& e) {
          out.fail(prefix + mt.name, std::string("estimated rates unusable: ") + e.what());
        }
      }
    }
    plan.prefix = prefix;
    plan.data = &*sets[i];
    run_training_plan(plan, out);
  }
}

inline const std::vector<std::string>& convergence_header() {
  static const std::vector<std::string> h{"iteration", "margin", "d_minus_margin", "g_of_t", "ln_t"};
  return h;
}

inline nlohmann::ordered_json fit_json(const MarginExperiment& run, const LightParams& p, double C) {
  nlohmann::ordered_json j;
  j["d"] = run.trace.d;
  j["final_margin"] = run.trace.margin.back();
  j["C"] = C;
  j["r"] = p.r;
  j["E"] = p.E;
  j["T"] = p.T;
  j["N_T"] = p.N_T;
  j["tail_start"] = run.fit.tail_start;
  j["points_used"] = run.fit.points_used;
  j["C_g"] = run.fit.C_g;
  j["residual_g"] = run.fit.residual_g;
  j["C_ln"] = run.fit.C_ln;
  j["residual_ln"] = run.fit.residual_ln;
  return j;
}

inline void cmd_convergence(Config& c, const RunOptions& ro, RunManifest& m) {
  const std::string sec = "convergence";
  m.seed = detail::read_seed(c, sec, ro);
  const auto rates = read_method_rates(c, sec);
  // only the LIGHT part of the method grammar applies here
  std::vector<Method> methods;
  for (const auto& s : c.list(sec, "configurations", {"V-default", "V-Er", "G-Er"})) {
    const auto key = Config::path(sec, "configurations");
    const auto dash = s.find('-');
    if (dash == std::string::npos) throw ConfigError(key, "expected <V|G|Q>-<configuration>, got '" + s + "'");
    const auto model = detail::read_model(key, s.substr(0, dash));
    auto tag = parse_config_tag(s.substr(dash + 1));
    if (!tag) throw ConfigError(key, "unknown configuration in '" + s + "'");
    Method mt{s, {}, model, {}};
    mt.output = detail::as_config_error(key, [&] { return light_output(model, *tag, rates); });
    methods.push_back(mt);
  }
  if (methods.empty()) throw ConfigError(Config::path(sec, "configurations"), "list must not be empty");
  MarginOptions mo;
  mo.eta = c.real(sec, "eta", 0.01);
  mo.iterations = static_cast<int>(c.integer(sec, "iterations", 10000, 2));
  if (!(mo.eta > 0.0)) throw ConfigError(Config::path(sec, "eta"), "must be > 0");
  const double C = c.real(sec, "C", 0.0);
  const Dataset data = detail::read_dataset(c, sec, m.seed, 200);
  c.reject_unknown();
  m.config = c.resolved();
  Outputs out(ro, m);

  std::vector<std::optional<MarginExperiment>> runs(methods.size());
  auto errors = run_indexed(methods.size(), ro.jobs, [&](std::size_t i) {
    Stopwatch sw;
    runs[i] = margin_experiment(data, methods[i].output.params, methods[i].model, mo, C);
    out.time(methods[i].name, sw.seconds());
  });
  std::vector<Series> series;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const auto& name = methods[i].name;
    if (errors[i]) {
      out.fail(name, detail::describe(errors[i]));
      continue;
    }
    const auto& r = *runs[i];
    CsvWriter w(convergence_header());
    Series s{name, {}, {}};
    for (std::size_t t = 1; t <= r.trace.margin.size(); ++t) {
      const double gap = r.trace.d - r.trace.margin[t - 1];
      w.cell(t).cell(r.trace.margin[t - 1]).cell(gap).cell(r.g_of_t[t - 1]).cell(std::log(static_cast<double>(t)));
      w.end_row();
      s.x.push_back(std::log10(static_cast<double>(t)));
      s.y.push_back(gap);
    }
    out.write("convergence_" + name + ".csv", w);
    out.write("convergence_" + name + "_fit.json", fit_json(r, methods[i].output.params, C).dump(2) + "\n");
    series.push_back(std::move(s));
  }
  if (ro.svg()) out.write("plots/convergence.svg", svg_line_chart("margin gap", "log10 t", "d - margin", series));
}

/// Reads the shared (r, E, K, T, N_T) block; defaults are the harvested
/// curves of the population figure.
inline LightParams read_curve_params(Config& c, const std::string& sec) {
  LightParams p;
  p.r = c.real(sec, "r", 0.9);
  p.E = c.real(sec, "E", 0.1);
  p.K = c.real(sec, "K", 1.0);
  p.T = c.real(sec, "T", 4.0);
  p.N_T = c.real(sec, "N_T", 0.2);
  detail::as_config_error(sec, [&] {
    p.validate();
    return 0;
  });
  return p;
}

struct TimeGrid {
  double lo, hi;
  long long points;
  double at(long long i) const { return points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (points - 1); }
};

inline TimeGrid read_time_grid(Config& c, const std::string& sec, double lo, double hi) {
  TimeGrid g{c.real(sec, "t_min", lo), c.real(sec, "t_max", hi), c.integer(sec, "points", 201, 1, 10000000)};
  if (!(g.hi >= g.lo)) throw ConfigError(Config::path(sec, "t_max"), "must be >= t_min");
  return g;
}

inline void cmd_population(Config& c, const RunOptions& ro, RunManifest& m) {
  const std::string sec = "population";
  m.seed = detail::read_seed(c, sec, ro);
  std::vector<GrowthModel> models;
  for (const auto& s : c.list(sec, "models", {"verhulst", "gompertz"})) {
    const auto model = detail::read_model(Config::path(sec, "models"), s);
    if (model == GrowthModel::Generalized) {
      throw ConfigError(Config::path(sec, "models"), "population curves exist for verhulst and gompertz");
    }
    models.push_back(model);
  }
  if (models.empty()) throw ConfigError(Config::path(sec, "models"), "model list must not be empty");
  const auto lp = read_curve_params(c, sec);
  const auto grid = read_time_grid(c, sec, 0.0, 10.0);
  c.reject_unknown();
  m.config = c.resolved();
  Outputs out(ro, m);
  const auto p = lp.population();
  CsvWriter w({"t", "N", "model", "r", "E", "K", "T", "N_T"});
  std::vector<Series> series;
  for (auto model : models) {
    Series s{std::string(to_string(model)), {}, {}};
    for (long long i = 0; i < grid.points; ++i) {
      const double t = grid.at(i);
      const double N = model == GrowthModel::Verhulst ? verhulst_solution(t, p) : gompertz_solution(t, p);
      w.cell(t).cell(N).cell(to_string(model)).cell(p.r).cell(p.E).cell(p.K).cell(p.T).cell(p.N_T).end_row();
      s.x.push_back(t);
      s.y.push_back(N);
    }
    series.push_back(std::move(s));
  }
  out.write("population.csv", w);
  if (ro.svg()) out.write("plots/population.svg", svg_line_chart("harvested population", "t", "N(t)", series));
}

inline void cmd_eval_light(Config& c, const RunOptions& ro, RunManifest& m) {
  const std::string sec = "eval_light";
  m.seed = detail::read_seed(c, sec, ro);
  const auto names = c.list(sec, "curves", {"sigmoid", "V", "G"});
  if (names.empty()) throw ConfigError(Config::path(sec, "curves"), "curve list must not be empty");
  auto lp = read_curve_params(c, sec);
  lp.q = detail::read_q(c, sec);
  const auto grid = read_time_grid(c, sec, 0.0, 10.0);
  struct Curve {
    std::string name;
    GrowthModel model;
    LightParams p;
  };
  std::vector<Curve> curves;
  for (const auto& n : names) {
    if (n == "sigmoid") {
      curves.push_back({n, GrowthModel::Verhulst, config_to_params(ConfigTag::Default)});
    } else {
      const auto model = detail::read_model(Config::path(sec, "curves"), n);
      curves.push_back({to_string(model).data(), model, lp});
    }
  }
  c.reject_unknown();
  m.config = c.resolved();
  Outputs out(ro, m);
  std::vector<Series> values, slopes, phase;
  for (const auto& cv : curves) {
    CsvWriter w({"t", "l", "dl"});
    Series sv{cv.name, {}, {}}, sd{cv.name, {}, {}}, sp{cv.name, {}, {}};
    for (long long i = 0; i < grid.points; ++i) {
      const double t = grid.at(i);
      const double l = light_forward(t, cv.model, cv.p), dl = light_derivative(t, cv.model, cv.p);
      w.cell(t).cell(l).cell(dl).end_row();
      sv.x.push_back(t), sv.y.push_back(l);
      sd.x.push_back(t), sd.y.push_back(dl);
      sp.x.push_back(l), sp.y.push_back(dl);
    }
    out.write("eval_" + cv.name + ".csv", w);
    values.push_back(std::move(sv));
    slopes.push_back(std::move(sd));
    phase.push_back(std::move(sp));
  }
  if (ro.svg()) {
    out.write("plots/eval_l.svg", svg_line_chart("l over t", "t", "l", values));
    out.write("plots/eval_phase.svg", svg_line_chart("l' over l", "l", "l'", phase));
    out.write("plots/eval_dl.svg", svg_line_chart("l' over t", "t", "l'", slopes));
  }
}

// ---------------------------------------------------------------------------
// dispatch

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> n{"simulate-population", "eval-light", "sweep-synthetic",
                                          "hyperopt",            "uci",        "convergence"};
  return n;
}

enum ExitCode { kExitOk = 0, kExitConfig = 1, kExitPartial = 2, kExitNumeric = 3 };

/// Runs one experiment and appends its manifest entry. Config problems throw
/// ConfigError before anything is written. A NumericError escaping a command
/// or recorded by one gives kExitNumeric, other recorded failures
/// kExitPartial.
inline int run_experiment(const std::string& name, Config& c, const RunOptions& ro, RunManifest* manifest_out = nullptr) {
  RunManifest m;
  m.experiment = name;
  m.scale = ro.scale;
  m.format = ro.format;
  if (ro.scale != "paper" && ro.scale != "desk") throw ConfigError("--scale", "expected paper or desk");
  if (ro.format != "csv" && ro.format != "csv+svg") throw ConfigError("--format", "expected csv or csv+svg");
  Stopwatch sw;
  bool numeric = false;
  try {
    if (name == "simulate-population") cmd_population(c, ro, m);
    else if (name == "eval-light") cmd_eval_light(c, ro, m);
    else if (name == "sweep-synthetic") cmd_sweep_synthetic(c, ro, m);
    else if (name == "hyperopt") cmd_hyperopt(c, ro, m);
    else if (name == "uci") cmd_uci(c, ro, m);
    else if (name == "convergence") cmd_convergence(c, ro, m);
    else throw ConfigError("", "unknown experiment '" + name + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError("", e.what());
  } catch (const NumericError& e) {
    numeric = true;
    if (m.config.empty()) m.config = c.resolved();
    m.failures.push_back({name, std::string("numeric: ") + e.what()});
  }
  for (const auto& f : m.failures) numeric = numeric || f.error.rfind("numeric: ", 0) == 0;
  std::sort(m.outputs.begin(), m.outputs.end());
  m.total_seconds = sw.seconds();
  append_manifest(ro.out, m);
  if (manifest_out) *manifest_out = m;
  if (numeric) return kExitNumeric;
  return m.failures.empty() ? kExitOk : kExitPartial;
}

}  // namespace light::cli
