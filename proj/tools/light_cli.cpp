// light_cli: runs the experiment sweeps and writes CSV results plus a
// manifest into an output directory.
//
//   light_cli <experiment> [--config f.ini] [--out dir] [--seed n]
//             [--scale paper|desk] [--jobs n] [--format csv|csv+svg]
//   light_cli replay --manifest dir/manifest.json [--index k] [--out dir]
//
// Exit codes: 0 success, 1 config error, 2 partial failure, 3 numeric failure.
// LIGHT_OUT_DIR sets the default output directory.

#include <cstdlib>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "light/cli/experiments.hpp"

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("LIGHT_OUT_DIR");
  return env && *env ? env : "light_out";
}

struct Flags {
  std::string config;
  std::string out = default_out_dir();
  std::optional<std::uint64_t> seed;
  std::string scale = "paper";
  unsigned jobs = 1;
  std::string format = "csv";
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "INI configuration file")->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "output directory (default $LIGHT_OUT_DIR or ./light_out)");
  sub->add_option("--seed", f.seed, "base seed, overrides the config");
  sub->add_option("--scale", f.scale, "paper or desk (epochs 300, runs 3, L=1 d=100)")
      ->check(CLI::IsMember({"paper", "desk"}));
  sub->add_option("--jobs", f.jobs, "worker threads")->check(CLI::Range(1u, 1024u));
  sub->add_option("--format", f.format, "csv or csv+svg")->check(CLI::IsMember({"csv", "csv+svg"}));
}

}  // namespace

int main(int argc, char** argv) {
  using namespace light::cli;
  CLI::App app{"LIGHT activation experiments"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  const std::map<std::string, std::string> help{
      {"simulate-population", "harvested Verhulst and Gompertz curves"},
      {"eval-light", "LIGHT values and slopes over t"},
      {"sweep-synthetic", "training curves on synthetic blobs"},
      {"hyperopt", "random search over (r, E, T, N_T)"},
      {"uci", "training curves on the benchmark sets"},
      {"convergence", "margin of gradient descent against the rate g(t)"}};
  for (const auto& name : experiment_names()) {
    auto* sub = app.add_subcommand(name, help.at(name));
    add_common(sub, flags);
    subs.emplace_back(name, sub);
  }
  std::string manifest_file;
  int index = -1;
  auto* replay = app.add_subcommand("replay", "rerun an entry of a manifest");
  replay->add_option("--manifest", manifest_file, "manifest.json")->required()->check(CLI::ExistingFile);
  replay->add_option("--index", index, "entry to rerun, negative counts from the end");
  replay->add_option("--out", flags.out, "output directory");
  replay->add_option("--jobs", flags.jobs, "worker threads")->check(CLI::Range(1u, 1024u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    RunOptions ro;
    ro.out = flags.out;
    ro.jobs = flags.jobs;
    if (replay->parsed()) {
      const auto doc = read_manifest_file(manifest_file);
      const auto& runs = doc.at("runs");
      const long long n = static_cast<long long>(runs.size());
      const long long k = index < 0 ? n + index : index;
      if (k < 0 || k >= n) throw light::ConfigError("--index", "manifest has " + std::to_string(n) + " entries");
      const auto entry = RunManifest::from_json(runs.at(static_cast<std::size_t>(k)));
      // the stored configuration already carries scale substitutions and the seed
      ro.format = entry.format;
      Config cfg(entry.config);
      return run_experiment(entry.experiment, cfg, ro);
    }
    ro.seed = flags.seed;
    ro.scale = flags.scale;
    ro.format = flags.format;
    Config cfg = flags.config.empty() ? Config() : Config(load_ini(flags.config));
    for (const auto& [name, sub] : subs) {
      if (sub->parsed()) {
        const int rc = run_experiment(name, cfg, ro);
        if (rc != kExitOk) std::cerr << "light_cli: " << name << " finished with failures, see manifest.json\n";
        return rc;
      }
    }
  } catch (const light::ConfigError& e) {
    std::cerr << "light_cli: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const light::NumericError& e) {
    std::cerr << "light_cli: numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "light_cli: " << e.what() << "\n";
    return kExitPartial;
  }
  return kExitConfig;
}
