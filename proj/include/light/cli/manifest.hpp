#pragma once

// manifest.json in an output directory holds one entry per CLI invocation.
// New entries are appended; existing ones are never rewritten.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "light/cli/config.hpp"
#include "light/version.hpp"

namespace light::cli {

struct Failure {
  std::string cell;
  std::string error;
};

struct RunManifest {
  std::string experiment;
  Sections config;               ///< resolved, defaults inlined
  std::uint64_t seed = 0;
  std::string scale = "paper";
  std::string format = "csv";
  std::vector<std::string> outputs;   ///< relative to the output directory
  std::map<std::string, double> timings;  ///< seconds per cell
  std::vector<Failure> failures;
  double total_seconds = 0.0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["experiment"] = experiment;
    j["toolkit_version"] = kVersion;
    j["csv_schema"] = kCsvSchemaVersion;
    j["seed"] = seed;
    j["scale"] = scale;
    j["format"] = format;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [sec, keys] : config) {
      for (const auto& [k, v] : keys) cfg[sec][k] = v;
    }
    j["config"] = cfg;
    j["outputs"] = outputs;
    nlohmann::ordered_json t = nlohmann::ordered_json::object();
    for (const auto& [k, v] : timings) t[k] = v;
    j["timings_seconds"] = t;
    j["total_seconds"] = total_seconds;
    auto f = nlohmann::ordered_json::array();
    for (const auto& x : failures) f.push_back({{"cell", x.cell}, {"error", x.error}});
    j["failures"] = f;
    return j;
  }

  static RunManifest from_json(const nlohmann::json& j) {
    RunManifest m;
    m.experiment = j.at("experiment").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.scale = j.value("scale", "paper");
    m.format = j.value("format", "csv");
    for (const auto& [sec, keys] : j.at("config").items()) {
      for (const auto& [k, v] : keys.items()) m.config[sec][k] = v.get<std::string>();
    }
    for (const auto& o : j.at("outputs")) m.outputs.push_back(o.get<std::string>());
    return m;
  }
};

inline std::filesystem::path manifest_path(const std::filesystem::path& dir) { return dir / "manifest.json"; }

inline nlohmann::json read_manifest_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("", "cannot open manifest " + file.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("", "malformed manifest " + file.string() + ": " + e.what());
  }
}

/// Appends `m` to dir/manifest.json, creating it if needed. The file is
/// rewritten through a temporary so a crash never leaves half an entry.
inline void append_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::filesystem::create_directories(dir);
  const auto file = manifest_path(dir);
  nlohmann::ordered_json doc;
  if (std::filesystem::exists(file)) {
    std::ifstream in(file);
    doc = nlohmann::ordered_json::parse(in);
  } else {
    doc["manifest_format"] = 1;
    doc["runs"] = nlohmann::ordered_json::array();
  }
  doc["runs"].push_back(m.to_json());
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << doc.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, file);
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace light::cli
