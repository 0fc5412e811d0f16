#pragma once

// INI experiment configuration. Sections are looked up by literal name
// ("sweep", "uci.pima"); keys inside a section are flat. Every value read
// is recorded, default or not, so the resolved configuration can be written
// back out and rerun as is. Keys present in a section but never read are
// reported as errors, which catches typos.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <locale>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "light/cli/csv.hpp"
#include "light/errors.hpp"

namespace light::cli {

using Sections = std::map<std::string, std::map<std::string, std::string>>;

inline Sections parse_ini_text(const std::string& text, const std::string& origin = "<config>") {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("", origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  Sections out;
  for (const auto& [name, sec] : tree) {
    if (sec.empty() && !sec.data().empty()) throw ConfigError(name, "keys must live inside a [section]");
    auto& dst = out[name];
    for (const auto& [key, val] : sec) dst[key] = val.get_value<std::string>();
  }
  return out;
}

inline Sections load_ini(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_ini_text(ss.str(), path);
}

inline std::string to_ini_text(const Sections& s) {
  std::string out;
  for (const auto& [name, keys] : s) {
    out += "[" + name + "]\n";
    for (const auto& [k, v] : keys) out += k + " = " + v + "\n";
    out += "\n";
  }
  return out;
}

inline std::string trim_copy(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    cur = trim_copy(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

class Config {
 public:
  Config() = default;
  explicit Config(Sections s) : raw_(std::move(s)) {}

  /// Values that win over both the file and the defaults (--scale, --seed).
  void force(const std::string& section, const std::string& key, const std::string& value) {
    forced_[section][key] = value;
  }

  bool has_section(const std::string& section) const { return raw_.count(section) > 0; }

  std::string str(const std::string& section, const std::string& key, const std::string& def) {
    auto v = lookup(section, key);
    const std::string out = v ? trim_copy(*v) : def;
    resolved_[section][key] = out;
    return out;
  }

  /// A required string; no default.
  std::string required(const std::string& section, const std::string& key) {
    auto v = lookup(section, key);
    if (!v || trim_copy(*v).empty()) throw ConfigError(path(section, key), "required key is missing");
    resolved_[section][key] = trim_copy(*v);
    return trim_copy(*v);
  }

  double real(const std::string& section, const std::string& key, double def) {
    const auto s = str(section, key, format_real(def));
    const double v = parse_double(section, key, s);
    resolved_[section][key] = format_real(v);
    return v;
  }

  long long integer(const std::string& section, const std::string& key, long long def, long long lo,
                    long long hi = std::numeric_limits<long long>::max()) {
    const auto s = str(section, key, std::to_string(def));
    const long long v = parse_int(section, key, s);
    if (v < lo || v > hi) {
      throw ConfigError(path(section, key), "value " + s + " outside [" + std::to_string(lo) + ", " +
                                                (hi == std::numeric_limits<long long>::max() ? "inf"
                                                                                             : std::to_string(hi)) +
                                                "]");
    }
    return v;
  }

  bool boolean(const std::string& section, const std::string& key, bool def) {
    const auto s = str(section, key, def ? "true" : "false");
    if (s == "true" || s == "1" || s == "yes") return resolved_[section][key] = "true", true;
    if (s == "false" || s == "0" || s == "no") return resolved_[section][key] = "false", false;
    throw ConfigError(path(section, key), "expected true or false, got '" + s + "'");
  }

  std::vector<std::string> list(const std::string& section, const std::string& key,
                                const std::vector<std::string>& def) {
    std::string joined;
    for (std::size_t i = 0; i < def.size(); ++i) joined += (i ? "," : "") + def[i];
    const auto out = split_list(str(section, key, joined));
    std::string norm;
    for (std::size_t i = 0; i < out.size(); ++i) norm += (i ? "," : "") + out[i];
    resolved_[section][key] = norm;
    return out;
  }

  std::vector<long long> integers(const std::string& section, const std::string& key,
                                  const std::vector<long long>& def, long long lo, long long hi) {
    std::vector<std::string> d;
    for (auto v : def) d.push_back(std::to_string(v));
    std::vector<long long> out;
    for (const auto& s : list(section, key, d)) {
      const long long v = parse_int(section, key, s);
      if (v < lo || v > hi) throw ConfigError(path(section, key), "value " + s + " out of range");
      out.push_back(v);
    }
    if (out.empty()) throw ConfigError(path(section, key), "list must not be empty");
    return out;
  }

  /// Throws on keys that were set in the file but never read.
  void reject_unknown() const {
    for (const auto& [sec, keys] : raw_) {
      if (!touched_sections_.count(sec)) continue;
      for (const auto& [k, v] : keys) {
        auto it = resolved_.find(sec);
        if (it == resolved_.end() || !it->second.count(k)) throw ConfigError(path(sec, k), "unknown key");
      }
    }
  }

  /// Every value read so far, with defaults inlined.
  const Sections& resolved() const { return resolved_; }

  static std::string path(const std::string& section, const std::string& key) { return section + "." + key; }

 private:
  std::optional<std::string> lookup(const std::string& section, const std::string& key) {
    touched_sections_.insert(section);
    if (auto f = find(forced_, section, key)) return f;
    return find(raw_, section, key);
  }

  static std::optional<std::string> find(const Sections& s, const std::string& section, const std::string& key) {
    auto it = s.find(section);
    if (it == s.end()) return std::nullopt;
    auto jt = it->second.find(key);
    if (jt == it->second.end()) return std::nullopt;
    return jt->second;
  }

  static double parse_double(const std::string& section, const std::string& key, const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    std::istringstream in(s);
    in.imbue(std::locale::classic());
    double v;
    in >> v;
    if (!in || !(in >> std::ws).eof() || !std::isfinite(v)) {
      throw ConfigError(path(section, key), "expected a finite number, got '" + s + "'");
    }
    return v;
  }

  static long long parse_int(const std::string& section, const std::string& key, const std::string& s) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != s.size()) throw ConfigError(path(section, key), "expected an integer, got '" + s + "'");
    return v;
  }

  Sections raw_;
  Sections forced_;
  Sections resolved_;
  std::set<std::string> touched_sections_;
};

}  // namespace light::cli
