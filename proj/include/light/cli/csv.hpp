#pragma once

// CSV output with a fixed number format: %.17g, '.' as decimal separator,
// "\n" line endings. NaN prints as "nan", infinities as "inf" / "-inf".

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "light/errors.hpp"

namespace light::cli {

/// Schema version written into manifests next to every CSV.
inline constexpr int kCsvSchemaVersion = 1;

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  // snprintf honours LC_NUMERIC; the CLI never calls setlocale, so this is "C"
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row_strings(header); }

  CsvWriter& cell(double v) { return put(format_real(v)); }
  CsvWriter& cell(long long v) { return put(std::to_string(v)); }
  CsvWriter& cell(int v) { return put(std::to_string(v)); }
  CsvWriter& cell(std::size_t v) { return put(std::to_string(v)); }
  CsvWriter& cell(std::string_view s) { return put(std::string(s)); }
  CsvWriter& cell(const char* s) { return put(s); }

  void end_row() {
    if (in_row_ != columns_) throw ValidationError("csv: row has " + std::to_string(in_row_) + " cells, expected " +
                                                   std::to_string(columns_));
    text_ += '\n';
    in_row_ = 0;
  }

  const std::string& str() const { return text_; }

  void save(const std::filesystem::path& path) const {
    if (in_row_ != 0) throw ValidationError("csv: unfinished row");
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text_;
    if (!out) throw std::runtime_error("cannot write " + path.string());
  }

 private:
  CsvWriter& put(std::string s) {
    if (in_row_ > 0) text_ += ',';
    text_ += s;
    ++in_row_;
    return *this;
  }
  void row_strings(const std::vector<std::string>& v) {
    for (const auto& s : v) put(s);
    end_row();
  }

  std::size_t columns_;
  std::size_t in_row_ = 0;
  std::string text_;
};

}  // namespace light::cli
