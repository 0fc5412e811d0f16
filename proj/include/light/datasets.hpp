#pragma once

// Binary-labelled datasets: the two-cluster synthetic blobs, delimited
// tabular files, flattened image files and a single-file binary cache.
//
// Labels are always -1 / +1. Every dataset carries its train/test split.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "light/errors.hpp"

namespace light {

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded random 80/20 style split: floor(fraction * m) indices go to train,
/// the rest to test. Both lists come back sorted.
inline Split make_split(std::size_t m, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw ValidationError("make_split: train fraction must lie in (0, 1]");
  }
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(m)));
  Split s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

struct Dataset {
  Eigen::MatrixXd X;         ///< m x n, one sample per row
  std::vector<int> y;        ///< -1 / +1
  Split split;
  std::string provenance;    ///< free-form description, kept in run metadata

  std::size_t m() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t n() const { return static_cast<std::size_t>(X.cols()); }

  void validate() const {
    if (y.size() != m()) throw ValidationError("dataset: label count differs from row count");
    for (int v : y) {
      if (v != -1 && v != 1) throw ValidationError("dataset: labels must be -1 or +1");
    }
    if (!X.allFinite()) throw ValidationError("dataset: non-finite feature");
    std::vector<char> seen(m(), 0);
    for (const auto* part : {&split.train, &split.test}) {
      for (auto i : *part) {
        if (i >= m()) throw ValidationError("dataset: split index out of range");
        if (seen[i]++) throw ValidationError("dataset: split index used twice");
      }
    }
    if (split.train.size() + split.test.size() != m()) {
      throw ValidationError("dataset: split does not cover every row");
    }
  }

  /// Rows `idx` as a matrix with their labels.
  std::pair<Eigen::MatrixXd, std::vector<int>> rows(const std::vector<std::size_t>& idx) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), X.cols());
    std::vector<int> lab(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(idx[i]));
      lab[i] = y[idx[i]];
    }
    return {std::move(out), std::move(lab)};
  }
};

// ---------------------------------------------------------------------------
// synthetic blobs

struct BlobParams {
  std::size_t m = 1000;
  std::size_t n = 2;
  double cluster_std = 0.25;
  std::vector<double> center_a{-0.75, 2.25};
  std::vector<double> center_b{1.0, 2.0};
  std::uint64_t seed = 0;
  double train_fraction = 0.8;

  void validate() const {
    if (m < 2) throw ValidationError("blobs: m must be >= 2");
    if (n < 2) throw ValidationError("blobs: n must be >= 2");
    if (!(cluster_std > 0.0) || !std::isfinite(cluster_std)) throw ValidationError("blobs: cluster_std must be > 0");
    if (center_a.size() > n || center_b.size() > n) throw ValidationError("blobs: center longer than n");
  }
};

/// Two Gaussian clusters. Cluster A gets ceil(m/2) rows with label -1 and
/// comes first, cluster B the remaining rows with label +1. Center
/// coordinates beyond those given are 0 for both clusters.
inline Dataset make_blobs(const BlobParams& p) {
  p.validate();
  const std::size_t m_a = (p.m + 1) / 2;
  Dataset d;
  d.X.resize(static_cast<Eigen::Index>(p.m), static_cast<Eigen::Index>(p.n));
  d.y.resize(p.m);
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> noise(0.0, p.cluster_std);
  for (std::size_t i = 0; i < p.m; ++i) {
    const bool a = i < m_a;
    const auto& c = a ? p.center_a : p.center_b;
    for (std::size_t j = 0; j < p.n; ++j) {
      const double mu = j < c.size() ? c[j] : 0.0;
      d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = mu + noise(rng);
    }
    d.y[i] = a ? -1 : 1;
  }
  // split stream decoupled from the sample stream
  d.split = make_split(p.m, p.train_fraction, p.seed ^ 0x9e3779b97f4a7c15ULL);
  std::ostringstream os;
  os << "blobs(m=" << p.m << ", n=" << p.n << ", std=" << p.cluster_std << ", seed=" << p.seed << ")";
  d.provenance = os.str();
  return d;
}

// ---------------------------------------------------------------------------
// delimited tabular files

enum class MissingPolicy { Error, DropRow, ColumnMean };

struct TabularSchema {
  char delimiter = ',';
  bool whitespace_delimited = false;     ///< any run of spaces/tabs separates fields
  bool has_header = false;
  int label_column = -1;                 ///< negative counts from the end
  std::optional<std::string> positive_label;  ///< rows with this label are +1, all others -1
  std::vector<std::size_t> drop_columns; ///< 0-based, applied before the label lookup
  std::vector<std::string> missing_tokens{"?", "", "NA"};
  MissingPolicy missing = MissingPolicy::Error;
  std::optional<std::size_t> expected_m;
  std::optional<std::size_t> expected_n;
};

/// Layouts of the six benchmark sets, matching the usual public
/// distributions of those files.
///   pima    768 x 8, comma separated, label 0/1 last
///   breast  699 x 9, comma separated, leading id column, label 2/4 last, '?' imputed
///   heart   270 x 13, space separated, label 1/2 last
/// The image sets go through load_image_csv / load_image_records.
inline std::optional<TabularSchema> known_schema(std::string_view name) {
  TabularSchema s;
  if (name == "pima") {
    s.positive_label = "1";
    s.expected_m = 768;
    s.expected_n = 8;
    return s;
  }
  if (name == "breast") {
    s.drop_columns = {0};
    s.positive_label = "4";
    s.missing = MissingPolicy::ColumnMean;
    s.expected_m = 699;
    s.expected_n = 9;
    return s;
  }
  if (name == "heart") {
    s.whitespace_delimited = true;
    s.positive_label = "2";
    s.expected_m = 270;
    s.expected_n = 13;
    return s;
  }
  return std::nullopt;
}

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_fields(const std::string& line, const TabularSchema& s) {
  std::vector<std::string> out;
  if (s.whitespace_delimited) {
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(s.delimiter, start);
    out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_real(const std::string& tok) {
  if (tok.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Two distinct labels map to -1 / +1 in ascending order (numeric when both
// parse as numbers).
inline std::map<std::string, int> two_class_map(const std::set<std::string>& labels) {
  if (labels.size() != 2) {
    throw ValidationError("label cardinality is " + std::to_string(labels.size()) +
                          ", expected 2 (give a positive label to binarize)");
  }
  std::vector<std::string> v(labels.begin(), labels.end());
  const auto a = parse_real(v[0]), b = parse_real(v[1]);
  if (a && b && *b < *a) std::swap(v[0], v[1]);
  return {{v[0], -1}, {v[1], 1}};
}

inline std::ifstream open_input(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw ParseError("cannot open " + path);
  return in;
}

}  // namespace detail

/// Reads a delimited file. Features must parse as reals; missing tokens are
/// handled per schema. The label column is kept as text and mapped to -1/+1.
/// Rows and columns in ParseError are 1-based file coordinates.
inline Dataset load_tabular(const std::string& path, const TabularSchema& schema, double train_fraction = 0.8,
                            std::uint64_t split_seed = 0) {
  auto in = detail::open_input(path);
  std::vector<std::vector<std::optional<double>>> feats;
  std::vector<std::string> labels;
  std::vector<std::size_t> file_rows;
  std::string line;
  std::size_t row = 0;
  std::optional<std::size_t> width;
  std::set<std::size_t> drop(schema.drop_columns.begin(), schema.drop_columns.end());
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (row == 1 && schema.has_header) continue;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line, schema);
    if (!width) width = fields.size();
    if (fields.size() != *width) {
      throw ParseError(path + ": expected " + std::to_string(*width) + " fields, found " +
                           std::to_string(fields.size()),
                       row, std::min(fields.size(), *width) + 1);
    }
    const long long w = static_cast<long long>(fields.size());
    const long long lab = schema.label_column < 0 ? w + schema.label_column : schema.label_column;
    if (lab < 0 || lab >= w) throw ParseError(path + ": label column out of range", row, 0);
    std::vector<std::optional<double>> r;
    bool missing_here = false;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (static_cast<long long>(c) == lab || drop.count(c)) continue;
      const auto& tok = fields[c];
      const bool is_missing = std::find(schema.missing_tokens.begin(), schema.missing_tokens.end(), tok) !=
                              schema.missing_tokens.end();
      if (is_missing) {
        if (schema.missing == MissingPolicy::Error) {
          throw ParseError(path + ": missing value '" + tok + "'", row, c + 1);
        }
        missing_here = true;
        r.push_back(std::nullopt);
        continue;
      }
      const auto v = detail::parse_real(tok);
      if (!v) throw ParseError(path + ": cannot parse '" + tok + "' as a number", row, c + 1);
      r.push_back(v);
    }
    if (missing_here && schema.missing == MissingPolicy::DropRow) continue;
    feats.push_back(std::move(r));
    labels.push_back(fields[static_cast<std::size_t>(lab)]);
    file_rows.push_back(row);
  }
  if (feats.empty()) throw ParseError(path + ": no data rows");

  const std::size_t m = feats.size(), n = feats.front().size();
  Dataset d;
  d.X.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    std::size_t cnt = 0;
    for (const auto& r : feats) {
      if (r[j]) sum += *r[j], ++cnt;
    }
    const double mean = cnt ? sum / static_cast<double>(cnt) : 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = feats[i][j].value_or(mean);
    }
  }
  d.y.resize(m);
  if (schema.positive_label) {
    std::set<std::string> distinct(labels.begin(), labels.end());
    if (distinct.size() < 2) throw ValidationError(path + ": only one label value present");
    for (std::size_t i = 0; i < m; ++i) d.y[i] = labels[i] == *schema.positive_label ? 1 : -1;
  } else {
    const auto map = detail::two_class_map(std::set<std::string>(labels.begin(), labels.end()));
    for (std::size_t i = 0; i < m; ++i) d.y[i] = map.at(labels[i]);
  }
  if (schema.expected_m && *schema.expected_m != m) {
    throw ValidationError(path + ": expected " + std::to_string(*schema.expected_m) + " rows, found " +
                          std::to_string(m));
  }
  if (schema.expected_n && *schema.expected_n != n) {
    throw ValidationError(path + ": expected " + std::to_string(*schema.expected_n) + " features, found " +
                          std::to_string(n));
  }
  d.split = make_split(m, train_fraction, split_seed);
  d.provenance = "tabular(" + path + ")";
  return d;
}

// ---------------------------------------------------------------------------
// image files

/// Multiclass image rows before binarization. Pixels are raw 0..255 values,
/// grayscale, one row per image.
struct ImageSet {
  Eigen::MatrixXd pixels;
  std::vector<int> classes;
  std::string provenance;
};

/// Colour images come channel-planar (all R, then all G, then all B) and are
/// reduced to luminance 0.299 R + 0.587 G + 0.114 B.
inline Eigen::RowVectorXd to_grayscale(const Eigen::RowVectorXd& planar, std::size_t pixels) {
  const auto p = static_cast<Eigen::Index>(pixels);
  return 0.299 * planar.segment(0, p) + 0.587 * planar.segment(p, p) + 0.114 * planar.segment(2 * p, p);
}

/// CSV with the class index first and then `pixels * channels` values per row.
/// A non-numeric first line is taken as a header.
inline ImageSet load_image_csv(const std::string& path, std::size_t pixels, std::size_t channels = 1) {
  if (channels != 1 && channels != 3) throw ValidationError("load_image_csv: channels must be 1 or 3");
  auto in = detail::open_input(path);
  TabularSchema s;
  std::vector<Eigen::RowVectorXd> rows;
  std::vector<int> classes;
  std::string line;
  std::size_t row = 0;
  const std::size_t width = 1 + pixels * channels;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split_fields(line, s);
    if (row == 1 && !detail::parse_real(f.front())) continue;
    if (f.size() != width) {
      throw ParseError(path + ": expected " + std::to_string(width) + " fields, found " + std::to_string(f.size()),
                       row, std::min(f.size(), width) + 1);
    }
    Eigen::RowVectorXd v(static_cast<Eigen::Index>(pixels * channels));
    for (std::size_t c = 1; c < f.size(); ++c) {
      const auto x = detail::parse_real(f[c]);
      if (!x) throw ParseError(path + ": cannot parse '" + f[c] + "' as a number", row, c + 1);
      v(static_cast<Eigen::Index>(c - 1)) = *x;
    }
    const auto cls = detail::parse_real(f[0]);
    if (!cls || *cls != std::floor(*cls)) throw ParseError(path + ": class index must be an integer", row, 1);
    classes.push_back(static_cast<int>(*cls));
    rows.push_back(channels == 3 ? to_grayscale(v, pixels) : v);
  }
  ImageSet out;
  out.pixels.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(pixels));
  for (std::size_t i = 0; i < rows.size(); ++i) out.pixels.row(static_cast<Eigen::Index>(i)) = rows[i];
  out.classes = std::move(classes);
  out.provenance = "image_csv(" + path + ")";
  return out;
}

/// Flat binary records: one class byte followed by `pixels * channels` bytes
/// (the CIFAR-10 binary layout when channels = 3).
inline ImageSet load_image_records(const std::string& path, std::size_t pixels, std::size_t channels = 1) {
  if (channels != 1 && channels != 3) throw ValidationError("load_image_records: channels must be 1 or 3");
  auto in = detail::open_input(path, std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t rec = 1 + pixels * channels;
  if (bytes.empty() || bytes.size() % rec != 0) {
    throw ParseError(path + ": size " + std::to_string(bytes.size()) + " is not a multiple of the record length " +
                         std::to_string(rec),
                     bytes.size() / rec + 1, 0);
  }
  const std::size_t count = bytes.size() / rec;
  ImageSet out;
  out.pixels.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(pixels));
  out.classes.resize(count);
  Eigen::RowVectorXd v(static_cast<Eigen::Index>(pixels * channels));
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned char* r = bytes.data() + i * rec;
    out.classes[i] = r[0];
    for (std::size_t c = 0; c < pixels * channels; ++c) v(static_cast<Eigen::Index>(c)) = r[1 + c];
    out.pixels.row(static_cast<Eigen::Index>(i)) = channels == 3 ? to_grayscale(v, pixels) : v;
  }
  out.provenance = "image_records(" + path + ")";
  return out;
}

/// class index >= threshold -> +1, otherwise -1.
struct BinarizationRule {
  int threshold = 5;
  int operator()(int cls) const { return cls >= threshold ? 1 : -1; }
};

namespace detail {

inline std::vector<std::size_t> sample_without_replacement(std::size_t pool, std::size_t k, std::mt19937_64& rng,
                                                           const char* what) {
  if (k > pool) {
    throw ValidationError(std::string("binarize_and_subsample: ") + what + " has " + std::to_string(pool) +
                          " rows, " + std::to_string(k) + " requested");
  }
  std::vector<std::size_t> idx(pool);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // partial Fisher-Yates
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace detail

/// Draws m_train rows from `train_part` and m_test rows from `test_part`
/// without replacement, binarizes the class labels and divides pixels by 255.
/// The result's split is the first m_train rows / the last m_test rows.
inline Dataset binarize_and_subsample(const ImageSet& train_part, const ImageSet& test_part,
                                      BinarizationRule rule = {}, std::size_t m_train = 1000,
                                      std::size_t m_test = 200, std::uint64_t seed = 0) {
  if (train_part.pixels.cols() != test_part.pixels.cols()) {
    throw ValidationError("binarize_and_subsample: train and test pixel counts differ");
  }
  std::mt19937_64 rng(seed);
  const auto tr = detail::sample_without_replacement(train_part.classes.size(), m_train, rng, "train part");
  const auto te = detail::sample_without_replacement(test_part.classes.size(), m_test, rng, "test part");
  Dataset d;
  d.X.resize(static_cast<Eigen::Index>(m_train + m_test), train_part.pixels.cols());
  d.y.resize(m_train + m_test);
  std::size_t out = 0;
  for (const auto& [set, idx] : {std::pair{&train_part, &tr}, std::pair{&test_part, &te}}) {
    for (auto i : *idx) {
      d.X.row(static_cast<Eigen::Index>(out)) = set->pixels.row(static_cast<Eigen::Index>(i)) / 255.0;
      d.y[out] = rule(set->classes[i]);
      ++out;
    }
  }
  d.split.train.resize(m_train);
  std::iota(d.split.train.begin(), d.split.train.end(), std::size_t{0});
  d.split.test.resize(m_test);
  std::iota(d.split.test.begin(), d.split.test.end(), m_train);
  const bool both = std::count(d.y.begin(), d.y.end(), 1) > 0 && std::count(d.y.begin(), d.y.end(), -1) > 0;
  if (!both) throw ValidationError("binarize_and_subsample: only one class left after binarization");
  d.provenance = "images(" + train_part.provenance + ", " + test_part.provenance +
                 ", positive iff class >= " + std::to_string(rule.threshold) + ", seed=" + std::to_string(seed) + ")";
  return d;
}

/// Single pool (no native train/test division): the two samples are drawn
/// disjointly from the same rows.
inline Dataset binarize_and_subsample(const ImageSet& pool, BinarizationRule rule = {}, std::size_t m_train = 1000,
                                      std::size_t m_test = 200, std::uint64_t seed = 0) {
  std::mt19937_64 rng(seed);
  const auto idx = detail::sample_without_replacement(pool.classes.size(), m_train + m_test, rng, "pool");
  ImageSet a, b;
  a.pixels.resize(static_cast<Eigen::Index>(m_train), pool.pixels.cols());
  b.pixels.resize(static_cast<Eigen::Index>(m_test), pool.pixels.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    auto& dst = i < m_train ? a : b;
    const std::size_t r = i < m_train ? i : i - m_train;
    dst.pixels.row(static_cast<Eigen::Index>(r)) = pool.pixels.row(static_cast<Eigen::Index>(idx[i]));
    dst.classes.push_back(pool.classes[idx[i]]);
  }
  a.provenance = b.provenance = pool.provenance;
  return binarize_and_subsample(a, b, rule, m_train, m_test, seed);
}

// ---------------------------------------------------------------------------
// binary cache
//
//   magic      16 bytes  "LIGHT-DATASET\0\0\0"
//   version    1 byte    (1)
//   m, n       uint64 little endian
//   features   m*n float64, row-major
//   labels     m int8
//   n_train    uint64, then n_train uint64 indices
//   n_test     uint64, then n_test uint64 indices
//   provenance uint64 length, then bytes

inline constexpr char kCacheMagic[16] = {'L', 'I', 'G', 'H', 'T', '-', 'D', 'A', 'T', 'A', 'S', 'E', 'T', 0, 0, 0};
inline constexpr std::uint8_t kCacheVersion = 1;

static_assert(std::endian::native == std::endian::little, "cache I/O assumes a little-endian host");

inline void write_cache(const std::string& path, const Dataset& d) {
  d.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write " + path);
  auto put64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  out.write(kCacheMagic, 16);
  out.put(static_cast<char>(kCacheVersion));
  put64(d.m());
  put64(d.n());
  for (Eigen::Index i = 0; i < d.X.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.X.cols(); ++j) {
      const double v = d.X(i, j);
      out.write(reinterpret_cast<const char*>(&v), 8);
    }
  }
  for (int v : d.y) out.put(static_cast<char>(static_cast<std::int8_t>(v)));
  for (const auto* part : {&d.split.train, &d.split.test}) {
    put64(part->size());
    for (auto i : *part) put64(i);
  }
  put64(d.provenance.size());
  out.write(d.provenance.data(), static_cast<std::streamsize>(d.provenance.size()));
  if (!out) throw ParseError("short write to " + path);
}

inline Dataset read_cache(const std::string& path) {
  auto in = detail::open_input(path, std::ios::binary);
  auto need = [&](void* dst, std::size_t bytes) {
    in.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes) throw ParseError(path + ": truncated cache file");
  };
  auto get64 = [&] {
    std::uint64_t v;
    need(&v, 8);
    return v;
  };
  char magic[16];
  need(magic, 16);
  if (std::memcmp(magic, kCacheMagic, 16) != 0) throw ParseError(path + ": not a dataset cache");
  std::uint8_t version;
  need(&version, 1);
  if (version != kCacheVersion) throw ParseError(path + ": unsupported cache version " + std::to_string(version));
  const auto m = get64(), n = get64();
  Dataset d;
  d.X.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::uint64_t i = 0; i < m; ++i) {
    for (std::uint64_t j = 0; j < n; ++j) need(&d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), 8);
  }
  d.y.resize(m);
  for (auto& v : d.y) {
    std::int8_t b;
    need(&b, 1);
    v = b;
  }
  for (auto* part : {&d.split.train, &d.split.test}) {
    part->resize(get64());
    for (auto& i : *part) i = get64();
  }
  d.provenance.resize(get64());
  need(d.provenance.data(), d.provenance.size());
  d.validate();
  return d;
}

}  // namespace light
