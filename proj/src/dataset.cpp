#include "ile/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "ile/rng.hpp"

namespace ile {

namespace {

constexpr std::int32_t kNoLabel = std::numeric_limits<std::int32_t>::min();

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::int64_t parse_int(std::string_view tok, std::int64_t line_no,
                       const char* what) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(std::string("expected integer ") + what + ", got '" +
                         std::string(tok) + "'",
                     line_no);
  }
  return value;
}

double parse_real(std::string_view tok, std::int64_t line_no) {
  std::string buf(tok);
  char* end = nullptr;
  double value = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty()) {
    throw ParseError("expected real number, got '" + buf + "'", line_no);
  }
  return value;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

Mat read_features(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open features file: " + path);
  std::vector<std::vector<double>> rows;
  std::int64_t cols = -1;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = trim(line);
    if (body.empty()) continue;
    auto toks = split_csv(body);
    if (cols < 0) {
      cols = static_cast<std::int64_t>(toks.size());
    } else if (static_cast<std::int64_t>(toks.size()) != cols) {
      throw ParseError("feature row has " + std::to_string(toks.size()) +
                           " columns, expected " + std::to_string(cols),
                       line_no);
    }
    std::vector<double> row;
    row.reserve(toks.size());
    for (auto tok : toks) row.push_back(parse_real(tok, line_no));
    rows.push_back(std::move(row));
  }
  Mat m(static_cast<std::int64_t>(rows.size()), cols < 0 ? 0 : cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)) =
          rows[i][j];
    }
  }
  return m;
}

std::vector<std::int32_t> read_labels(const std::string& path,
                                      std::int32_t n_raw) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open labels file: " + path);
  std::vector<std::int32_t> raw(static_cast<std::size_t>(n_raw), kNoLabel);
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = trim(line);
    if (body.empty()) continue;
    if (line_no == 1 && body == "node,label") continue;
    auto toks = split_csv(body);
    if (toks.size() != 2) {
      throw ParseError("expected 'node,label', got '" + std::string(body) +
                           "'",
                       line_no);
    }
    std::int64_t node = parse_int(toks[0], line_no, "node id");
    std::int64_t label = parse_int(toks[1], line_no, "label");
    if (node < 0 || node >= n_raw) {
      throw ParseError("node id " + std::to_string(node) +
                           " outside [0, " + std::to_string(n_raw) + ")",
                       line_no);
    }
    auto& slot = raw[static_cast<std::size_t>(node)];
    if (slot != kNoLabel) {
      throw ParseError("node " + std::to_string(node) + " labeled twice",
                       line_no);
    }
    slot = static_cast<std::int32_t>(label);
  }
  return raw;
}

// Remaps arbitrary label values to contiguous ids in ascending value order.
std::vector<std::int32_t> compact_labels(
    const std::vector<std::int32_t>& values) {
  std::map<std::int32_t, std::int32_t> to_id;
  for (auto v : values) to_id[v] = 0;
  std::int32_t next = 0;
  for (auto& [value, id] : to_id) id = next++;
  std::vector<std::int32_t> out;
  out.reserve(values.size());
  for (auto v : values) out.push_back(to_id[v]);
  return out;
}

}  // namespace

Dataset load_dataset(const std::string& edge_path,
                     const std::string& feature_path,
                     const std::string& label_path, const std::string& name) {
  Graph raw = read_edge_list_file(edge_path);
  const std::int32_t n_raw = raw.num_vertices();

  std::optional<Mat> raw_features;
  if (!feature_path.empty()) {
    Mat f = read_features(feature_path);
    if (f.rows != n_raw) {
      throw DimensionMismatch("features have " + std::to_string(f.rows) +
                              " rows, graph has " + std::to_string(n_raw) +
                              " vertices");
    }
    raw_features = std::move(f);
  }

  std::vector<std::int32_t> raw_labels;
  if (!label_path.empty()) raw_labels = read_labels(label_path, n_raw);

  auto [kept, index_map] = raw.largest_connected_component();

  Dataset d;
  d.graph = std::move(kept);
  d.index_map = std::move(index_map);
  d.name = name.empty()
               ? std::filesystem::path(edge_path).stem().string()
               : name;

  if (raw_features) {
    Mat sel(static_cast<std::int64_t>(d.index_map.size()), raw_features->cols);
    for (std::size_t i = 0; i < d.index_map.size(); ++i) {
      for (std::int64_t j = 0; j < raw_features->cols; ++j) {
        sel(static_cast<std::int64_t>(i), j) =
            (*raw_features)(d.index_map[i], j);
      }
    }
    d.features = std::move(sel);
  }

  if (!label_path.empty()) {
    std::vector<std::int32_t> kept_labels;
    kept_labels.reserve(d.index_map.size());
    for (std::int32_t orig : d.index_map) {
      std::int32_t v = raw_labels[static_cast<std::size_t>(orig)];
      if (v == kNoLabel) {
        throw MissingLabelsError("node " + std::to_string(orig) +
                                 " has no label in " + label_path);
      }
      kept_labels.push_back(v);
    }
    d.labels = compact_labels(kept_labels);
  }
  return d;
}

std::vector<std::int32_t> degree_labels(const Graph& g, double top_fraction) {
  if (!(top_fraction > 0.0 && top_fraction < 1.0)) {
    throw InvalidFraction("top_fraction must lie strictly in (0,1), got " +
                          std::to_string(top_fraction));
  }
  const std::int32_t n = g.num_vertices();
  DegreeVector deg = g.degree_vector();
  std::vector<std::int32_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
    double da = deg[static_cast<std::size_t>(a)];
    double db = deg[static_cast<std::size_t>(b)];
    if (da != db) return da > db;
    return a < b;
  });
  // Guard against 0.2 * 10 = 2.0000000000000004-style round-off before ceil.
  auto top = static_cast<std::int32_t>(
      std::ceil(top_fraction * static_cast<double>(n) - 1e-9));
  std::vector<std::int32_t> labels(static_cast<std::size_t>(n), 0);
  for (std::int32_t i = 0; i < top && i < n; ++i) {
    labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 1;
  }
  return labels;
}

Mat corrupt_features(const Mat& x, double ratio, double sigma,
                     std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw InvalidRatio("corruption ratio must lie in [0,1], got " +
                       std::to_string(ratio));
  }
  if (sigma < 0.0) {
    throw InvalidArgument("noise sigma must be >= 0, got " +
                          std::to_string(sigma));
  }
  const auto n = static_cast<std::int32_t>(x.rows);
  auto m = static_cast<std::int32_t>(
      std::floor(ratio * static_cast<double>(n) + 1e-9));

  Mat out = x;
  rng::Engine eng(seed);
  std::vector<std::int32_t> perm = rng::permutation(n, eng);
  std::vector<std::int32_t> rows(perm.begin(), perm.begin() + m);
  std::sort(rows.begin(), rows.end());
  for (std::int32_t r : rows) {
    for (std::int64_t j = 0; j < x.cols; ++j) {
      out(r, j) += sigma * rng::normal(eng);
    }
  }
  return out;
}

Split split_70_30(std::int32_t n, std::uint64_t seed) {
  if (n < 2) {
    throw TooSmallError("split needs n >= 2, got " + std::to_string(n));
  }
  rng::Engine eng(seed);
  std::vector<std::int32_t> perm = rng::permutation(n, eng);
  auto train = static_cast<std::size_t>(
      std::floor(0.7 * static_cast<double>(n) + 1e-9));
  Split s;
  s.train_idx.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(train));
  s.test_idx.assign(perm.begin() + static_cast<std::ptrdiff_t>(train), perm.end());
  s.seed = seed;
  return s;
}

void write_edge_list_file(const Graph& g, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  write_edge_list(g, f);
  if (!f.good()) throw IoError("write failed: " + path);
}

void write_labels_csv(const std::vector<std::int32_t>& labels,
                      std::ostream& out) {
  out << "node,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << i << ',' << labels[i] << '\n';
  }
}

void write_labels_csv_file(const std::vector<std::int32_t>& labels,
                           const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  write_labels_csv(labels, f);
  if (!f.good()) throw IoError("write failed: " + path);
}

}  // namespace ile
