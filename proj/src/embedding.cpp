#include "ile/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "ile/errors.hpp"
#include "ile/format.hpp"

namespace ile {

namespace {

void check_preconditions(const Graph& g, std::int32_t k) {
  if (!g.is_connected()) {
    throw NotConnectedError(
        "embedding requires a connected graph; take the largest connected "
        "component first");
  }
  if (k < 1) {
    throw InvalidArgument("embedding dimension k must be >= 1, got " +
                          std::to_string(k));
  }
  if (k >= g.num_vertices()) {
    throw TooLargeError("embedding dimension k = " + std::to_string(k) +
                        " must be < n = " + std::to_string(g.num_vertices()));
  }
}

Embedding build_from_pairs(const EigenPairs& pairs, double t, double s,
                           double shift, double max_degree, std::int32_t k) {
  const std::int32_t solved = static_cast<std::int32_t>(pairs.eigenvalues.size());
  std::int32_t drop = -1;
  if (t == s) {
    const double thr = 1e-8 * std::max(1.0, std::fabs(t)) * max_degree;
    for (std::int32_t i = 0; i < solved; ++i) {
      if (std::fabs(pairs.eigenvalues[static_cast<std::size_t>(i)] - shift) <
          thr) {
        drop = i;
        break;
      }
    }
  }

  Embedding emb;
  emb.t = t;
  emb.s = s;
  emb.k = k;
  emb.convention = Convention::SmallestEnd;
  if (drop >= 0) emb.skipped.push_back(drop);

  emb.coords = Mat(pairs.vectors.rows, k);
  std::int32_t out = 0;
  for (std::int32_t i = 0; i < solved && out < k; ++i) {
    if (i == drop) continue;
    emb.eigenvalues.push_back(pairs.eigenvalues[static_cast<std::size_t>(i)]);
    for (std::int64_t r = 0; r < pairs.vectors.rows; ++r) {
      emb.coords(r, out) = pairs.vectors(r, i);
    }
    ++out;
  }
  return emb;
}

}  // namespace

Embedding compute_ile(const InterpolatedOperator& op, std::int32_t k,
                      double tol, std::uint64_t seed) {
  const Graph& g = op.graph();
  check_preconditions(g, k);
  double max_degree = 0.0;
  for (double d : op.degrees()) max_degree = std::max(max_degree, d);
  EigenPairs pairs = smallest_k(op, k + 1, {.tol = tol, .seed = seed});
  return build_from_pairs(pairs, op.t(), op.s(), op.shift(), max_degree, k);
}

Embedding compute_ile(const Graph& g, double t, double s, std::int32_t k,
                      double tol, std::uint64_t seed) {
  check_preconditions(g, k);
  InterpolatedOperator op(g, t, s);
  return compute_ile(op, k, tol, seed);
}

Embedding compute_adjacency_embedding(const Graph& g, std::int32_t k,
                                      double tol, std::uint64_t seed) {
  check_preconditions(g, k);
  InterpolatedOperator adj(g, 0.0, -1.0);  // M(0,-1) = +A
  EigenPairs pairs = largest_k(adj, k, {.tol = tol, .seed = seed});

  Embedding emb;
  emb.k = k;
  emb.convention = Convention::LargestEnd;
  emb.coords = Mat(pairs.vectors.rows, k);
  for (std::int32_t j = 0; j < k; ++j) {
    // largest_k returns ascending order; the adjacency convention wants
    // descending.
    std::int32_t src = k - 1 - j;
    emb.eigenvalues.push_back(pairs.eigenvalues[static_cast<std::size_t>(src)]);
    for (std::int64_t r = 0; r < pairs.vectors.rows; ++r) {
      emb.coords(r, j) = pairs.vectors(r, src);
    }
  }
  return emb;
}

Mat augment_features(const Mat* base, const Embedding& emb) {
  const std::int64_t n = emb.coords.rows;
  const std::int64_t k = emb.coords.cols;
  if (base != nullptr && base->rows != n) {
    throw DimensionMismatch("augment_features: base has " +
                            std::to_string(base->rows) + " rows, embedding " +
                            std::to_string(n));
  }
  const std::int64_t d = base != nullptr ? base->cols : 0;

  Mat out(n, d + k);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < d; ++j) out(i, j) = (*base)(i, j);
  }
  for (std::int64_t j = 0; j < k; ++j) {
    double mean = 0.0;
    double sumsq = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      mean += emb.coords(i, j);
      sumsq += emb.coords(i, j) * emb.coords(i, j);
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      double c = emb.coords(i, j) - mean;
      var += c * c;
    }
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    const double rms = std::sqrt(sumsq / static_cast<double>(n));
    if (sd <= 1e-8 * rms) {
      // A column with no variation relative to its magnitude (e.g. the Perron
      // vector of a regular graph) carries no information; emit zeros rather
      // than round-off noise blown up to unit variance.
      for (std::int64_t i = 0; i < n; ++i) out(i, d + j) = 0.0;
    } else {
      for (std::int64_t i = 0; i < n; ++i) {
        out(i, d + j) = (emb.coords(i, j) - mean) / sd;
      }
    }
  }
  return out;
}

void write_embedding_csv(const Embedding& emb, std::ostream& out) {
  out << "node";
  for (std::int32_t j = 1; j <= emb.k; ++j) out << ",ev_" << j;
  out << '\n';
  for (std::int64_t i = 0; i < emb.coords.rows; ++i) {
    out << i;
    for (std::int64_t j = 0; j < emb.coords.cols; ++j) {
      out << ',' << format_double(emb.coords(i, j));
    }
    out << '\n';
  }
}

void write_embedding_csv_file(const Embedding& emb, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  write_embedding_csv(emb, f);
  if (!f.good()) throw IoError("write failed: " + path);
}

void write_embedding_sidecar(const Embedding& emb, double tol,
                             std::uint64_t seed, std::ostream& out) {
  nlohmann::json j;
  if (emb.t) j["t"] = *emb.t;
  if (emb.s) j["s"] = *emb.s;
  j["k"] = emb.k;
  j["convention"] = emb.convention == Convention::SmallestEnd
                        ? "smallest-end"
                        : "largest-end";
  j["skipped"] = emb.skipped;
  j["eigenvalues"] = emb.eigenvalues;
  j["tol"] = tol;
  j["seed"] = seed;
  out << j.dump(2) << '\n';
}

void write_embedding_sidecar_file(const Embedding& emb, double tol,
                                  std::uint64_t seed,
                                  const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  write_embedding_sidecar(emb, tol, seed, f);
  if (!f.good()) throw IoError("write failed: " + path);
}

}  // namespace ile
