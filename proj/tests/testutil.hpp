#pragma once

// Shared helpers for the test suites.  The dense materialization here is an
// independent oracle path: it is built from the edge list with plain scalar
// loops and never calls the operator's own apply().

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "ile/graph.hpp"
#include "ile/matrix.hpp"
#include "ile/operators.hpp"
#include "ile/rng.hpp"

namespace ile::testutil {

inline Graph random_graph(std::int32_t n, double p, rng::Engine& eng,
                          bool weighted = true) {
  std::vector<Edge> edges;
  for (std::int32_t u = 0; u < n; ++u) {
    for (std::int32_t v = u + 1; v < n; ++v) {
      if (rng::uniform01(eng) < p) {
        double w = weighted ? 2.0 * (1.0 - rng::uniform01(eng)) : 1.0;
        edges.push_back({u, v, w});
      }
    }
  }
  return Graph::from_edge_list(edges, n);
}

inline Graph random_connected_graph(std::int32_t n, double p, rng::Engine& eng,
                                    bool weighted = true) {
  for (int tries = 0; tries < 1000; ++tries) {
    Graph g = random_graph(n, p, eng, weighted);
    if (g.is_connected()) return g;
  }
  throw std::runtime_error("could not draw a connected graph");
}

// Dense n x n matrix of t*D - s*A + shift*I, assembled edge by edge.
inline Mat dense_from_operator(const InterpolatedOperator& op) {
  std::int32_t n = op.dim();
  Mat m(n, n);
  for (const Edge& e : op.graph().to_edge_list()) {
    m(e.u, e.v) -= op.s() * e.w;
    m(e.v, e.u) -= op.s() * e.w;
    m(e.u, e.u) += op.t() * e.w;
    m(e.v, e.v) += op.t() * e.w;
  }
  for (std::int32_t i = 0; i < n; ++i) m(i, i) += op.shift();
  return m;
}

inline std::vector<double> dense_matvec(const Mat& m,
                                        const std::vector<double>& x) {
  std::vector<double> y(static_cast<std::size_t>(m.rows), 0.0);
  for (std::int64_t i = 0; i < m.rows; ++i) {
    double acc = 0.0;
    for (std::int64_t j = 0; j < m.cols; ++j) acc += m(i, j) * x[j];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

inline std::vector<double> random_vec(std::size_t n, rng::Engine& eng,
                                      double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng::uniform(eng, lo, hi);
  return v;
}

// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& a,
                       const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
      double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0;
      for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
      i = j + 1;
    }
    return r;
  };
  auto ra = ranks(a), rb = ranks(b);
  double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    da += (ra[i] - ma) * (ra[i] - ma);
    db += (rb[i] - mb) * (rb[i] - mb);
  }
  if (da == 0.0 || db == 0.0) return 0.0;
  return num / std::sqrt(da * db);
}

}  // namespace ile::testutil
