#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ile/errors.hpp"

namespace ile {

struct Edge {
  std::int32_t u;
  std::int32_t v;
  double w;
};

using DegreeVector = std::vector<double>;

// Immutable undirected weighted graph in CSR form.  Each undirected edge is
// stored in both directions; neighbor lists are sorted by vertex id; self
// loops and duplicate edges are construction errors.
class Graph {
 public:
  Graph() = default;

  // Validates and builds.  `n` fixes the vertex count (isolated vertices are
  // allowed); throws IndexOutOfRange / SelfLoopError / DuplicateEdgeError /
  // NonPositiveWeightError on bad input.
  static Graph from_edge_list(const std::vector<Edge>& edges, std::int32_t n);

  std::int32_t num_vertices() const { return n_; }
  // Undirected edge count (half the stored entry count).
  std::int64_t num_edges() const {
    return static_cast<std::int64_t>(cols_.size()) / 2;
  }

  const std::vector<std::int64_t>& row_offsets() const { return offs_; }
  const std::vector<std::int32_t>& col_indices() const { return cols_; }
  const std::vector<double>& weights() const { return wts_; }

  // Weighted degree of every vertex: deg(u) = sum of incident edge weights.
  DegreeVector degree_vector() const;

  // y = A x.
  void adjacency_apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> adjacency_apply(const std::vector<double>& x) const;

  // An empty graph (n = 0) counts as connected.
  bool is_connected() const;

  // Subgraph induced by the largest connected component, plus the index map
  // sending new vertex ids to original ones.  Ties between equally sized
  // components go to the one containing the smallest original id.
  std::pair<Graph, std::vector<std::int32_t>> largest_connected_component()
      const;

  // Each undirected edge once, with u < v, ordered by (u, v).
  std::vector<Edge> to_edge_list() const;

 private:
  std::int32_t n_ = 0;
  std::vector<std::int64_t> offs_ = {0};
  std::vector<std::int32_t> cols_;
  std::vector<double> wts_;
};

// Text edge-list format: one "u v [w]" triple per line, 0-based ids, weight
// defaulting to 1.0, '#' starts a comment.  Vertex count is max id + 1 unless
// a larger `n_hint` is given.
Graph read_edge_list(std::istream& in, std::int32_t n_hint = -1);
Graph read_edge_list_file(const std::string& path, std::int32_t n_hint = -1);
void write_edge_list(const Graph& g, std::ostream& out);

}  // namespace ile
