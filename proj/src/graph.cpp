#include "ile/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

namespace ile {

Graph Graph::from_edge_list(const std::vector<Edge>& edges, std::int32_t n) {
  if (n < 0) throw InvalidArgument("vertex count must be nonnegative");
  for (const Edge& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
      throw IndexOutOfRange("edge (" + std::to_string(e.u) + ", " +
                            std::to_string(e.v) + ") out of range for n = " +
                            std::to_string(n));
    }
    if (e.u == e.v) {
      throw SelfLoopError("self loop at vertex " + std::to_string(e.u));
    }
    if (!(e.w > 0.0) || !std::isfinite(e.w)) {
      throw NonPositiveWeightError("edge (" + std::to_string(e.u) + ", " +
                                   std::to_string(e.v) +
                                   ") has non-positive weight");
    }
  }

  Graph g;
  g.n_ = n;
  g.offs_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const Edge& e : edges) {
    g.offs_[static_cast<std::size_t>(e.u) + 1]++;
    g.offs_[static_cast<std::size_t>(e.v) + 1]++;
  }
  for (std::size_t i = 1; i < g.offs_.size(); ++i) g.offs_[i] += g.offs_[i - 1];
  g.cols_.resize(edges.size() * 2);
  g.wts_.resize(edges.size() * 2);
  std::vector<std::int64_t> cursor(g.offs_.begin(), g.offs_.end() - 1);
  for (const Edge& e : edges) {
    std::int64_t pu = cursor[static_cast<std::size_t>(e.u)]++;
    std::int64_t pv = cursor[static_cast<std::size_t>(e.v)]++;
    g.cols_[static_cast<std::size_t>(pu)] = e.v;
    g.wts_[static_cast<std::size_t>(pu)] = e.w;
    g.cols_[static_cast<std::size_t>(pv)] = e.u;
    g.wts_[static_cast<std::size_t>(pv)] = e.w;
  }

  // Sort each neighbor list by vertex id, then detect duplicates as adjacent
  // equal ids.
  for (std::int32_t u = 0; u < n; ++u) {
    std::int64_t lo = g.offs_[static_cast<std::size_t>(u)];
    std::int64_t hi = g.offs_[static_cast<std::size_t>(u) + 1];
    std::vector<std::pair<std::int32_t, double>> row;
    row.reserve(static_cast<std::size_t>(hi - lo));
    for (std::int64_t p = lo; p < hi; ++p) {
      row.emplace_back(g.cols_[static_cast<std::size_t>(p)],
                       g.wts_[static_cast<std::size_t>(p)]);
    }
    std::sort(row.begin(), row.end());
    for (std::size_t i = 1; i < row.size(); ++i) {
      if (row[i].first == row[i - 1].first) {
        throw DuplicateEdgeError("duplicate edge (" + std::to_string(u) +
                                 ", " + std::to_string(row[i].first) + ")");
      }
    }
    for (std::int64_t p = lo; p < hi; ++p) {
      g.cols_[static_cast<std::size_t>(p)] =
          row[static_cast<std::size_t>(p - lo)].first;
      g.wts_[static_cast<std::size_t>(p)] =
          row[static_cast<std::size_t>(p - lo)].second;
    }
  }
  return g;
}

DegreeVector Graph::degree_vector() const {
  DegreeVector deg(static_cast<std::size_t>(n_), 0.0);
  for (std::int32_t u = 0; u < n_; ++u) {
    double d = 0.0;
    for (std::int64_t p = offs_[static_cast<std::size_t>(u)];
         p < offs_[static_cast<std::size_t>(u) + 1]; ++p) {
      d += wts_[static_cast<std::size_t>(p)];
    }
    deg[static_cast<std::size_t>(u)] = d;
  }
  return deg;
}

void Graph::adjacency_apply(std::span<const double> x,
                            std::span<double> y) const {
  if (x.size() != static_cast<std::size_t>(n_) || y.size() != x.size()) {
    throw DimensionMismatch("adjacency_apply: vector length != vertex count");
  }
  for (std::int32_t u = 0; u < n_; ++u) {
    double acc = 0.0;
    for (std::int64_t p = offs_[static_cast<std::size_t>(u)];
         p < offs_[static_cast<std::size_t>(u) + 1]; ++p) {
      acc += wts_[static_cast<std::size_t>(p)] *
             x[static_cast<std::size_t>(cols_[static_cast<std::size_t>(p)])];
    }
    y[static_cast<std::size_t>(u)] = acc;
  }
}

std::vector<double> Graph::adjacency_apply(const std::vector<double>& x) const {
  std::vector<double> y(x.size());
  adjacency_apply(std::span<const double>(x), std::span<double>(y));
  return y;
}

namespace {

// BFS labelling of connected components; returns component id per vertex and
// the number of components.  Vertices are visited in increasing id order, so
// component ids increase with the smallest vertex id they contain.
std::pair<std::vector<std::int32_t>, std::int32_t> components_of(
    const Graph& g) {
  std::int32_t n = g.num_vertices();
  std::vector<std::int32_t> comp(static_cast<std::size_t>(n), -1);
  std::int32_t num = 0;
  std::vector<std::int32_t> queue;
  const auto& offs = g.row_offsets();
  const auto& cols = g.col_indices();
  for (std::int32_t start = 0; start < n; ++start) {
    if (comp[static_cast<std::size_t>(start)] != -1) continue;
    comp[static_cast<std::size_t>(start)] = num;
    queue.assign(1, start);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      std::int32_t u = queue[head];
      for (std::int64_t p = offs[static_cast<std::size_t>(u)];
           p < offs[static_cast<std::size_t>(u) + 1]; ++p) {
        std::int32_t v = cols[static_cast<std::size_t>(p)];
        if (comp[static_cast<std::size_t>(v)] == -1) {
          comp[static_cast<std::size_t>(v)] = num;
          queue.push_back(v);
        }
      }
    }
    ++num;
  }
  return {std::move(comp), num};
}

}  // namespace

bool Graph::is_connected() const {
  if (n_ == 0) return true;
  auto [comp, num] = components_of(*this);
  return num == 1;
}

std::pair<Graph, std::vector<std::int32_t>> Graph::largest_connected_component()
    const {
  if (n_ == 0) throw EmptyGraphError("largest_connected_component: n = 0");
  auto [comp, num] = components_of(*this);
  std::vector<std::int64_t> size(static_cast<std::size_t>(num), 0);
  for (std::int32_t c : comp) size[static_cast<std::size_t>(c)]++;
  // First maximum wins: component ids increase with their smallest vertex.
  std::int32_t best = 0;
  for (std::int32_t c = 1; c < num; ++c) {
    if (size[static_cast<std::size_t>(c)] >
        size[static_cast<std::size_t>(best)]) {
      best = c;
    }
  }
  std::vector<std::int32_t> index_map;  // new -> old, ascending old ids
  std::vector<std::int32_t> old_to_new(static_cast<std::size_t>(n_), -1);
  for (std::int32_t u = 0; u < n_; ++u) {
    if (comp[static_cast<std::size_t>(u)] == best) {
      old_to_new[static_cast<std::size_t>(u)] =
          static_cast<std::int32_t>(index_map.size());
      index_map.push_back(u);
    }
  }
  std::vector<Edge> edges;
  for (const Edge& e : to_edge_list()) {
    if (old_to_new[static_cast<std::size_t>(e.u)] != -1 &&
        old_to_new[static_cast<std::size_t>(e.v)] != -1) {
      edges.push_back({old_to_new[static_cast<std::size_t>(e.u)],
                       old_to_new[static_cast<std::size_t>(e.v)], e.w});
    }
  }
  Graph sub = from_edge_list(
      edges, static_cast<std::int32_t>(index_map.size()));
  return {std::move(sub), std::move(index_map)};
}

std::vector<Edge> Graph::to_edge_list() const {
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(num_edges()));
  for (std::int32_t u = 0; u < n_; ++u) {
    for (std::int64_t p = offs_[static_cast<std::size_t>(u)];
         p < offs_[static_cast<std::size_t>(u) + 1]; ++p) {
      std::int32_t v = cols_[static_cast<std::size_t>(p)];
      if (v > u) edges.push_back({u, v, wts_[static_cast<std::size_t>(p)]});
    }
  }
  return edges;
}

Graph read_edge_list(std::istream& in, std::int32_t n_hint) {
  std::vector<Edge> edges;
  std::int32_t max_id = -1;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    std::istringstream ls(line);
    long long u, v;
    if (!(ls >> u)) {
      std::istringstream probe(line);
      std::string tok;
      if (probe >> tok) throw ParseError("expected 'u v [w]'", line_no);
      continue;  // blank or comment-only line
    }
    if (!(ls >> v)) throw ParseError("expected 'u v [w]'", line_no);
    double w = 1.0;
    if (ls >> w) {
      std::string rest;
      if (ls >> rest) throw ParseError("trailing tokens after 'u v w'", line_no);
    } else if (!ls.eof()) {
      throw ParseError("bad weight field", line_no);
    }
    if (u < 0 || v < 0 || u > INT32_MAX || v > INT32_MAX) {
      throw ParseError("vertex id out of range", line_no);
    }
    edges.push_back({static_cast<std::int32_t>(u),
                     static_cast<std::int32_t>(v), w});
    max_id = std::max({max_id, static_cast<std::int32_t>(u),
                       static_cast<std::int32_t>(v)});
  }
  std::int32_t n = std::max(max_id + 1, n_hint < 0 ? 0 : n_hint);
  return Graph::from_edge_list(edges, n);
}

Graph read_edge_list_file(const std::string& path, std::int32_t n_hint) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open edge list file: " + path);
  return read_edge_list(f, n_hint);
}

void write_edge_list(const Graph& g, std::ostream& out) {
  char buf[64];
  for (const Edge& e : g.to_edge_list()) {
    out << e.u << ' ' << e.v;
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), e.w);
    out << ' ' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    out << '\n';
  }
}

}  // namespace ile
