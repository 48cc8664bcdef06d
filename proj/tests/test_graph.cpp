#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <vector>

#include "ile/graph.hpp"
#include "ile/rng.hpp"

using namespace ile;

namespace {

Graph path3() {
  return Graph::from_edge_list({{0, 1, 1.0}, {1, 2, 1.0}}, 3);
}

Graph random_graph(std::int32_t n, double p, rng::Engine& eng,
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

}  // namespace

TEST_CASE("degree vector on known graphs") {
  Graph p3 = path3();
  CHECK(p3.degree_vector() == DegreeVector{1.0, 2.0, 1.0});
  CHECK(p3.num_vertices() == 3);
  CHECK(p3.num_edges() == 2);

  Graph k2 = Graph::from_edge_list({{0, 1, 2.5}}, 2);
  CHECK(k2.degree_vector() == DegreeVector{2.5, 2.5});
}

TEST_CASE("construction validates input") {
  CHECK_THROWS_AS(Graph::from_edge_list({{0, 0, 1.0}}, 2), SelfLoopError);
  CHECK_THROWS_AS(Graph::from_edge_list({{0, 3, 1.0}}, 3), IndexOutOfRange);
  CHECK_THROWS_AS(Graph::from_edge_list({{-1, 1, 1.0}}, 3), IndexOutOfRange);
  CHECK_THROWS_AS(Graph::from_edge_list({{0, 1, 0.0}}, 2),
                  NonPositiveWeightError);
  CHECK_THROWS_AS(Graph::from_edge_list({{0, 1, -0.5}}, 2),
                  NonPositiveWeightError);
  // duplicate in either orientation
  CHECK_THROWS_AS(Graph::from_edge_list({{0, 1, 1.0}, {1, 0, 2.0}}, 2),
                  DuplicateEdgeError);
  CHECK_THROWS_AS(Graph::from_edge_list({{0, 1, 1.0}, {0, 1, 1.0}}, 2),
                  DuplicateEdgeError);
}

TEST_CASE("csr layout is symmetric, sorted, and self-consistent") {
  rng::Engine eng(3);
  Graph g = random_graph(40, 0.2, eng);
  const auto& offs = g.row_offsets();
  const auto& cols = g.col_indices();
  CHECK(offs.size() == 41);
  CHECK(offs.back() == static_cast<std::int64_t>(cols.size()));
  CHECK(static_cast<std::int64_t>(cols.size()) == 2 * g.num_edges());
  for (std::int32_t u = 0; u < 40; ++u) {
    for (std::int64_t p = offs[u]; p < offs[u + 1]; ++p) {
      if (p > offs[u]) CHECK(cols[p] > cols[p - 1]);  // sorted, no dupes
      CHECK(cols[p] != u);
    }
  }
  // symmetry: weight of (u,v) equals weight of (v,u)
  for (const Edge& e : g.to_edge_list()) {
    bool found = false;
    for (std::int64_t p = offs[e.v]; p < offs[e.v + 1]; ++p) {
      if (cols[p] == e.u) {
        CHECK(g.weights()[p] == e.w);
        found = true;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("adjacency_apply recovers rows of A on indicator vectors") {
  rng::Engine eng(11);
  Graph g = random_graph(25, 0.3, eng);
  const auto& offs = g.row_offsets();
  const auto& cols = g.col_indices();
  const auto& wts = g.weights();
  for (std::int32_t j = 0; j < 25; ++j) {
    std::vector<double> e(25, 0.0);
    e[j] = 1.0;
    auto col = g.adjacency_apply(e);  // A e_j = column j = row j (symmetric)
    std::vector<double> expect(25, 0.0);
    for (std::int64_t p = offs[j]; p < offs[j + 1]; ++p) {
      expect[cols[p]] = wts[p];
    }
    CHECK(col == expect);
  }

  std::vector<double> wrong(24, 0.0), out(25);
  CHECK_THROWS_AS(
      g.adjacency_apply(std::span<const double>(wrong), std::span<double>(out)),
      DimensionMismatch);
}

TEST_CASE("connectivity and largest component") {
  CHECK(Graph::from_edge_list({}, 0).is_connected());  // vacuous
  CHECK(Graph::from_edge_list({}, 1).is_connected());
  CHECK_FALSE(Graph::from_edge_list({}, 2).is_connected());
  CHECK(path3().is_connected());

  // components {0,1,2} (triangle) and {3,4}
  Graph g = Graph::from_edge_list(
      {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}, {3, 4, 0.5}}, 5);
  CHECK_FALSE(g.is_connected());
  auto [lcc, index_map] = g.largest_connected_component();
  CHECK(lcc.num_vertices() == 3);
  CHECK(lcc.num_edges() == 3);
  CHECK(index_map == std::vector<std::int32_t>{0, 1, 2});
  CHECK(lcc.is_connected());

  // tie between {0,1} and {2,3}: keep the one with the smallest vertex id
  Graph tie = Graph::from_edge_list({{2, 3, 1.0}, {0, 1, 1.0}}, 4);
  auto [lcc2, map2] = tie.largest_connected_component();
  CHECK(map2 == std::vector<std::int32_t>{0, 1});

  CHECK_THROWS_AS(Graph::from_edge_list({}, 0).largest_connected_component(),
                  EmptyGraphError);
}

TEST_CASE("edge list round trips through construction") {
  rng::Engine eng(17);
  Graph g = random_graph(30, 0.25, eng);
  auto edges = g.to_edge_list();
  Graph h = Graph::from_edge_list(edges, 30);
  CHECK(h.row_offsets() == g.row_offsets());
  CHECK(h.col_indices() == g.col_indices());
  CHECK(h.weights() == g.weights());
}

TEST_CASE("text format round trips bit-exactly") {
  rng::Engine eng(23);
  Graph g = random_graph(20, 0.3, eng);
  std::ostringstream out;
  write_edge_list(g, out);
  std::istringstream in(out.str());
  Graph h = read_edge_list(in);
  CHECK(h.num_vertices() == 20);
  CHECK(h.col_indices() == g.col_indices());
  CHECK(h.weights() == g.weights());  // shortest-round-trip formatting
}

TEST_CASE("text format parsing") {
  std::istringstream ok("# comment\n0 1\n1 2 0.5  # trailing comment\n\n");
  Graph g = read_edge_list(ok);
  CHECK(g.num_vertices() == 3);
  CHECK(g.degree_vector() == DegreeVector{1.0, 1.5, 0.5});

  std::istringstream missing("0\n");
  CHECK_THROWS_AS(read_edge_list(missing), ParseError);
  std::istringstream junk("0 1 abc\n");
  CHECK_THROWS_AS(read_edge_list(junk), ParseError);
  std::istringstream extra("0 1 1.0 9\n");
  CHECK_THROWS_AS(read_edge_list(extra), ParseError);

  // n_hint allows trailing isolated vertices
  std::istringstream hinted("0 1\n");
  CHECK(read_edge_list(hinted, 5).num_vertices() == 5);

  try {
    std::istringstream bad("0 1\nx y\n");
    read_edge_list(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}
