#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "ile/sbm.hpp"

using namespace ile;

namespace {

Mat prob2(double aa, double ab, double bb) {
  Mat p(2, 2);
  p(0, 0) = aa;
  p(0, 1) = ab;
  p(1, 0) = ab;
  p(1, 1) = bb;
  return p;
}

std::set<std::pair<std::int32_t, std::int32_t>> edge_set(const Graph& g) {
  std::set<std::pair<std::int32_t, std::int32_t>> s;
  for (const Edge& e : g.to_edge_list()) {
    s.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
  }
  return s;
}

}  // namespace

TEST_CASE("all-zero probabilities give the empty graph") {
  SbmSpec spec{{4, 4}, prob2(0.0, 0.0, 0.0), 3};
  LabeledGraph lg = generate(spec);
  CHECK(lg.graph.num_vertices() == 8);
  CHECK(lg.graph.num_edges() == 0);
  REQUIRE(lg.labels.size() == 8);
  for (int u = 0; u < 4; ++u) CHECK(lg.labels[u] == 0);
  for (int u = 4; u < 8; ++u) CHECK(lg.labels[u] == 1);
}

TEST_CASE("all-one probabilities give the complete graph") {
  SbmSpec spec{{3, 3}, prob2(1.0, 1.0, 1.0), 9};
  LabeledGraph lg = generate(spec);
  CHECK(lg.graph.num_vertices() == 6);
  CHECK(lg.graph.num_edges() == 15);  // C(6,2)
  for (const Edge& e : lg.graph.to_edge_list()) CHECK(e.w == 1.0);
}

TEST_CASE("presets carry the published parameters") {
  SbmSpec cp = core_periphery_preset(1000, 7);
  REQUIRE(cp.block_sizes == std::vector<std::int32_t>{500, 500});
  CHECK(cp.probabilities(0, 0) == 0.9);
  CHECK(cp.probabilities(0, 1) == 0.5);
  CHECK(cp.probabilities(1, 0) == 0.5);
  CHECK(cp.probabilities(1, 1) == 0.1);
  CHECK(cp.seed == 7);

  SbmSpec small = core_periphery_preset(40, 0);
  CHECK(small.block_sizes == std::vector<std::int32_t>{20, 20});
  CHECK(small.probabilities(0, 0) == 0.9);

  SbmSpec cm = community_preset(1000, 2);
  CHECK(cm.block_sizes == std::vector<std::int32_t>{500, 500});
  CHECK(cm.probabilities(0, 0) == 0.99);
  CHECK(cm.probabilities(0, 1) == 0.3);
  CHECK(cm.probabilities(1, 1) == 0.99);

  CHECK_THROWS_AS(core_periphery_preset(7, 0), OddN);
  CHECK_THROWS_AS(community_preset(7, 0), OddN);
}

TEST_CASE("community draw at n=200 concentrates near the block densities") {
  LabeledGraph lg = generate(community_preset(200, 0));
  REQUIRE(lg.graph.num_vertices() == 200);

  std::int64_t within = 0, cross = 0;
  for (const Edge& e : lg.graph.to_edge_list()) {
    if (lg.labels[static_cast<std::size_t>(e.u)] ==
        lg.labels[static_cast<std::size_t>(e.v)]) {
      ++within;
    } else {
      ++cross;
    }
  }
  // 100 nodes/block: within pairs = 2 * C(100,2), cross pairs = 100 * 100.
  double within_density = static_cast<double>(within) / (2.0 * 4950.0);
  double cross_density = static_cast<double>(cross) / 10000.0;
  CHECK(within_density >= 0.95);
  CHECK(within_density <= 1.0);
  CHECK(cross_density >= 0.2);
  CHECK(cross_density <= 0.4);

  // Expected degree ~ 0.99*99 + 0.3*100 = 128; allow +-4 binomial sigmas.
  double mean_degree =
      2.0 * static_cast<double>(lg.graph.num_edges()) / 200.0;
  CHECK(mean_degree >= 118.0);
  CHECK(mean_degree <= 138.0);
}

TEST_CASE("identical spec reproduces the edge set; other seeds differ") {
  SbmSpec spec = community_preset(60, 12345);
  LabeledGraph a = generate(spec);
  LabeledGraph b = generate(spec);
  CHECK(edge_set(a.graph) == edge_set(b.graph));
  CHECK(a.labels == b.labels);

  SbmSpec other = community_preset(60, 12346);
  LabeledGraph c = generate(other);
  CHECK(edge_set(a.graph) != edge_set(c.graph));
}

TEST_CASE("labels partition nodes exactly by contiguous block") {
  SbmSpec spec{{2, 3, 4}, Mat(3, 3), 0};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) spec.probabilities(i, j) = 0.5;
  LabeledGraph lg = generate(spec);
  std::vector<std::int32_t> want = {0, 0, 1, 1, 1, 2, 2, 2, 2};
  CHECK(lg.labels == want);
  CHECK(lg.meta.find("seed") != std::string::npos);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(generate(SbmSpec{{}, Mat(0, 0), 0}), EmptyBlocks);
  CHECK_THROWS_AS(generate(SbmSpec{{3, 0}, prob2(0.5, 0.5, 0.5), 0}),
                  EmptyBlocks);

  // entries outside [0,1]
  CHECK_THROWS_AS(generate(SbmSpec{{2, 2}, prob2(0.5, 1.5, 0.5), 0}),
                  InvalidProbability);
  CHECK_THROWS_AS(generate(SbmSpec{{2, 2}, prob2(-0.1, 0.5, 0.5), 0}),
                  InvalidProbability);
  CHECK_THROWS_AS(
      generate(SbmSpec{{2, 2}, prob2(0.5, std::nan(""), 0.5), 0}),
      InvalidProbability);

  // asymmetric matrix
  Mat asym(2, 2);
  asym(0, 0) = 0.5;
  asym(0, 1) = 0.4;
  asym(1, 0) = 0.6;
  asym(1, 1) = 0.5;
  CHECK_THROWS_AS(generate(SbmSpec{{2, 2}, asym, 0}), InvalidProbability);

  // shape does not match the block count
  CHECK_THROWS_AS(generate(SbmSpec{{2, 2, 2}, prob2(0.5, 0.5, 0.5), 0}),
                  InvalidProbability);
}

TEST_CASE("shuffle_nodes relabels consistently and deterministically") {
  LabeledGraph lg = generate(community_preset(40, 5));
  std::vector<std::int32_t> perm;
  LabeledGraph sh = shuffle_nodes(lg, 99, &perm);

  REQUIRE(perm.size() == 40);
  std::vector<std::int32_t> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (std::int32_t i = 0; i < 40; ++i) CHECK(sorted[i] == i);

  // edges and labels follow the permutation exactly
  std::set<std::pair<std::int32_t, std::int32_t>> mapped;
  for (const Edge& e : lg.graph.to_edge_list()) {
    std::int32_t u = perm[static_cast<std::size_t>(e.u)];
    std::int32_t v = perm[static_cast<std::size_t>(e.v)];
    mapped.insert({std::min(u, v), std::max(u, v)});
  }
  CHECK(mapped == edge_set(sh.graph));
  for (std::int32_t u = 0; u < 40; ++u) {
    CHECK(sh.labels[static_cast<std::size_t>(perm[static_cast<std::size_t>(
              u)])] == lg.labels[static_cast<std::size_t>(u)]);
  }

  // deterministic and seed-sensitive
  LabeledGraph sh2 = shuffle_nodes(lg, 99, nullptr);
  CHECK(edge_set(sh.graph) == edge_set(sh2.graph));
  CHECK(sh.labels == sh2.labels);
  LabeledGraph sh3 = shuffle_nodes(lg, 100, nullptr);
  CHECK(sh.labels != sh3.labels);

  CHECK(sh.meta.find("shuffle") != std::string::npos);
}
