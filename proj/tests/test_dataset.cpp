#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "ile/dataset.hpp"

using namespace ile;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("ile_dataset_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) const {
    std::string p = (path / name).string();
    std::ofstream f(p);
    f << content;
    return p;
  }
};

}  // namespace

TEST_CASE("loading a connected graph with labels and features") {
  TempDir tmp;
  // P4 with one weighted edge.
  std::string edges = tmp.file("g.txt",
                               "# comment\n"
                               "0 1\n"
                               "1 2 2.5\n"
                               "2 3\n");
  std::string labels = tmp.file("g.labels",
                                "node,label\n"
                                "0,4\n"
                                "1,2\n"
                                "2,4\n"
                                "3,2\n");
  std::string feats = tmp.file("g.features",
                               "1.5,2\n"
                               "0,0.25\n"
                               "-1,3\n"
                               "4,-0.5\n");
  Dataset d = load_dataset(edges, feats, labels, "toy");
  CHECK(d.name == "toy");
  CHECK(d.graph.num_vertices() == 4);
  CHECK(d.graph.num_edges() == 3);
  // raw labels {4,2,4,2}: unique sorted (2,4) compact to (0,1)
  CHECK(d.labels == std::vector<std::int32_t>{1, 0, 1, 0});
  REQUIRE(d.features.has_value());
  CHECK(d.features->rows == 4);
  CHECK(d.features->cols == 2);
  CHECK((*d.features)(1, 1) == 0.25);
  CHECK((*d.features)(3, 0) == 4.0);
  // connected graph: identity index map
  CHECK(d.index_map == std::vector<std::int32_t>{0, 1, 2, 3});
}

TEST_CASE("disconnected input is cut to the largest component and re-indexed") {
  TempDir tmp;
  // K3 on {0,1,2} plus a lone edge {3,4}: the triangle is kept.
  std::string edges = tmp.file("g.txt",
                               "0 1\n0 2\n1 2\n"
                               "3 4\n");
  std::string labels = tmp.file("g.labels",
                                "0,7\n"
                                "1,5\n"
                                "2,7\n"
                                "3,9\n"
                                "4,9\n");
  std::string feats = tmp.file("g.features",
                               "10,1\n"
                               "20,2\n"
                               "30,3\n"
                               "40,4\n"
                               "50,5\n");
  Dataset d = load_dataset(edges, feats, labels);
  CHECK(d.graph.num_vertices() == 3);
  CHECK(d.graph.num_edges() == 3);
  CHECK(d.index_map == std::vector<std::int32_t>{0, 1, 2});
  // kept raw labels {7,5,7} -> compacted over (5,7) -> {1,0,1}
  CHECK(d.labels == std::vector<std::int32_t>{1, 0, 1});
  REQUIRE(d.features.has_value());
  CHECK(d.features->rows == 3);
  CHECK((*d.features)(0, 0) == 10.0);
  CHECK((*d.features)(2, 1) == 3.0);
}

TEST_CASE("dataset without features or labels") {
  TempDir tmp;
  std::string edges = tmp.file("bare.txt", "0 1\n1 2\n");
  Dataset d = load_dataset(edges);
  CHECK(d.graph.num_vertices() == 3);
  CHECK_FALSE(d.features.has_value());
  CHECK(d.labels.empty());
  CHECK(d.name == "bare");  // derived from the file stem
}

TEST_CASE("loader error paths") {
  TempDir tmp;
  std::string good = tmp.file("g.txt", "0 1\n1 2\n");

  // non-integer edge endpoint, with the line number carried
  std::string bad_edges = tmp.file("bad.txt", "0 1\na b\n");
  try {
    load_dataset(bad_edges);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }

  // feature row count must match the raw graph
  std::string short_feats = tmp.file("short.features", "1,2\n3,4\n");
  CHECK_THROWS_AS(load_dataset(good, short_feats), DimensionMismatch);

  // ragged feature rows
  std::string ragged = tmp.file("ragged.features", "1,2\n3\n4,5\n");
  try {
    load_dataset(good, ragged);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }

  // non-numeric feature entry
  std::string junk = tmp.file("junk.features", "1,2\n3,x\n5,6\n");
  CHECK_THROWS_AS(load_dataset(good, junk), ParseError);

  // a kept node without a label
  std::string missing = tmp.file("missing.labels", "0,1\n2,0\n");
  CHECK_THROWS_AS(load_dataset(good, "", missing), MissingLabelsError);

  // duplicate label assignment
  std::string dup = tmp.file("dup.labels", "0,1\n0,2\n1,0\n2,0\n");
  CHECK_THROWS_AS(load_dataset(good, "", dup), ParseError);

  // label for a node outside the graph
  std::string oob = tmp.file("oob.labels", "0,1\n1,0\n2,0\n9,1\n");
  CHECK_THROWS_AS(load_dataset(good, "", oob), ParseError);

  CHECK_THROWS_AS(load_dataset((tmp.path / "nope.txt").string()), IoError);
}

TEST_CASE("degree labels: star, regular, and counting") {
  std::vector<Edge> star;
  for (std::int32_t leaf = 1; leaf <= 9; ++leaf) star.push_back({0, leaf, 1.0});
  Graph s = Graph::from_edge_list(star, 10);
  auto ls = degree_labels(s, 0.2);  // ceil(2) = 2: hub plus lowest-index leaf
  CHECK(ls == std::vector<std::int32_t>{1, 1, 0, 0, 0, 0, 0, 0, 0, 0});

  // C6 is 2-regular: pure tie-break keeps the two lowest indices
  Graph c6 = Graph::from_edge_list(
      {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 4, 1}, {4, 5, 1}, {0, 5, 1}}, 6);
  auto lc = degree_labels(c6, 0.2);  // ceil(1.2) = 2
  CHECK(lc == std::vector<std::int32_t>{1, 1, 0, 0, 0, 0});

  // exactly ceil(f n) ones on an arbitrary graph
  auto lp = degree_labels(s, 0.31);  // ceil(3.1) = 4
  int ones = 0;
  for (auto l : lp) ones += l;
  CHECK(ones == 4);

  CHECK_THROWS_AS(degree_labels(s, 0.0), InvalidFraction);
  CHECK_THROWS_AS(degree_labels(s, 1.0), InvalidFraction);
  CHECK_THROWS_AS(degree_labels(s, -0.3), InvalidFraction);
}

TEST_CASE("feature corruption moments and row accounting") {
  const std::int32_t n = 200, dim = 5;
  Mat x(n, dim);
  for (std::size_t i = 0; i < x.a.size(); ++i) {
    x.a[i] = static_cast<double>(i % 17) * 0.3;
  }

  Mat same = corrupt_features(x, 0.0, 1.0, 11);
  CHECK(same.a == x.a);
  Mat same2 = corrupt_features(x, 1.0, 0.0, 11);
  CHECK(same2.a == x.a);

  Mat y = corrupt_features(x, 0.5, 1.0, 11);
  int changed = 0;
  double sum = 0.0, sumsq = 0.0;
  for (std::int32_t i = 0; i < n; ++i) {
    bool diff = false;
    for (std::int32_t j = 0; j < dim; ++j) {
      if (y(i, j) != x(i, j)) diff = true;
    }
    if (diff) {
      ++changed;
      for (std::int32_t j = 0; j < dim; ++j) {
        double delta = y(i, j) - x(i, j);
        sum += delta;
        sumsq += delta * delta;
      }
    }
  }
  CHECK(changed == 100);
  double mean = sum / (100.0 * dim);
  double var = sumsq / (100.0 * dim) - mean * mean;
  CHECK(std::fabs(mean) <= 0.2);
  CHECK(var >= 0.7);
  CHECK(var <= 1.3);

  // sigma scales the variance
  Mat y2 = corrupt_features(x, 0.5, 2.0, 11);
  double sumsq2 = 0.0;
  for (std::size_t i = 0; i < x.a.size(); ++i) {
    double delta = y2.a[i] - x.a[i];
    sumsq2 += delta * delta;
  }
  CHECK(sumsq2 / (100.0 * dim) / 4.0 >= 0.7);
  CHECK(sumsq2 / (100.0 * dim) / 4.0 <= 1.3);

  // deterministic per seed
  Mat z = corrupt_features(x, 0.5, 1.0, 11);
  CHECK(z.a == y.a);

  CHECK_THROWS_AS(corrupt_features(x, -0.1, 1.0, 0), InvalidRatio);
  CHECK_THROWS_AS(corrupt_features(x, 1.1, 1.0, 0), InvalidRatio);
  CHECK_THROWS_AS(corrupt_features(x, 0.5, -1.0, 0), InvalidArgument);
}

TEST_CASE("70/30 split sizes, disjointness, determinism") {
  Split s10 = split_70_30(10, 3);
  CHECK(s10.train_idx.size() == 7);
  CHECK(s10.test_idx.size() == 3);
  CHECK(s10.seed == 3);

  Split s183 = split_70_30(183, 0);
  CHECK(s183.train_idx.size() == 128);
  CHECK(s183.test_idx.size() == 55);

  std::set<std::int32_t> seen;
  for (auto i : s183.train_idx) seen.insert(i);
  for (auto i : s183.test_idx) seen.insert(i);
  CHECK(seen.size() == 183);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 182);

  Split again = split_70_30(183, 0);
  CHECK(again.train_idx == s183.train_idx);
  CHECK(again.test_idx == s183.test_idx);
  Split other = split_70_30(183, 1);
  CHECK(other.train_idx != s183.train_idx);

  CHECK_THROWS_AS(split_70_30(1, 0), TooSmallError);
  CHECK_THROWS_AS(split_70_30(0, 0), TooSmallError);
}

TEST_CASE("graph and labels round-trip through the writers") {
  TempDir tmp;
  std::string edges = tmp.file("g.txt", "0 1 0.125\n1 2 2\n0 2 1\n2 3 0.7\n");
  std::string labels = tmp.file("g.labels", "0,0\n1,1\n2,0\n3,1\n");
  Dataset d = load_dataset(edges, "", labels);

  std::string edges2 = (tmp.path / "out.txt").string();
  std::string labels2 = (tmp.path / "out.labels").string();
  write_edge_list_file(d.graph, edges2);
  write_labels_csv_file(d.labels, labels2);

  Dataset d2 = load_dataset(edges2, "", labels2);
  CHECK(d2.labels == d.labels);
  auto e1 = d.graph.to_edge_list();
  auto e2 = d2.graph.to_edge_list();
  REQUIRE(e1.size() == e2.size());
  for (std::size_t i = 0; i < e1.size(); ++i) {
    CHECK(e1[i].u == e2[i].u);
    CHECK(e1[i].v == e2[i].v);
    CHECK(e1[i].w == e2[i].w);  // bit-exact via shortest round-trip format
  }
}
