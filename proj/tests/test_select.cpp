#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "ile/embedding.hpp"
#include "ile/rng.hpp"
#include "ile/sbm.hpp"
#include "ile/select.hpp"

using namespace ile;

TEST_CASE("scree elbow finds the gap before the jump") {
  std::vector<double> vals = {0.0, 0.1, 0.12, 2.0, 2.1, 2.2};
  CHECK(scree_elbow(vals, 6) == 3);
}

TEST_CASE("scree elbow degenerates to the first index on a line") {
  std::vector<double> line = {1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(scree_elbow(line, 5) == 1);
  std::vector<double> flat = {2.0, 2.0, 2.0, 2.0};
  CHECK(scree_elbow(flat, 4) == 1);
}

TEST_CASE("scree elbow is invariant to affine rescaling") {
  std::vector<double> vals = {0.0, 0.05, 0.4, 3.0, 3.3, 3.5, 3.6};
  std::int32_t base = scree_elbow(vals, 7);
  std::vector<double> scaled;
  for (double v : vals) scaled.push_back(3.7 * v + 11.0);
  CHECK(scree_elbow(scaled, 7) == base);
}

TEST_CASE("scree elbow respects k_max and validates input") {
  std::vector<double> vals = {0.0, 0.1, 0.12, 2.0, 2.1, 2.2};
  // plotting only the first three points hides the jump entirely
  CHECK(scree_elbow(vals, 3) == 2);

  CHECK_THROWS_AS(scree_elbow({1.0, 2.0}, 5), TooFewValues);
  CHECK_THROWS_AS(scree_elbow(vals, 2), TooFewValues);
  CHECK_THROWS_AS(scree_elbow({0.0, 1.0, 0.5, 2.0}, 4), InvalidArgument);
}

TEST_CASE("community retained spectrum has its elbow at the block count") {
  LabeledGraph lg = generate(community_preset(200, 31));
  REQUIRE(lg.graph.is_connected());
  Embedding emb = compute_ile(lg.graph, 1.0, 1.0, 8, 1e-8, 1);
  // retained eigenvalues (zero mode dropped): one community value, then the
  // bulk; the elbow sits right after the informative direction
  CHECK(scree_elbow(emb.eigenvalues, 8) == 2);
}

TEST_CASE("correlation screen is self-consistent") {
  LabeledGraph lg = generate(community_preset(120, 7));
  REQUIRE(lg.graph.is_connected());
  Embedding emb = compute_ile(lg.graph, 1.0, 1.0, 2, 1e-8, 3);
  std::vector<std::int32_t> labels;
  for (std::int64_t i = 0; i < 120; ++i) {
    labels.push_back(emb.coords(i, 0) > 0.0 ? 1 : 0);
  }
  SelectionResult r = correlation_screen(
      lg.graph, labels, {{1.0, 1.0}, {1.0, -1.0}}, 2, 3);
  CHECK(r.method == "correlation");
  REQUIRE(r.table.size() == 2);
  CHECK(r.table[0].t == 1.0);
  CHECK(r.table[0].s == 1.0);
  CHECK(r.table[0].score == 1.0);
  CHECK(r.chosen_t == 1.0);
  CHECK(r.chosen_s == 1.0);
  for (const ScoreCell& c : r.table) {
    CHECK(c.score >= 0.0);
    CHECK(c.score <= 1.0);
  }
}

TEST_CASE("correlation screen scores random labels at chance") {
  LabeledGraph lg = generate(community_preset(300, 8));
  REQUIRE(lg.graph.is_connected());
  rng::Engine eng(13);
  std::vector<std::int32_t> labels(300);
  for (auto& l : labels) l = static_cast<std::int32_t>(rng::bounded(eng, 2));
  SelectionResult r =
      correlation_screen(lg.graph, labels, {{1.0, 1.0}}, 4, 5);
  CHECK(r.table[0].score >= 0.35);
  CHECK(r.table[0].score <= 0.65);
}

TEST_CASE("the Laplacian cell dominates the screen on planted communities") {
  LabeledGraph lg = shuffle_nodes(generate(community_preset(300, 9)), 10);
  REQUIRE(lg.graph.is_connected());
  // k = 1 so each cell stands on its leading retained direction alone: the
  // Fiedler vector for (1,1) against the Perron / most-negative adjacency
  // vectors for the (0,±1) cells, which carry no block signal here.
  SelectionResult r = correlation_screen(
      lg.graph, lg.labels, {{1.0, 1.0}, {0.0, -1.0}, {0.0, 1.0}}, 1, 5);
  double laplacian = 0.0, others = 0.0;
  for (const ScoreCell& c : r.table) {
    if (c.t == 1.0 && c.s == 1.0) {
      laplacian = c.score;
    } else {
      others = std::max(others, c.score);
    }
  }
  CHECK(laplacian >= 0.95);
  CHECK(others <= 0.75);
  CHECK(laplacian > others);
  CHECK(r.chosen_t == 1.0);
  CHECK(r.chosen_s == 1.0);
}

TEST_CASE("exact score ties resolve to the lexicographically smallest cell") {
  LabeledGraph lg = generate(community_preset(80, 2));
  REQUIRE(lg.graph.is_connected());
  // (1,1) and (2,2) give identical coords, hence bit-identical scores
  SelectionResult r = correlation_screen(
      lg.graph, lg.labels, {{2.0, 2.0}, {1.0, 1.0}}, 2, 4);
  CHECK(r.table[0].score == r.table[1].score);
  CHECK(r.chosen_t == 1.0);
  CHECK(r.chosen_s == 1.0);
}

TEST_CASE("cross validation with a single cell chooses it") {
  LabeledGraph lg = generate(community_preset(100, 3));
  REQUIRE(lg.graph.is_connected());
  nn::ModelConfig cfg = nn::default_config(nn::Arch::MLP);
  cfg.epochs = 40;
  SelectionResult r = cross_validate(lg.graph, nullptr, lg.labels,
                                     {{1.0, 1.0}}, 2, 3, cfg, 21);
  CHECK(r.method == "cv");
  CHECK(r.chosen_t == 1.0);
  CHECK(r.chosen_s == 1.0);
  REQUIRE(r.table.size() == 1);
  CHECK(r.table[0].score >= 0.0);
  CHECK(r.table[0].score <= 1.0);
}

TEST_CASE("informative embeddings beat seeded noise under cross validation") {
  LabeledGraph lg = shuffle_nodes(generate(community_preset(120, 5)), 6);
  REQUIRE(lg.graph.is_connected());
  nn::ModelConfig cfg = nn::default_config(nn::Arch::MLP);
  cfg.epochs = 60;
  // The (0,0) cell solves the zero operator, whose "eigenvectors" are just
  // the seeded random orthonormal starts: pure noise columns.
  SelectionResult r = cross_validate(lg.graph, nullptr, lg.labels,
                                     {{1.0, 1.0}, {0.0, 0.0}}, 2, 3, cfg, 33);
  REQUIRE(r.table.size() == 2);
  double informative = 0.0, noise = 0.0;
  for (const ScoreCell& c : r.table) {
    if (c.t == 1.0) {
      informative = c.score;
    } else {
      noise = c.score;
    }
  }
  CHECK(informative > noise);
  CHECK(r.chosen_t == 1.0);
  CHECK(r.chosen_s == 1.0);
}

TEST_CASE("cross validation is deterministic and validates folds") {
  LabeledGraph lg = generate(community_preset(60, 4));
  REQUIRE(lg.graph.is_connected());
  nn::ModelConfig cfg = nn::default_config(nn::Arch::MLP);
  cfg.epochs = 20;
  SelectionResult a = cross_validate(lg.graph, nullptr, lg.labels,
                                     {{1.0, 1.0}, {1.0, -1.0}}, 2, 3, cfg, 12);
  SelectionResult b = cross_validate(lg.graph, nullptr, lg.labels,
                                     {{1.0, 1.0}, {1.0, -1.0}}, 2, 3, cfg, 12);
  REQUIRE(a.table.size() == b.table.size());
  for (std::size_t i = 0; i < a.table.size(); ++i) {
    CHECK(a.table[i].score == b.table[i].score);
  }
  CHECK_THROWS_AS(cross_validate(lg.graph, nullptr, lg.labels, {{1.0, 1.0}},
                                 2, 1, cfg, 0),
                  InvalidArgument);
}
