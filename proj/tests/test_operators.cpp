#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ile/operators.hpp"
#include "testutil.hpp"

using namespace ile;
using testutil::dense_from_operator;
using testutil::dense_matvec;
using testutil::random_graph;
using testutil::random_vec;

namespace {
Graph path3() {
  return Graph::from_edge_list({{0, 1, 1.0}, {1, 2, 1.0}}, 3);
}
}  // namespace

TEST_CASE("special parameter choices recover the classic matrices") {
  rng::Engine eng(5);
  Graph g = random_graph(18, 0.3, eng);
  auto deg = g.degree_vector();

  // (1,1) -> D - A, (0,-1) -> A, (1,-1) -> D + A
  Mat lap = dense_from_operator(InterpolatedOperator(g, 1.0, 1.0));
  Mat adj = dense_from_operator(InterpolatedOperator(g, 0.0, -1.0));
  Mat sgn = dense_from_operator(InterpolatedOperator(g, 1.0, -1.0));
  for (std::int32_t i = 0; i < 18; ++i) {
    for (std::int32_t j = 0; j < 18; ++j) {
      double a_ij = adj(i, j);
      double d_ij = (i == j) ? deg[i] : 0.0;
      CHECK(lap(i, j) == doctest::Approx(d_ij - a_ij).epsilon(1e-14));
      CHECK(sgn(i, j) == doctest::Approx(d_ij + a_ij).epsilon(1e-14));
    }
  }
  // Laplacian rows sum to zero (up to rounding in the weighted degrees)
  for (std::int32_t i = 0; i < 18; ++i) {
    double row = 0.0;
    for (std::int32_t j = 0; j < 18; ++j) row += lap(i, j);
    CHECK(std::fabs(row) <= 1e-12);
  }
}

TEST_CASE("apply matches the dense materialization") {
  rng::Engine eng(31);
  for (int rep = 0; rep < 10; ++rep) {
    std::int32_t n = 5 + static_cast<std::int32_t>(rng::bounded(eng, 30));
    Graph g = random_graph(n, 0.35, eng);
    double t = rng::uniform(eng, -2.0, 2.0);
    double s = rng::uniform(eng, -2.0, 2.0);
    InterpolatedOperator op(g, t, s);
    Mat dense = dense_from_operator(op);
    auto x = random_vec(static_cast<std::size_t>(n), eng);
    auto y = op.apply(x);
    auto expect = dense_matvec(dense, x);
    for (std::int32_t i = 0; i < n; ++i) {
      CHECK(y[i] == doctest::Approx(expect[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("path graph Laplacian acts as frozen reference") {
  // L(P3) = [[1,-1,0],[-1,2,-1],[0,-1,1]]; L*(1,2,3) = (-1,0,1)
  Graph g = path3();
  InterpolatedOperator op(g, 1.0, 1.0);
  auto y = op.apply({1.0, 2.0, 3.0});
  CHECK(y[0] == doctest::Approx(-1.0));
  CHECK(y[1] == doctest::Approx(0.0));
  CHECK(y[2] == doctest::Approx(1.0));

  // eigenvectors of L(P3): (1,0,-1) with eigenvalue 1, (1,-2,1) with 3
  CHECK(op.rayleigh_quotient(std::vector<double>{1.0, 0.0, -1.0}) ==
        doctest::Approx(1.0));
  CHECK(op.rayleigh_quotient(std::vector<double>{1.0, -2.0, 1.0}) ==
        doctest::Approx(3.0));
  // constant vector is the kernel
  CHECK(op.rayleigh_quotient(std::vector<double>{1.0, 1.0, 1.0}) ==
        doctest::Approx(0.0));
}

TEST_CASE("edge-sum quadratic form equals <x, M x>") {
  rng::Engine eng(77);
  for (int rep = 0; rep < 25; ++rep) {
    std::int32_t n = 4 + static_cast<std::int32_t>(rng::bounded(eng, 40));
    Graph g = random_graph(n, 0.3, eng);
    double t = rng::uniform(eng, -2.0, 2.0);
    double s = rng::uniform(eng, -2.0, 2.0);
    InterpolatedOperator op(g, t, s);
    auto x = random_vec(static_cast<std::size_t>(n), eng);
    double lhs = op.quadratic_form_edges(x);
    auto mx = dense_matvec(dense_from_operator(op), x);
    double rhs = 0.0;
    for (std::int32_t i = 0; i < n; ++i) rhs += x[i] * mx[i];
    CHECK(std::fabs(lhs - rhs) <=
          1e-12 * std::max({1.0, std::fabs(lhs), std::fabs(rhs)}));
  }
}

TEST_CASE("shifted operators") {
  Graph g = path3();
  InterpolatedOperator op(g, 1.0, 1.0);
  InterpolatedOperator shifted = op.with_shift(2.5);
  CHECK(shifted.shift() == 2.5);
  auto x = std::vector<double>{1.0, -1.0, 0.5};
  auto y0 = op.apply(x);
  auto y1 = shifted.apply(x);
  for (int i = 0; i < 3; ++i) {
    CHECK(y1[i] == doctest::Approx(y0[i] + 2.5 * x[i]));
  }
  // quadratic form picks up shift * ||x||^2
  double nrm2 = 1.0 + 1.0 + 0.25;
  CHECK(shifted.quadratic_form_edges(x) ==
        doctest::Approx(op.quadratic_form_edges(x) + 2.5 * nrm2));
  CHECK(shifted.gershgorin_upper_bound() ==
        doctest::Approx(op.gershgorin_upper_bound() + 2.5));
}

TEST_CASE("gershgorin bound on frozen cases and random spectra") {
  // P3 with (1,1): degrees (1,2,1) -> max(2, 4, 2) = 4
  Graph p3 = path3();
  CHECK(InterpolatedOperator(p3, 1.0, 1.0).gershgorin_upper_bound() ==
        doctest::Approx(4.0));
  // K2 with (0,-1): degrees (1,1) -> 1
  Graph k2 = Graph::from_edge_list({{0, 1, 1.0}}, 2);
  CHECK(InterpolatedOperator(k2, 0.0, -1.0).gershgorin_upper_bound() ==
        doctest::Approx(1.0));
  // K2 with (-1, 0.5): M = [[-1,-0.5],[-0.5,-1]], lambda_max = -0.5 = bound
  CHECK(InterpolatedOperator(k2, -1.0, 0.5).gershgorin_upper_bound() ==
        doctest::Approx(-0.5));

  // bound dominates the Rayleigh quotient of arbitrary vectors
  rng::Engine eng(13);
  for (int rep = 0; rep < 10; ++rep) {
    Graph g = random_graph(20, 0.3, eng);
    double t = rng::uniform(eng, -2.0, 2.0);
    double s = rng::uniform(eng, -2.0, 2.0);
    InterpolatedOperator op(g, t, s);
    double bound = op.gershgorin_upper_bound();
    for (int v = 0; v < 5; ++v) {
      auto x = random_vec(20, eng);
      CHECK(op.rayleigh_quotient(x) <= bound + 1e-12);
    }
  }
}

TEST_CASE("deformed Laplacian is a shifted family member") {
  rng::Engine eng(41);
  for (double q : {0.3, 0.7, 1.5, -0.4}) {
    Graph g = random_graph(15, 0.4, eng);
    auto [op, shift] = from_deformed(g, q);
    CHECK(op.t() == doctest::Approx(q * q));
    CHECK(op.s() == doctest::Approx(q));
    CHECK(shift == doctest::Approx(1.0 - q * q));

    // dense check: I - q*A + q^2*(D - I) == (q^2*D - q*A) + shift*I
    auto deg = g.degree_vector();
    Mat adj = dense_from_operator(InterpolatedOperator(g, 0.0, -1.0));
    Mat family = dense_from_operator(op);
    for (std::int32_t i = 0; i < 15; ++i) {
      for (std::int32_t j = 0; j < 15; ++j) {
        double deformed = (i == j ? 1.0 + q * q * (deg[i] - 1.0) : 0.0) -
                          q * adj(i, j);
        CHECK(family(i, j) + (i == j ? shift : 0.0) ==
              doctest::Approx(deformed).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("validation") {
  Graph empty = Graph::from_edge_list({}, 0);
  CHECK_THROWS_AS(InterpolatedOperator(empty, 1.0, 1.0), EmptyGraphError);

  Graph g = path3();
  InterpolatedOperator op(g, 1.0, 1.0);
  std::vector<double> bad(2), out(3);
  CHECK_THROWS_AS(
      op.apply(std::span<const double>(bad), std::span<double>(out)),
      DimensionMismatch);
  CHECK_THROWS_AS(op.quadratic_form_edges(std::vector<double>(2, 1.0)),
                  DimensionMismatch);
  CHECK_THROWS_AS(op.rayleigh_quotient(std::vector<double>(3, 0.0)),
                  InvalidArgument);
}
