#include "ile/select.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <string>

#include "ile/embedding.hpp"
#include "ile/rng.hpp"

namespace ile {
namespace {

// Labeled node indices (labels[i] >= 0) and the class count.  Throws when
// nothing is labeled or only one class appears.
std::vector<std::int32_t> labeled_indices(
    const std::vector<std::int32_t>& labels, std::int32_t* num_classes) {
  std::vector<std::int32_t> idx;
  std::int32_t max_label = -1;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) {
      idx.push_back(static_cast<std::int32_t>(i));
      max_label = std::max(max_label, labels[i]);
    }
  }
  if (idx.empty()) {
    throw MissingLabelsError("selection requires at least one labeled node");
  }
  if (max_label < 1) {
    throw InvalidArgument("selection requires at least two classes");
  }
  *num_classes = max_label + 1;
  return idx;
}

// Solves the SPD system S x = b in place for several right-hand sides via
// unpivoted Cholesky; S is d x d, rhs is d x c.  The ridge added by the
// caller keeps S positive definite even for rank-deficient designs.
void cholesky_solve(Mat& S, Mat& rhs) {
  const std::int32_t d = S.rows;
  for (std::int32_t j = 0; j < d; ++j) {
    double diag = S(j, j);
    for (std::int32_t p = 0; p < j; ++p) diag -= S(j, p) * S(j, p);
    if (!(diag > 0.0)) {
      throw NonFiniteError("linear probe normal equations are not positive "
                           "definite");
    }
    S(j, j) = std::sqrt(diag);
    for (std::int32_t i = j + 1; i < d; ++i) {
      double v = S(i, j);
      for (std::int32_t p = 0; p < j; ++p) v -= S(i, p) * S(j, p);
      S(i, j) = v / S(j, j);
    }
  }
  const std::int32_t c = rhs.cols;
  for (std::int32_t col = 0; col < c; ++col) {
    for (std::int32_t i = 0; i < d; ++i) {  // forward: L y = b
      double v = rhs(i, col);
      for (std::int32_t p = 0; p < i; ++p) v -= S(i, p) * rhs(p, col);
      rhs(i, col) = v / S(i, i);
    }
    for (std::int32_t i = d - 1; i >= 0; --i) {  // backward: L^T x = y
      double v = rhs(i, col);
      for (std::int32_t p = i + 1; p < d; ++p) v -= S(p, i) * rhs(p, col);
      rhs(i, col) = v / S(i, i);
    }
  }
}

// Training accuracy of the closed-form one-versus-rest least-squares probe
// on [coords | 1] rows drawn from `idx`.
double probe_accuracy(const Mat& coords, const std::vector<std::int32_t>& idx,
                      const std::vector<std::int32_t>& labels,
                      std::int32_t num_classes) {
  const std::int32_t m = static_cast<std::int32_t>(idx.size());
  const std::int32_t d = coords.cols + 1;
  Mat x(m, d);
  for (std::int32_t r = 0; r < m; ++r) {
    for (std::int32_t j = 0; j < coords.cols; ++j) {
      x(r, j) = coords(idx[static_cast<std::size_t>(r)], j);
    }
    x(r, d - 1) = 1.0;
  }

  Mat gram(d, d);
  Mat xty(d, num_classes);
  for (std::int32_t i = 0; i < d; ++i) {
    for (std::int32_t j = i; j < d; ++j) {
      double v = 0.0;
      for (std::int32_t r = 0; r < m; ++r) v += x(r, i) * x(r, j);
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }
  for (std::int32_t r = 0; r < m; ++r) {
    const std::int32_t c = labels[static_cast<std::size_t>(
        idx[static_cast<std::size_t>(r)])];
    for (std::int32_t j = 0; j < d; ++j) xty(j, c) += x(r, j);
  }
  double trace = 0.0;
  for (std::int32_t i = 0; i < d; ++i) trace += gram(i, i);
  const double ridge = 1e-8 * std::max(1.0, trace / d);
  for (std::int32_t i = 0; i < d; ++i) gram(i, i) += ridge;

  cholesky_solve(gram, xty);  // xty now holds the d x C weight matrix

  std::int32_t correct = 0;
  for (std::int32_t r = 0; r < m; ++r) {
    std::int32_t best = 0;
    double best_score = 0.0;
    for (std::int32_t c = 0; c < num_classes; ++c) {
      double score = 0.0;
      for (std::int32_t j = 0; j < d; ++j) score += x(r, j) * xty(j, c);
      if (c == 0 || score > best_score) {
        best = c;
        best_score = score;
      }
    }
    if (best == labels[static_cast<std::size_t>(
            idx[static_cast<std::size_t>(r)])]) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / m;
}

// Fills chosen_t/chosen_s from the best table row; exact score ties resolve
// to the lexicographically smallest (t, s).
void pick_best(SelectionResult& r) {
  const ScoreCell* best = &r.table.front();
  for (const ScoreCell& c : r.table) {
    if (c.score > best->score ||
        (c.score == best->score &&
         (c.t < best->t || (c.t == best->t && c.s < best->s)))) {
      best = &c;
    }
  }
  r.chosen_t = best->t;
  r.chosen_s = best->s;
}

}  // namespace

std::int32_t scree_elbow(const std::vector<double>& values,
                         std::int32_t k_max) {
  const std::int32_t m = std::min<std::int32_t>(
      k_max, static_cast<std::int32_t>(values.size()));
  if (m < 3) {
    throw TooFewValues("scree elbow needs at least three plotted values, got " +
                       std::to_string(m));
  }
  for (std::int32_t i = 0; i < m; ++i) {
    const double v = values[static_cast<std::size_t>(i)];
    if (!std::isfinite(v)) {
      throw InvalidArgument("scree values must be finite");
    }
    if (i > 0 && v < values[static_cast<std::size_t>(i - 1)]) {
      throw InvalidArgument("scree values must be ascending");
    }
  }

  const double lo = values[0];
  const double hi = values[static_cast<std::size_t>(m - 1)];
  const double span = hi - lo;
  if (span <= 0.0) return 1;  // constant list: every distance is zero

  // With both axes mapped to [0,1] the chord is the diagonal y = x, and the
  // perpendicular distance is |x - y| / sqrt(2); the scale factor cannot
  // change the argmax, so compare |x - y| directly.
  std::int32_t best = 1;
  double best_dist = 0.0;
  for (std::int32_t i = 0; i < m; ++i) {
    const double x = static_cast<double>(i) / (m - 1);
    const double y = (values[static_cast<std::size_t>(i)] - lo) / span;
    const double dist = std::fabs(x - y);
    if (dist > best_dist) {
      best_dist = dist;
      best = i + 1;
    }
  }
  return best;
}

SelectionResult correlation_screen(
    const Graph& g, const std::vector<std::int32_t>& labels,
    const std::vector<std::pair<double, double>>& grid, std::int32_t k,
    std::uint64_t seed) {
  if (grid.empty()) {
    throw InvalidArgument("the (t, s) grid must not be empty");
  }
  if (labels.size() != static_cast<std::size_t>(g.num_vertices())) {
    throw DimensionMismatch("labels must cover every node");
  }
  std::int32_t num_classes = 0;
  const std::vector<std::int32_t> idx = labeled_indices(labels, &num_classes);

  SelectionResult r;
  r.method = "correlation";
  r.table.resize(grid.size());
  std::vector<std::future<double>> scores(grid.size());
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    r.table[cell].t = grid[cell].first;
    r.table[cell].s = grid[cell].second;
    scores[cell] = std::async(std::launch::async, [&, cell] {
      Embedding emb = compute_ile(g, grid[cell].first, grid[cell].second, k,
                                  1e-8, rng::mix(seed, cell));
      return probe_accuracy(emb.coords, idx, labels, num_classes);
    });
  }
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    r.table[cell].score = scores[cell].get();
  }
  pick_best(r);
  return r;
}

SelectionResult cross_validate(
    const Graph& g, const Mat* base, const std::vector<std::int32_t>& labels,
    const std::vector<std::pair<double, double>>& grid, std::int32_t k,
    std::int32_t folds, const nn::ModelConfig& cfg, std::uint64_t seed) {
  if (grid.empty()) {
    throw InvalidArgument("the (t, s) grid must not be empty");
  }
  if (labels.size() != static_cast<std::size_t>(g.num_vertices())) {
    throw DimensionMismatch("labels must cover every node");
  }
  std::int32_t num_classes = 0;
  std::vector<std::int32_t> idx = labeled_indices(labels, &num_classes);
  const std::int32_t m = static_cast<std::int32_t>(idx.size());
  if (folds < 2 || folds > m) {
    throw InvalidArgument("folds must be in [2, labeled count], got " +
                          std::to_string(folds));
  }

  // One fold partition shared by every cell, so cells compete on identical
  // train/validation splits.
  rng::Engine fold_eng(rng::mix(seed, 0x666f6c64u));  // tag: "fold"
  const std::vector<std::int32_t> perm =
      rng::permutation(m, fold_eng);
  std::vector<std::vector<std::int32_t>> fold_idx(
      static_cast<std::size_t>(folds));
  for (std::int32_t r = 0; r < m; ++r) {
    const std::int32_t f =
        static_cast<std::int32_t>(static_cast<std::int64_t>(r) * folds / m);
    fold_idx[static_cast<std::size_t>(f)].push_back(
        idx[static_cast<std::size_t>(perm[static_cast<std::size_t>(r)])]);
  }

  SelectionResult result;
  result.method = "cv";
  result.table.resize(grid.size());
  std::vector<std::future<double>> scores(grid.size());
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    result.table[cell].t = grid[cell].first;
    result.table[cell].s = grid[cell].second;
    scores[cell] = std::async(std::launch::async, [&, cell] {
      Embedding emb = compute_ile(g, grid[cell].first, grid[cell].second, k,
                                  1e-8, rng::mix(seed, cell));
      const Mat feats = augment_features(base, emb);
      double total = 0.0;
      for (std::int32_t f = 0; f < folds; ++f) {
        Split split;
        split.test_idx = fold_idx[static_cast<std::size_t>(f)];
        for (std::int32_t other = 0; other < folds; ++other) {
          if (other == f) continue;
          const auto& chunk = fold_idx[static_cast<std::size_t>(other)];
          split.train_idx.insert(split.train_idx.end(), chunk.begin(),
                                 chunk.end());
        }
        nn::ModelConfig fold_cfg = cfg;
        fold_cfg.seed = rng::mix(rng::mix(seed, cell), 0x80000000u + f);
        split.seed = fold_cfg.seed;
        nn::Model model =
            nn::build_model(fold_cfg, feats.cols, num_classes, g);
        nn::TrainReport report =
            nn::train(model, feats, labels, split, fold_cfg);
        total += report.test_accuracy;
      }
      return total / folds;
    });
  }
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    result.table[cell].score = scores[cell].get();
  }
  pick_best(result);
  return result;
}

}  // namespace ile
