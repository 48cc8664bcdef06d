#pragma once

// Hyperparameter selection: a scree-elbow rule for the embedding dimension k
// and two ways to pick (t, s) from a candidate grid — a closed-form linear
// probe screen and seeded k-fold cross-validation with the nn module.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ile/errors.hpp"
#include "ile/graph.hpp"
#include "ile/nn.hpp"

namespace ile {

struct ScoreCell {
  double t = 0.0;
  double s = 0.0;
  double score = 0.0;  // accuracy in [0, 1]
};

struct SelectionResult {
  std::string method;            // "scree", "correlation", or "cv"
  std::int32_t chosen_k = 0;     // scree only
  double chosen_t = 0.0;         // correlation / cv
  double chosen_s = 0.0;
  std::vector<ScoreCell> table;  // one row per grid cell, in input order
};

// Elbow of an ascending eigenvalue list: plot the first min(k_max, size)
// values with both axes normalized to [0, 1] and return the 1-based index
// farthest from the chord joining the endpoints.  Ties (including a
// perfectly linear or constant list, where every distance is zero) resolve
// to the smallest index.  The normalization makes the answer invariant to
// affine rescaling of the values.  Throws TooFewValues when fewer than
// three points would be plotted and InvalidArgument on a decreasing or
// non-finite list.
std::int32_t scree_elbow(const std::vector<double>& values,
                         std::int32_t k_max);

// Scores each (t, s) cell by the training accuracy of a one-versus-rest
// least-squares linear probe (closed form, no iterative training) on the
// k-dimensional embedding.  Nodes with negative labels are treated as
// unlabeled and excluded.  Each cell's eigensolve draws its own seed from
// `seed` and the cell index, so results are deterministic and independent
// of evaluation order.  The best score wins; exact ties resolve to the
// lexicographically smallest (t, s).
SelectionResult correlation_screen(
    const Graph& g, const std::vector<std::int32_t>& labels,
    const std::vector<std::pair<double, double>>& grid, std::int32_t k,
    std::uint64_t seed);

// Scores each (t, s) cell by mean validation accuracy over seeded k-fold
// cross-validation: the labeled nodes are partitioned once (the same folds
// for every cell), and per fold a model from `cfg` trains on the remaining
// folds' standardized embedding coordinates — concatenated to `base`
// features when given — and is scored on the held-out fold.  Throws
// InvalidArgument when folds < 2 or exceeds the labeled count.  Tie-break
// as in correlation_screen.
SelectionResult cross_validate(
    const Graph& g, const Mat* base, const std::vector<std::int32_t>& labels,
    const std::vector<std::pair<double, double>>& grid, std::int32_t k,
    std::int32_t folds, const nn::ModelConfig& cfg, std::uint64_t seed);

}  // namespace ile
