#pragma once

// Reverse-mode automatic differentiation over dense matrices plus sparse
// propagation products, and the four node-classification models built on it.
//
// The tape owns every intermediate value and its gradient buffer; operations
// append nodes and record closures that accumulate exact gradients on the
// way back.  Training code pushes the current parameters as leaves each
// epoch, so a Model is just parameter storage plus a forward routine.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ile/dataset.hpp"
#include "ile/errors.hpp"
#include "ile/graph.hpp"
#include "ile/matrix.hpp"

namespace ile::nn {

using TensorId = std::int32_t;

struct Tape {
  struct Node {
    Mat value;
    Mat grad;  // same shape, zero until backward
    std::function<void(Tape&)> back;
  };
  std::vector<Node> nodes;
};

// Leaf holding a copy of `value`; its gradient is readable after backward.
TensorId input(Tape& t, Mat value);

const Mat& value(const Tape& t, TensorId id);
const Mat& grad(const Tape& t, TensorId id);

TensorId matmul(Tape& t, TensorId a, TensorId b);
TensorId sparse_matmul(Tape& t, const Csr& s, TensorId x);
TensorId add(Tape& t, TensorId a, TensorId b);
// x (n x d) plus a (1 x d) row broadcast over rows.
TensorId bias_add(Tape& t, TensorId x, TensorId bias);
TensorId relu(Tape& t, TensorId x);  // subgradient 0 at 0
TensorId mul_elem(Tape& t, TensorId a, TensorId b);
TensorId concat_cols(Tape& t, TensorId a, TensorId b);
TensorId sum_all(Tape& t, TensorId x);  // 1x1 total

// Masked mean softmax cross entropy: mean over `mask` rows of
// logsumexp(logits_i) - logits_i[labels_i].  1x1 output.  Throws
// DimensionMismatch when labels don't cover the rows, IndexOutOfRange for a
// label or mask entry out of range, InvalidArgument for an empty mask,
// NonFiniteError when the loss is not finite.
TensorId softmax_cross_entropy(Tape& t, TensorId logits,
                               const std::vector<std::int32_t>& labels,
                               const std::vector<std::int32_t>& mask);

// Seeds d(loss)=1 and runs all recorded closures in reverse; `loss` must be
// 1x1.
void backward(Tape& t, TensorId loss);

// y = S x for CSR S against a dense row-major matrix.
Mat csr_apply(const Csr& s, const Mat& x);

// Propagation matrices.  Edge weights are honored throughout; on the binary
// graphs of the experiments they reduce to the textbook formulas.
//
// Symmetric normalization with self-loops: D^{-1/2} (A + I) D^{-1/2} where
// D are the degrees of A + I.  An isolated node keeps a self-only row of 1.
// Throws EmptyGraphError on n = 0.
Csr gcn_propagation(const Graph& g);
// A + (1 + eps) I: neighbor sum plus weighted self term.
Csr sum_propagation(const Graph& g, double eps);
// Row-normalized adjacency: row u averages the neighbors of u (weighted
// mean); an isolated node gets an all-zero row (empty mean = 0).
Csr mean_aggregation(const Graph& g);

enum class Arch { MLP, GCN, GIN, SAGE };

const char* arch_name(Arch a);
// Parses "mlp"/"gcn"/"gin"/"sage" (case-insensitive); throws InvalidArgument.
Arch arch_from_name(const std::string& name);

struct ModelConfig {
  Arch arch = Arch::GCN;
  std::int32_t layers = 2;
  std::int32_t hidden_dim = 32;
  double lr = 0.01;
  std::int32_t epochs = 200;
  double weight_decay = 5e-4;
  std::uint64_t seed = 0;
  double gin_epsilon = 0.0;
};

// Baseline hyperparameters: hidden 32, lr 0.01, 200 epochs, weight decay
// 5e-4; depth 2 for the message-passing models and 5 for the MLP.
ModelConfig default_config(Arch arch);

struct TrainReport {
  double test_accuracy = 0.0;
  double train_accuracy = 0.0;
  double initial_loss = 0.0;  // train loss before the first update
  double final_loss = 0.0;    // train loss at the last epoch's forward pass
  std::int32_t epochs_run = 0;
  std::uint64_t seed = 0;
};

struct Model {
  Arch arch = Arch::MLP;
  std::int32_t in_dim = 0;
  std::int32_t num_classes = 0;
  std::int32_t layers = 0;
  std::int32_t hidden_dim = 0;
  // Affine parameters in layer order, weight then bias per affine map (GIN
  // layers contribute two affines each).
  std::vector<Mat> params;
  // Propagation matrices baked from the build graph (unused by MLP).
  Csr prop;
  Csr mean;

  // Appends the forward graph for features `x` to the tape, pushing the
  // current parameters as leaves (ids reported through `param_ids` when
  // non-null, aligned with `params`).  Returns the logits node.
  TensorId forward(Tape& t, TensorId x, std::vector<TensorId>* param_ids) const;
  // One inference pass; returns the n x num_classes logit matrix.
  Mat logits(const Mat& x) const;
};

// Validates the config and initializes parameters from cfg.seed: weights
// uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)) drawn row-major in
// layer order, biases zero.  The MLP ignores `g`; message-passing models
// bake their propagation matrices from it here.  Throws InvalidConfig.
Model build_model(const ModelConfig& cfg, std::int32_t in_dim,
                  std::int32_t num_classes, const Graph& g);

// Full-batch gradient descent with weight decay on the masked train cross
// entropy for cfg.epochs; evaluates accuracy from the final parameters.
// Deterministic given (model, data, split, cfg).  Throws DimensionMismatch
// on inconsistent shapes and NonFiniteError when the loss diverges.
TrainReport train(Model& model, const Mat& features,
                  const std::vector<std::int32_t>& labels, const Split& split,
                  const ModelConfig& cfg);

}  // namespace ile::nn
