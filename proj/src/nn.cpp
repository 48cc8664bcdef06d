#include "ile/nn.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <utility>

#include "ile/kernels.hpp"
#include "ile/rng.hpp"

namespace ile::nn {

namespace {

Tape::Node& node_at(Tape& t, TensorId id) {
  if (id < 0 || static_cast<std::size_t>(id) >= t.nodes.size()) {
    throw IndexOutOfRange("tape id " + std::to_string(id) + " out of range");
  }
  return t.nodes[static_cast<std::size_t>(id)];
}

const Tape::Node& node_at(const Tape& t, TensorId id) {
  return node_at(const_cast<Tape&>(t), id);
}

// Id the next pushed node will take; closures capture it before push so a
// node can read its own gradient during backward.
TensorId next_id(const Tape& t) {
  return static_cast<TensorId>(t.nodes.size());
}

TensorId push(Tape& t, Mat value, std::function<void(Tape&)> back) {
  Tape::Node n;
  n.grad = Mat(value.rows, value.cols);
  n.value = std::move(value);
  n.back = std::move(back);
  t.nodes.push_back(std::move(n));
  return static_cast<TensorId>(t.nodes.size() - 1);
}

Mat& val_of(Tape& t, TensorId id) {
  return t.nodes[static_cast<std::size_t>(id)].value;
}
Mat& grad_of(Tape& t, TensorId id) {
  return t.nodes[static_cast<std::size_t>(id)].grad;
}

}  // namespace

TensorId input(Tape& t, Mat value) { return push(t, std::move(value), {}); }

const Mat& value(const Tape& t, TensorId id) { return node_at(t, id).value; }
const Mat& grad(const Tape& t, TensorId id) { return node_at(t, id).grad; }

TensorId matmul(Tape& t, TensorId a, TensorId b) {
  const Mat& av = value(t, a);
  const Mat& bv = value(t, b);
  if (av.cols != bv.rows) {
    throw DimensionMismatch("matmul: " + std::to_string(av.rows) + "x" +
                            std::to_string(av.cols) + " by " +
                            std::to_string(bv.rows) + "x" +
                            std::to_string(bv.cols));
  }
  const auto m = static_cast<std::size_t>(av.rows);
  const auto p = static_cast<std::size_t>(av.cols);
  const auto q = static_cast<std::size_t>(bv.cols);
  Mat c(av.rows, bv.cols);
  kernels::K().gemm_nn(av.data(), bv.data(), c.data(), m, p, q, false);
  TensorId out = next_id(t);
  return push(t, std::move(c), [a, b, out, m, p, q](Tape& t2) {
    const Mat& g = grad_of(t2, out);
    // dA += dC B^T ; dB += A^T dC
    kernels::K().gemm_nt(g.data(), val_of(t2, b).data(),
                         grad_of(t2, a).data(), m, q, p, true);
    kernels::K().gemm_tn(val_of(t2, a).data(), g.data(),
                         grad_of(t2, b).data(), p, m, q, true);
  });
}

Mat csr_apply(const Csr& s, const Mat& x) {
  if (s.n_cols != x.rows) {
    throw DimensionMismatch("csr_apply: matrix has " +
                            std::to_string(s.n_cols) + " cols, input " +
                            std::to_string(x.rows) + " rows");
  }
  Mat y(s.n_rows, x.cols);
  const auto d = static_cast<std::size_t>(x.cols);
  for (std::int32_t u = 0; u < s.n_rows; ++u) {
    for (std::int64_t e = s.offs[static_cast<std::size_t>(u)];
         e < s.offs[static_cast<std::size_t>(u) + 1]; ++e) {
      const auto v = s.cols[static_cast<std::size_t>(e)];
      kernels::K().axpy(s.vals[static_cast<std::size_t>(e)], x.row(v),
                        y.row(u), d);
    }
  }
  return y;
}

TensorId sparse_matmul(Tape& t, const Csr& s, TensorId x) {
  Mat y = csr_apply(s, value(t, x));
  TensorId out = next_id(t);
  // The Csr lives in the caller (model or test fixture) and must outlive the
  // tape; closures keep only a pointer.
  const Csr* sp = &s;
  return push(t, std::move(y), [sp, x, out](Tape& t2) {
    const Mat& g = grad_of(t2, out);
    Mat& dx = grad_of(t2, x);
    const auto d = static_cast<std::size_t>(g.cols);
    // dX += S^T dY, accumulated row by row.
    for (std::int32_t u = 0; u < sp->n_rows; ++u) {
      for (std::int64_t e = sp->offs[static_cast<std::size_t>(u)];
           e < sp->offs[static_cast<std::size_t>(u) + 1]; ++e) {
        const auto v = sp->cols[static_cast<std::size_t>(e)];
        kernels::K().axpy(sp->vals[static_cast<std::size_t>(e)], g.row(u),
                          dx.row(v), d);
      }
    }
  });
}

TensorId add(Tape& t, TensorId a, TensorId b) {
  const Mat& av = value(t, a);
  const Mat& bv = value(t, b);
  if (!av.same_shape(bv)) {
    throw DimensionMismatch("add: " + std::to_string(av.rows) + "x" +
                            std::to_string(av.cols) + " vs " +
                            std::to_string(bv.rows) + "x" +
                            std::to_string(bv.cols));
  }
  Mat c(av.rows, av.cols);
  kernels::K().vadd(av.data(), bv.data(), c.data(), c.a.size());
  TensorId out = next_id(t);
  return push(t, std::move(c), [a, b, out](Tape& t2) {
    const Mat& g = grad_of(t2, out);
    kernels::K().axpy(1.0, g.data(), grad_of(t2, a).data(), g.a.size());
    kernels::K().axpy(1.0, g.data(), grad_of(t2, b).data(), g.a.size());
  });
}

TensorId bias_add(Tape& t, TensorId x, TensorId bias) {
  const Mat& xv = value(t, x);
  const Mat& bv = value(t, bias);
  if (bv.rows != 1 || bv.cols != xv.cols) {
    throw DimensionMismatch("bias_add: bias must be 1x" +
                            std::to_string(xv.cols) + ", got " +
                            std::to_string(bv.rows) + "x" +
                            std::to_string(bv.cols));
  }
  Mat c = xv;
  for (std::int64_t i = 0; i < c.rows; ++i) {
    kernels::K().axpy(1.0, bv.data(), c.row(i),
                      static_cast<std::size_t>(c.cols));
  }
  TensorId out = next_id(t);
  return push(t, std::move(c), [x, bias, out](Tape& t2) {
    const Mat& g = grad_of(t2, out);
    kernels::K().axpy(1.0, g.data(), grad_of(t2, x).data(), g.a.size());
    Mat& db = grad_of(t2, bias);
    for (std::int64_t i = 0; i < g.rows; ++i) {
      kernels::K().axpy(1.0, g.row(i), db.data(),
                        static_cast<std::size_t>(g.cols));
    }
  });
}

TensorId relu(Tape& t, TensorId x) {
  const Mat& xv = value(t, x);
  Mat c(xv.rows, xv.cols);
  kernels::K().relu_fwd(xv.data(), c.data(), c.a.size());
  TensorId out = next_id(t);
  return push(t, std::move(c), [x, out](Tape& t2) {
    const Mat& g = grad_of(t2, out);
    kernels::K().relu_bwd(val_of(t2, x).data(), g.data(),
                          grad_of(t2, x).data(), g.a.size(), true);
  });
}

TensorId mul_elem(Tape& t, TensorId a, TensorId b) {
  const Mat& av = value(t, a);
  const Mat& bv = value(t, b);
  if (!av.same_shape(bv)) {
    throw DimensionMismatch("mul_elem: shapes differ");
  }
  Mat c(av.rows, av.cols);
  for (std::size_t i = 0; i < c.a.size(); ++i) c.a[i] = av.a[i] * bv.a[i];
  TensorId out = next_id(t);
  return push(t, std::move(c), [a, b, out](Tape& t2) {
    const Mat& g = grad_of(t2, out);
    const Mat& avv = val_of(t2, a);
    const Mat& bvv = val_of(t2, b);
    Mat& da = grad_of(t2, a);
    Mat& db = grad_of(t2, b);
    for (std::size_t i = 0; i < g.a.size(); ++i) {
      da.a[i] += g.a[i] * bvv.a[i];
      db.a[i] += g.a[i] * avv.a[i];
    }
  });
}

TensorId concat_cols(Tape& t, TensorId a, TensorId b) {
  const Mat& av = value(t, a);
  const Mat& bv = value(t, b);
  if (av.rows != bv.rows) {
    throw DimensionMismatch("concat_cols: row counts differ");
  }
  Mat c(av.rows, av.cols + bv.cols);
  for (std::int64_t i = 0; i < c.rows; ++i) {
    std::copy(av.row(i), av.row(i) + av.cols, c.row(i));
    std::copy(bv.row(i), bv.row(i) + bv.cols, c.row(i) + av.cols);
  }
  TensorId out = next_id(t);
  return push(t, std::move(c), [a, b, out](Tape& t2) {
    const Mat& g = grad_of(t2, out);
    Mat& da = grad_of(t2, a);
    Mat& db = grad_of(t2, b);
    for (std::int64_t i = 0; i < g.rows; ++i) {
      for (std::int64_t j = 0; j < da.cols; ++j) da(i, j) += g(i, j);
      for (std::int64_t j = 0; j < db.cols; ++j) {
        db(i, j) += g(i, j + da.cols);
      }
    }
  });
}

TensorId sum_all(Tape& t, TensorId x) {
  const Mat& xv = value(t, x);
  Mat c(1, 1);
  for (double v : xv.a) c(0, 0) += v;
  TensorId out = next_id(t);
  return push(t, std::move(c), [x, out](Tape& t2) {
    const double g = grad_of(t2, out)(0, 0);
    Mat& dx = grad_of(t2, x);
    for (auto& v : dx.a) v += g;
  });
}

TensorId softmax_cross_entropy(Tape& t, TensorId logits,
                               const std::vector<std::int32_t>& labels,
                               const std::vector<std::int32_t>& mask) {
  const Mat& lv = value(t, logits);
  const auto n = lv.rows;
  const auto C = lv.cols;
  if (static_cast<std::int64_t>(labels.size()) != n) {
    throw DimensionMismatch("cross entropy: " + std::to_string(labels.size()) +
                            " labels for " + std::to_string(n) + " rows");
  }
  if (mask.empty()) {
    throw InvalidArgument("cross entropy: empty mask");
  }
  for (std::int32_t i : mask) {
    if (i < 0 || i >= n) {
      throw IndexOutOfRange("cross entropy: mask index " + std::to_string(i));
    }
    const auto y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= C) {
      throw IndexOutOfRange("cross entropy: label " + std::to_string(y) +
                            " for " + std::to_string(C) + " classes");
    }
  }

  // probs holds softmax rows for masked nodes (zero elsewhere); shared with
  // the backward closure.
  Mat probs(n, C);
  double total = 0.0;
  for (std::int32_t i : mask) {
    const double* row = lv.row(i);
    double hi = row[0];
    for (std::int64_t c = 1; c < C; ++c) hi = std::max(hi, row[c]);
    double z = 0.0;
    for (std::int64_t c = 0; c < C; ++c) z += std::exp(row[c] - hi);
    const double lse = hi + std::log(z);
    for (std::int64_t c = 0; c < C; ++c) {
      probs(i, c) = std::exp(row[c] - lse);
    }
    total += lse - row[labels[static_cast<std::size_t>(i)]];
  }
  const double inv = 1.0 / static_cast<double>(mask.size());
  Mat c(1, 1);
  c(0, 0) = total * inv;
  if (!std::isfinite(c(0, 0))) {
    throw NonFiniteError("cross entropy loss is not finite");
  }
  TensorId out = next_id(t);
  return push(t, std::move(c),
              [logits, out, probs = std::move(probs), labels, mask,
               inv](Tape& t2) {
                const double g = grad_of(t2, out)(0, 0);
                Mat& dl = grad_of(t2, logits);
                for (std::int32_t i : mask) {
                  for (std::int64_t cc = 0; cc < dl.cols; ++cc) {
                    dl(i, cc) += g * inv * probs(i, cc);
                  }
                  dl(i, labels[static_cast<std::size_t>(i)]) -= g * inv;
                }
              });
}

void backward(Tape& t, TensorId loss) {
  Tape::Node& last = node_at(t, loss);
  if (last.value.rows != 1 || last.value.cols != 1) {
    throw DimensionMismatch("backward: loss must be 1x1");
  }
  last.grad(0, 0) = 1.0;
  for (std::size_t i = t.nodes.size(); i-- > 0;) {
    if (t.nodes[i].back) t.nodes[i].back(t);
  }
}

// ---------------------------------------------------------------------------
// Propagation matrices

namespace {

// Rows are built with columns already sorted: the graph's neighbor lists are
// sorted, and the self entry is spliced in at its ordered position.
Csr build_with_self(const Graph& g, double self_weight,
                    const std::vector<double>& edge_scale) {
  const std::int32_t n = g.num_vertices();
  const auto& offs = g.row_offsets();
  const auto& cols = g.col_indices();
  const auto& wts = g.weights();
  Csr s;
  s.n_rows = n;
  s.n_cols = n;
  s.offs.assign(1, 0);
  for (std::int32_t u = 0; u < n; ++u) {
    bool placed = false;
    for (std::int64_t e = offs[static_cast<std::size_t>(u)];
         e < offs[static_cast<std::size_t>(u) + 1]; ++e) {
      const auto v = cols[static_cast<std::size_t>(e)];
      if (!placed && v > u) {
        s.cols.push_back(u);
        s.vals.push_back(self_weight * edge_scale[static_cast<std::size_t>(u)]);
        placed = true;
      }
      s.cols.push_back(v);
      s.vals.push_back(wts[static_cast<std::size_t>(e)] *
                       edge_scale[static_cast<std::size_t>(u)]);
    }
    if (!placed) {
      s.cols.push_back(u);
      s.vals.push_back(self_weight * edge_scale[static_cast<std::size_t>(u)]);
    }
    s.offs.push_back(static_cast<std::int64_t>(s.cols.size()));
  }
  return s;
}

}  // namespace

Csr gcn_propagation(const Graph& g) {
  const std::int32_t n = g.num_vertices();
  if (n == 0) throw EmptyGraphError("gcn_propagation: empty graph");
  DegreeVector deg = g.degree_vector();
  std::vector<double> inv_sqrt(static_cast<std::size_t>(n));
  for (std::int32_t u = 0; u < n; ++u) {
    inv_sqrt[static_cast<std::size_t>(u)] =
        1.0 / std::sqrt(deg[static_cast<std::size_t>(u)] + 1.0);
  }
  // Build A + I scaled by 1/sqrt(d_u) per row, then by 1/sqrt(d_v) per entry.
  Csr s = build_with_self(g, 1.0, inv_sqrt);
  for (std::int32_t u = 0; u < s.n_rows; ++u) {
    for (std::int64_t e = s.offs[static_cast<std::size_t>(u)];
         e < s.offs[static_cast<std::size_t>(u) + 1]; ++e) {
      s.vals[static_cast<std::size_t>(e)] *=
          inv_sqrt[static_cast<std::size_t>(s.cols[static_cast<std::size_t>(e)])];
    }
  }
  return s;
}

Csr sum_propagation(const Graph& g, double eps) {
  const std::int32_t n = g.num_vertices();
  if (n == 0) throw EmptyGraphError("sum_propagation: empty graph");
  std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
  return build_with_self(g, 1.0 + eps, ones);
}

Csr mean_aggregation(const Graph& g) {
  const std::int32_t n = g.num_vertices();
  if (n == 0) throw EmptyGraphError("mean_aggregation: empty graph");
  DegreeVector deg = g.degree_vector();
  const auto& offs = g.row_offsets();
  const auto& cols = g.col_indices();
  const auto& wts = g.weights();
  Csr s;
  s.n_rows = n;
  s.n_cols = n;
  s.offs.assign(1, 0);
  for (std::int32_t u = 0; u < n; ++u) {
    const double d = deg[static_cast<std::size_t>(u)];
    if (d > 0.0) {
      for (std::int64_t e = offs[static_cast<std::size_t>(u)];
           e < offs[static_cast<std::size_t>(u) + 1]; ++e) {
        s.cols.push_back(cols[static_cast<std::size_t>(e)]);
        s.vals.push_back(wts[static_cast<std::size_t>(e)] / d);
      }
    }
    s.offs.push_back(static_cast<std::int64_t>(s.cols.size()));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Models

const char* arch_name(Arch a) {
  switch (a) {
    case Arch::MLP:
      return "mlp";
    case Arch::GCN:
      return "gcn";
    case Arch::GIN:
      return "gin";
    case Arch::SAGE:
      return "sage";
  }
  return "?";
}

Arch arch_from_name(const std::string& name) {
  std::string low;
  for (char c : name) {
    low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (low == "mlp") return Arch::MLP;
  if (low == "gcn") return Arch::GCN;
  if (low == "gin") return Arch::GIN;
  if (low == "sage") return Arch::SAGE;
  throw InvalidArgument("unknown architecture '" + name + "'");
}

ModelConfig default_config(Arch arch) {
  ModelConfig cfg;
  cfg.arch = arch;
  cfg.layers = arch == Arch::MLP ? 5 : 2;
  return cfg;
}

namespace {

Mat glorot(std::int64_t fan_in, std::int64_t fan_out, rng::Engine& eng) {
  Mat w(fan_in, fan_out);
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : w.a) v = rng::uniform(eng, -a, a);
  return w;
}

}  // namespace

Model build_model(const ModelConfig& cfg, std::int32_t in_dim,
                  std::int32_t num_classes, const Graph& g) {
  if (cfg.layers < 1) {
    throw InvalidConfig("layers must be >= 1, got " +
                        std::to_string(cfg.layers));
  }
  if (cfg.hidden_dim < 1) {
    throw InvalidConfig("hidden_dim must be >= 1, got " +
                        std::to_string(cfg.hidden_dim));
  }
  if (!(cfg.lr > 0.0)) {
    throw InvalidConfig("lr must be > 0, got " + std::to_string(cfg.lr));
  }
  if (cfg.epochs < 1) {
    throw InvalidConfig("epochs must be >= 1, got " +
                        std::to_string(cfg.epochs));
  }
  if (cfg.weight_decay < 0.0) {
    throw InvalidConfig("weight_decay must be >= 0");
  }
  if (in_dim < 1) {
    throw InvalidConfig("in_dim must be >= 1, got " + std::to_string(in_dim));
  }
  if (num_classes < 2) {
    throw InvalidConfig("num_classes must be >= 2, got " +
                        std::to_string(num_classes));
  }

  Model m;
  m.arch = cfg.arch;
  m.in_dim = in_dim;
  m.num_classes = num_classes;
  m.layers = cfg.layers;
  m.hidden_dim = cfg.hidden_dim;

  switch (cfg.arch) {
    case Arch::MLP:
      break;  // graph-free
    case Arch::GCN:
      m.prop = gcn_propagation(g);
      break;
    case Arch::GIN:
      m.prop = sum_propagation(g, cfg.gin_epsilon);
      break;
    case Arch::SAGE:
      m.mean = mean_aggregation(g);
      break;
  }

  rng::Engine eng(cfg.seed);
  const std::int32_t L = cfg.layers;
  const std::int32_t h = cfg.hidden_dim;
  for (std::int32_t i = 0; i < L; ++i) {
    const std::int64_t din = i == 0 ? in_dim : h;
    const std::int64_t dout = i == L - 1 ? num_classes : h;
    switch (cfg.arch) {
      case Arch::MLP:
      case Arch::GCN:
        m.params.push_back(glorot(din, dout, eng));
        m.params.push_back(Mat(1, dout));
        break;
      case Arch::GIN:
        // per-layer perceptron: din -> h -> dout
        m.params.push_back(glorot(din, h, eng));
        m.params.push_back(Mat(1, h));
        m.params.push_back(glorot(h, dout, eng));
        m.params.push_back(Mat(1, dout));
        break;
      case Arch::SAGE:
        // concat(self, neighbor mean) doubles the input width
        m.params.push_back(glorot(2 * din, dout, eng));
        m.params.push_back(Mat(1, dout));
        break;
    }
  }
  return m;
}

TensorId Model::forward(Tape& t, TensorId x,
                        std::vector<TensorId>* param_ids) const {
  if (value(t, x).cols != in_dim) {
    throw DimensionMismatch("forward: features have " +
                            std::to_string(value(t, x).cols) +
                            " columns, model expects " +
                            std::to_string(in_dim));
  }
  std::vector<TensorId> ids;
  ids.reserve(params.size());
  for (const Mat& p : params) ids.push_back(input(t, p));
  if (param_ids != nullptr) *param_ids = ids;

  TensorId hcur = x;
  std::size_t pi = 0;
  for (std::int32_t layer = 0; layer < layers; ++layer) {
    const bool last = layer == layers - 1;
    TensorId z = hcur;
    switch (arch) {
      case Arch::MLP:
        z = bias_add(t, matmul(t, hcur, ids[pi]), ids[pi + 1]);
        pi += 2;
        break;
      case Arch::GCN:
        z = bias_add(t, matmul(t, sparse_matmul(t, prop, hcur), ids[pi]),
                     ids[pi + 1]);
        pi += 2;
        break;
      case Arch::GIN: {
        TensorId agg = sparse_matmul(t, prop, hcur);
        TensorId u =
            relu(t, bias_add(t, matmul(t, agg, ids[pi]), ids[pi + 1]));
        z = bias_add(t, matmul(t, u, ids[pi + 2]), ids[pi + 3]);
        pi += 4;
        break;
      }
      case Arch::SAGE: {
        TensorId cat = concat_cols(t, hcur, sparse_matmul(t, mean, hcur));
        z = bias_add(t, matmul(t, cat, ids[pi]), ids[pi + 1]);
        pi += 2;
        break;
      }
    }
    hcur = last ? z : relu(t, z);
  }
  return hcur;
}

Mat Model::logits(const Mat& x) const {
  Tape t;
  TensorId out = forward(t, input(t, x), nullptr);
  return value(t, out);
}

namespace {

double accuracy(const Mat& logits, const std::vector<std::int32_t>& labels,
                const std::vector<std::int32_t>& idx) {
  std::int64_t hits = 0;
  for (std::int32_t i : idx) {
    std::int64_t arg = 0;
    for (std::int64_t c = 1; c < logits.cols; ++c) {
      if (logits(i, c) > logits(i, arg)) arg = c;  // tie keeps lowest class
    }
    if (arg == labels[static_cast<std::size_t>(i)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(idx.size());
}

}  // namespace

TrainReport train(Model& model, const Mat& features,
                  const std::vector<std::int32_t>& labels, const Split& split,
                  const ModelConfig& cfg) {
  if (static_cast<std::int64_t>(labels.size()) != features.rows) {
    throw DimensionMismatch("train: " + std::to_string(labels.size()) +
                            " labels for " + std::to_string(features.rows) +
                            " feature rows");
  }

  TrainReport rep;
  rep.seed = cfg.seed;
  for (std::int32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Tape t;
    TensorId x = input(t, features);
    std::vector<TensorId> pids;
    TensorId logits = model.forward(t, x, &pids);
    TensorId loss = softmax_cross_entropy(t, logits, labels, split.train_idx);
    const double lv = value(t, loss)(0, 0);
    if (epoch == 0) rep.initial_loss = lv;
    rep.final_loss = lv;
    backward(t, loss);
    for (std::size_t p = 0; p < model.params.size(); ++p) {
      Mat& w = model.params[p];
      const Mat& gw = grad(t, pids[p]);
      for (std::size_t i = 0; i < w.a.size(); ++i) {
        w.a[i] -= cfg.lr * (gw.a[i] + cfg.weight_decay * w.a[i]);
      }
    }
    ++rep.epochs_run;
  }

  Mat final_logits = model.logits(features);
  for (double v : final_logits.a) {
    if (!std::isfinite(v)) {
      throw NonFiniteError("train: logits diverged to non-finite values");
    }
  }
  rep.train_accuracy = accuracy(final_logits, labels, split.train_idx);
  rep.test_accuracy = accuracy(final_logits, labels, split.test_idx);
  return rep;
}

}  // namespace ile::nn
