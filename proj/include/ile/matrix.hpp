#pragma once

#include <cstdint>
#include <vector>

#include "ile/errors.hpp"

namespace ile {

// Dense row-major matrix of doubles.  Deliberately minimal: arithmetic goes
// through the kernel layer, this type only owns storage and shape.
struct Mat {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::int64_t r, std::int64_t c)
      : rows(r), cols(c), a(static_cast<std::size_t>(r * c), 0.0) {}

  double& operator()(std::int64_t i, std::int64_t j) {
    return a[static_cast<std::size_t>(i * cols + j)];
  }
  double operator()(std::int64_t i, std::int64_t j) const {
    return a[static_cast<std::size_t>(i * cols + j)];
  }
  double* row(std::int64_t i) { return a.data() + i * cols; }
  const double* row(std::int64_t i) const { return a.data() + i * cols; }
  double* data() { return a.data(); }
  const double* data() const { return a.data(); }
  std::int64_t size() const { return rows * cols; }
  bool same_shape(const Mat& o) const {
    return rows == o.rows && cols == o.cols;
  }
};

// General sparse matrix in CSR form (for propagation operators etc.; the
// Graph type keeps its own CSR arrays with graph-specific invariants).
struct Csr {
  std::int32_t n_rows = 0;
  std::int32_t n_cols = 0;
  std::vector<std::int64_t> offs;  // size n_rows + 1
  std::vector<std::int32_t> cols;
  std::vector<double> vals;
};

Csr csr_transpose(const Csr& m);

}  // namespace ile
