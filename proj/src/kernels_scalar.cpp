// Scalar reference kernels.  These are the ground truth the SIMD variants
// are equivalence-tested against; keep them simple and obviously correct.

#include <cstring>

#include "ile/kernels.hpp"

namespace ile::kernels {
namespace {

double dot_(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void vadd_(const double* x, const double* y, double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = x[i] + y[i];
}

void csr_spmv_(const std::int64_t* offs, const std::int32_t* cols,
               const double* vals, std::int32_t n_rows, const double* x,
               double* y, bool accumulate) {
  for (std::int32_t r = 0; r < n_rows; ++r) {
    double acc = 0.0;
    for (std::int64_t p = offs[r]; p < offs[r + 1]; ++p) {
      acc += vals[p] * x[cols[p]];
    }
    y[r] = accumulate ? y[r] + acc : acc;
  }
}

void interp_apply_(double t, double s, double shift, const double* deg,
                   const std::int64_t* offs, const std::int32_t* cols,
                   const double* vals, std::int32_t n_rows, const double* x,
                   double* y) {
  for (std::int32_t r = 0; r < n_rows; ++r) {
    double acc = 0.0;
    for (std::int64_t p = offs[r]; p < offs[r + 1]; ++p) {
      acc += vals[p] * x[cols[p]];
    }
    y[r] = (t * deg[r] + shift) * x[r] - s * acc;
  }
}

void gemm_nn_(const double* A, const double* B, double* C, std::size_t m,
              std::size_t k, std::size_t n, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = C + i * n;
    if (!accumulate) std::memset(crow, 0, n * sizeof(double));
    for (std::size_t p = 0; p < k; ++p) {
      double a = A[i * k + p];
      const double* brow = B + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += a * brow[j];
    }
  }
}

void gemm_tn_(const double* A, const double* B, double* C, std::size_t m,
              std::size_t k, std::size_t n, bool accumulate) {
  if (!accumulate) std::memset(C, 0, m * n * sizeof(double));
  for (std::size_t p = 0; p < k; ++p) {
    const double* arow = A + p * m;
    const double* brow = B + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      double a = arow[i];
      double* crow = C + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += a * brow[j];
    }
  }
}

void gemm_nt_(const double* A, const double* B, double* C, std::size_t m,
              std::size_t k, std::size_t n, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = A + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      double acc = dot_(arow, B + j * k, k);
      C[i * n + j] = accumulate ? C[i * n + j] + acc : acc;
    }
  }
}

void relu_fwd_(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_bwd_(const double* x, const double* g, double* out, std::size_t n,
               bool accumulate) {
  for (std::size_t i = 0; i < n; ++i) {
    double v = x[i] > 0.0 ? g[i] : 0.0;
    out[i] = accumulate ? out[i] + v : v;
  }
}

}  // namespace

const Table& scalar_table() {
  static const Table t = {dot_,    axpy_,    scal_,    vadd_,
                          csr_spmv_, interp_apply_, gemm_nn_, gemm_tn_,
                          gemm_nt_, relu_fwd_, relu_bwd_};
  return t;
}

}  // namespace ile::kernels
