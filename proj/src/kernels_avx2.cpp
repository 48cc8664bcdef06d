// AVX2/FMA kernel variants.  This translation unit is the only one compiled
// with -mavx2 -mfma; it must not be entered unless the dispatcher verified
// CPU support.  Reductions use fixed lane/accumulator order, so results are
// deterministic (though not bit-identical to the scalar backend).

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cstring>

#include "ile/kernels.hpp"

namespace ile::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                           _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                           acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_(double a, const double* x, double* y, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scal_(double a, double* x, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

void vadd_(const double* x, const double* y, double* z, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(
        z + i, _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) z[i] = x[i] + y[i];
}

inline double csr_row_dot(const std::int64_t* offs, const std::int32_t* cols,
                          const double* vals, std::int32_t r, const double* x) {
  std::int64_t p = offs[r];
  const std::int64_t end = offs[r + 1];
  __m256d acc = _mm256_setzero_pd();
  for (; p + 4 <= end; p += 4) {
    __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + p));
    __m256d xv = _mm256_i32gather_pd(x, idx, 8);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + p), xv, acc);
  }
  double s = hsum(acc);
  for (; p < end; ++p) s += vals[p] * x[cols[p]];
  return s;
}

void csr_spmv_(const std::int64_t* offs, const std::int32_t* cols,
               const double* vals, std::int32_t n_rows, const double* x,
               double* y, bool accumulate) {
  for (std::int32_t r = 0; r < n_rows; ++r) {
    double acc = csr_row_dot(offs, cols, vals, r, x);
    y[r] = accumulate ? y[r] + acc : acc;
  }
}

void interp_apply_(double t, double s, double shift, const double* deg,
                   const std::int64_t* offs, const std::int32_t* cols,
                   const double* vals, std::int32_t n_rows, const double* x,
                   double* y) {
  for (std::int32_t r = 0; r < n_rows; ++r) {
    double acc = csr_row_dot(offs, cols, vals, r, x);
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
      __m256d va = _mm256_set1_pd(a);
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        __m256d vc = _mm256_loadu_pd(crow + j);
        vc = _mm256_fmadd_pd(va, _mm256_loadu_pd(brow + j), vc);
        _mm256_storeu_pd(crow + j, vc);
      }
      for (; j < n; ++j) crow[j] += a * brow[j];
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
      __m256d va = _mm256_set1_pd(a);
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        __m256d vc = _mm256_loadu_pd(crow + j);
        vc = _mm256_fmadd_pd(va, _mm256_loadu_pd(brow + j), vc);
        _mm256_storeu_pd(crow + j, vc);
      }
      for (; j < n; ++j) crow[j] += a * brow[j];
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
  __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_bwd_(const double* x, const double* g, double* out, std::size_t n,
               bool accumulate) {
  __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_GT_OQ);
    __m256d v = _mm256_and_pd(mask, _mm256_loadu_pd(g + i));
    if (accumulate) v = _mm256_add_pd(v, _mm256_loadu_pd(out + i));
    _mm256_storeu_pd(out + i, v);
  }
  for (; i < n; ++i) {
    double v = x[i] > 0.0 ? g[i] : 0.0;
    out[i] = accumulate ? out[i] + v : v;
  }
}

}  // namespace

// Internal entry point used by the dispatcher; declared in kernels.cpp.
const Table* avx2_table_impl() {
  static const Table t = {dot_,    axpy_,    scal_,    vadd_,
                          csr_spmv_, interp_apply_, gemm_nn_, gemm_tn_,
                          gemm_nt_, relu_fwd_, relu_bwd_};
  return &t;
}

}  // namespace ile::kernels

#endif  // __AVX2__ && __FMA__
