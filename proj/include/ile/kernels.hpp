#pragma once

// Numeric inner-loop kernels.  Each operation exists as a scalar reference
// implementation and, on x86-64, an AVX2/FMA variant; one backend is picked
// at startup from CPU capabilities (overridable via set_backend() or the
// ILE_KERNELS environment variable) and stays fixed for the whole process,
// so results never depend on thread count or call site.

#include <cstddef>
#include <cstdint>

namespace ile::kernels {

enum class Backend { Scalar, Avx2 };

struct Table {
  // All kernels operate on raw contiguous arrays; matrices are row-major.
  double (*dot)(const double* x, const double* y, std::size_t n);
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  void (*scal)(double a, double* x, std::size_t n);
  void (*vadd)(const double* x, const double* y, double* z, std::size_t n);
  // y = A x for CSR A (n_rows rows); accumulate adds into y instead.
  void (*csr_spmv)(const std::int64_t* offs, const std::int32_t* cols,
                   const double* vals, std::int32_t n_rows, const double* x,
                   double* y, bool accumulate);
  // y[u] = t*deg[u]*x[u] - s*(A x)[u] + shift*x[u]
  void (*interp_apply)(double t, double s, double shift, const double* deg,
                       const std::int64_t* offs, const std::int32_t* cols,
                       const double* vals, std::int32_t n_rows, const double* x,
                       double* y);
  // C(mxn) = A(mxk) * B(kxn)
  void (*gemm_nn)(const double* A, const double* B, double* C, std::size_t m,
                  std::size_t k, std::size_t n, bool accumulate);
  // C(mxn) = A^T * B where A is stored (k x m), B is (k x n)
  void (*gemm_tn)(const double* A, const double* B, double* C, std::size_t m,
                  std::size_t k, std::size_t n, bool accumulate);
  // C(mxn) = A(mxk) * B^T where B is stored (n x k)
  void (*gemm_nt)(const double* A, const double* B, double* C, std::size_t m,
                  std::size_t k, std::size_t n, bool accumulate);
  void (*relu_fwd)(const double* x, double* y, std::size_t n);
  // out = g .* (x > 0); accumulate adds into out.
  void (*relu_bwd)(const double* x, const double* g, double* out,
                   std::size_t n, bool accumulate);
};

const Table& scalar_table();
// nullptr when the binary lacks the AVX2 translation unit or the CPU
// lacks AVX2+FMA.
const Table* avx2_table();

bool avx2_available();
Backend active_backend();
const char* backend_name(Backend b);
// Throws InvalidArgument if the requested backend is unavailable.
void set_backend(Backend b);

// Active kernel table.
const Table& K();

double nrm2(const double* x, std::size_t n);

}  // namespace ile::kernels
