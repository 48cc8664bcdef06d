#include "ile/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

#include "ile/errors.hpp"

namespace ile::kernels {

#if defined(ILE_HAVE_AVX2_TU)
const Table* avx2_table_impl();  // defined in kernels_avx2.cpp
#endif

bool avx2_available() {
#if defined(ILE_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table* avx2_table() {
#if defined(ILE_HAVE_AVX2_TU)
  if (avx2_available()) return avx2_table_impl();
#endif
  return nullptr;
}

namespace {

const Table* pick_initial() {
  if (const char* env = std::getenv("ILE_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_table();
    if (std::strcmp(env, "avx2") == 0) {
      if (const Table* t = avx2_table()) return t;
      throw InvalidArgument("ILE_KERNELS=avx2 but AVX2 is unavailable");
    }
    // anything else (e.g. "auto") falls through to detection
  }
  if (const Table* t = avx2_table()) return t;
  return &scalar_table();
}

const Table*& active_slot() {
  static const Table* active = pick_initial();
  return active;
}

}  // namespace

const Table& K() { return *active_slot(); }

Backend active_backend() {
  return active_slot() == &scalar_table() ? Backend::Scalar : Backend::Avx2;
}

const char* backend_name(Backend b) {
  return b == Backend::Scalar ? "scalar" : "avx2";
}

void set_backend(Backend b) {
  if (b == Backend::Scalar) {
    active_slot() = &scalar_table();
    return;
  }
  const Table* t = avx2_table();
  if (!t) throw InvalidArgument("requested kernel backend avx2 is unavailable");
  active_slot() = t;
}

double nrm2(const double* x, std::size_t n) {
  return std::sqrt(K().dot(x, x, n));
}

}  // namespace ile::kernels
