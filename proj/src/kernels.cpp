// Runtime backend selection for the data-parallel kernels.
#include "takt/kernels.hpp"

#include <stdexcept>

namespace takt::kern {

namespace detail {
void add_scalar(double*, const double*, const double*, int64_t);
void sub_scalar(double*, const double*, const double*, int64_t);
void mul_scalar(double*, const double*, const double*, int64_t);
void scale_scalar(double*, const double*, double, int64_t);
void axpy_scalar(double*, double, const double*, int64_t);
void matmul_scalar(double*, const double*, const double*, int64_t, int64_t,
                   int64_t, bool);
void adam_scalar(double*, double*, double*, const double*, int64_t, double,
                 double, double, double, double, double);
#ifdef TAKT_HAVE_AVX2
void add_avx2(double*, const double*, const double*, int64_t);
void sub_avx2(double*, const double*, const double*, int64_t);
void mul_avx2(double*, const double*, const double*, int64_t);
void scale_avx2(double*, const double*, double, int64_t);
void axpy_avx2(double*, double, const double*, int64_t);
void matmul_avx2(double*, const double*, const double*, int64_t, int64_t,
                 int64_t, bool);
void adam_avx2(double*, double*, double*, const double*, int64_t, double,
               double, double, double, double, double);
#endif
}  // namespace detail

bool avx2_supported() {
#if defined(TAKT_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

namespace {
Backend g_backend = avx2_supported() ? Backend::kAvx2 : Backend::kScalar;
}

Backend active_backend() { return g_backend; }

void set_backend(Backend b) {
  if (b == Backend::kAvx2 && !avx2_supported())
    throw std::runtime_error("kernels: AVX2 backend requested but unsupported");
  g_backend = b;
}

#ifdef TAKT_HAVE_AVX2
#define TAKT_DISPATCH(fn, ...)                   \
  do {                                           \
    if (g_backend == Backend::kAvx2)             \
      detail::fn##_avx2(__VA_ARGS__);            \
    else                                         \
      detail::fn##_scalar(__VA_ARGS__);          \
  } while (0)
#else
#define TAKT_DISPATCH(fn, ...) detail::fn##_scalar(__VA_ARGS__)
#endif

void add(double* dst, const double* a, const double* b, int64_t n) {
  TAKT_DISPATCH(add, dst, a, b, n);
}

void sub(double* dst, const double* a, const double* b, int64_t n) {
  TAKT_DISPATCH(sub, dst, a, b, n);
}

void mul(double* dst, const double* a, const double* b, int64_t n) {
  TAKT_DISPATCH(mul, dst, a, b, n);
}

void scale(double* dst, const double* a, double alpha, int64_t n) {
  TAKT_DISPATCH(scale, dst, a, alpha, n);
}

void axpy(double* y, double alpha, const double* x, int64_t n) {
  TAKT_DISPATCH(axpy, y, alpha, x, n);
}

void matmul(double* c, const double* a, const double* b, int64_t m, int64_t k,
            int64_t n) {
  TAKT_DISPATCH(matmul, c, a, b, m, k, n, false);
}

void matmul_acc(double* c, const double* a, const double* b, int64_t m,
                int64_t k, int64_t n) {
  TAKT_DISPATCH(matmul, c, a, b, m, k, n, true);
}

void transpose(double* dst, const double* src, int64_t rows, int64_t cols) {
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t c = 0; c < cols; ++c) dst[c * rows + r] = src[r * cols + c];
}

void adam_update(double* p, double* m, double* v, const double* g, int64_t n,
                 double lr, double beta1, double beta2, double eps,
                 double inv_bc1, double inv_bc2) {
  TAKT_DISPATCH(adam, p, m, v, g, n, lr, beta1, beta2, eps, inv_bc1, inv_bc2);
}

#undef TAKT_DISPATCH

}  // namespace takt::kern
