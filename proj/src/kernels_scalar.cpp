// Reference kernels. These define the numeric contract; the SIMD variants
// must reproduce them bit for bit.
#include "takt/kernels.hpp"

#include <cmath>

namespace takt::kern::detail {

void add_scalar(double* dst, const double* a, const double* b, int64_t n) {
  for (int64_t i = 0; i < n; ++i) dst[i] = a[i] + b[i];
}

void sub_scalar(double* dst, const double* a, const double* b, int64_t n) {
  for (int64_t i = 0; i < n; ++i) dst[i] = a[i] - b[i];
}

void mul_scalar(double* dst, const double* a, const double* b, int64_t n) {
  for (int64_t i = 0; i < n; ++i) dst[i] = a[i] * b[i];
}

void scale_scalar(double* dst, const double* a, double alpha, int64_t n) {
  for (int64_t i = 0; i < n; ++i) dst[i] = a[i] * alpha;
}

void axpy_scalar(double* y, double alpha, const double* x, int64_t n) {
  for (int64_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

// Accumulation runs over k in index order for every output element.
void matmul_scalar(double* c, const double* a, const double* b, int64_t m,
                   int64_t k, int64_t n, bool accumulate) {
  for (int64_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    if (!accumulate) {
      for (int64_t j = 0; j < n; ++j) ci[j] = 0.0;
    }
    for (int64_t kk = 0; kk < k; ++kk) {
      const double aik = ai[kk];
      const double* bk = b + kk * n;
      for (int64_t j = 0; j < n; ++j) ci[j] = ci[j] + aik * bk[j];
    }
  }
}

void adam_scalar(double* p, double* m, double* v, const double* g, int64_t n,
                 double lr, double beta1, double beta2, double eps,
                 double inv_bc1, double inv_bc2) {
  const double one_m_b1 = 1.0 - beta1;
  const double one_m_b2 = 1.0 - beta2;
  for (int64_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + one_m_b1 * g[i];
    v[i] = beta2 * v[i] + one_m_b2 * (g[i] * g[i]);
    const double mhat = m[i] * inv_bc1;
    const double vhat = v[i] * inv_bc2;
    p[i] = p[i] - lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace takt::kern::detail
