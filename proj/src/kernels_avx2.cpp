// AVX2 variants. Vectorization is across independent output elements (the j
// dimension for matmul, element index otherwise); per-element accumulation
// order is identical to the scalar kernels. Compiled with -mavx2 but without
// FMA so mul+add rounding matches the scalar path.
#include "takt/kernels.hpp"

#ifdef TAKT_HAVE_AVX2

#include <immintrin.h>

namespace takt::kern::detail {

void add_avx2(double* dst, const double* a, const double* b, int64_t n) {
  int64_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) dst[i] = a[i] + b[i];
}

void sub_avx2(double* dst, const double* a, const double* b, int64_t n) {
  int64_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(dst + i, _mm256_sub_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) dst[i] = a[i] - b[i];
}

void mul_avx2(double* dst, const double* a, const double* b, int64_t n) {
  int64_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) dst[i] = a[i] * b[i];
}

void scale_avx2(double* dst, const double* a, double alpha, int64_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  int64_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), va));
  }
  for (; i < n; ++i) dst[i] = a[i] * alpha;
}

void axpy_avx2(double* y, double alpha, const double* x, int64_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  int64_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void matmul_avx2(double* c, const double* a, const double* b, int64_t m,
                 int64_t k, int64_t n, bool accumulate) {
  for (int64_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    if (!accumulate) {
      for (int64_t j = 0; j < n; ++j) ci[j] = 0.0;
    }
    for (int64_t kk = 0; kk < k; ++kk) {
      const __m256d aik = _mm256_set1_pd(ai[kk]);
      const double* bk = b + kk * n;
      int64_t j = 0;
      for (; j + 4 <= n; j += 4) {
        const __m256d prod = _mm256_mul_pd(aik, _mm256_loadu_pd(bk + j));
        _mm256_storeu_pd(ci + j, _mm256_add_pd(_mm256_loadu_pd(ci + j), prod));
      }
      const double aik_s = ai[kk];
      for (; j < n; ++j) ci[j] = ci[j] + aik_s * bk[j];
    }
  }
}

void adam_avx2(double* p, double* m, double* v, const double* g, int64_t n,
               double lr, double beta1, double beta2, double eps,
               double inv_bc1, double inv_bc2) {
  const __m256d vb1 = _mm256_set1_pd(beta1);
  const __m256d vb2 = _mm256_set1_pd(beta2);
  const __m256d v1mb1 = _mm256_set1_pd(1.0 - beta1);
  const __m256d v1mb2 = _mm256_set1_pd(1.0 - beta2);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d vibc1 = _mm256_set1_pd(inv_bc1);
  const __m256d vibc2 = _mm256_set1_pd(inv_bc2);
  int64_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gi = _mm256_loadu_pd(g + i);
    __m256d mi = _mm256_loadu_pd(m + i);
    __m256d vi = _mm256_loadu_pd(v + i);
    mi = _mm256_add_pd(_mm256_mul_pd(vb1, mi), _mm256_mul_pd(v1mb1, gi));
    vi = _mm256_add_pd(_mm256_mul_pd(vb2, vi),
                       _mm256_mul_pd(v1mb2, _mm256_mul_pd(gi, gi)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d mhat = _mm256_mul_pd(mi, vibc1);
    const __m256d vhat = _mm256_mul_pd(vi, vibc2);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(vlr, mhat), denom);
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
  }
  if (i < n) {
    const double one_m_b1 = 1.0 - beta1;
    const double one_m_b2 = 1.0 - beta2;
    for (; i < n; ++i) {
      m[i] = beta1 * m[i] + one_m_b1 * g[i];
      v[i] = beta2 * v[i] + one_m_b2 * (g[i] * g[i]);
      const double mhat = m[i] * inv_bc1;
      const double vhat = v[i] * inv_bc2;
      p[i] = p[i] - lr * mhat / (__builtin_sqrt(vhat) + eps);
    }
  }
}

}  // namespace takt::kern::detail

#endif  // TAKT_HAVE_AVX2
