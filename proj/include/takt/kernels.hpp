// Data-parallel inner loops behind the tensor ops: scalar reference kernels
// plus AVX2 variants selected at runtime. Both variants perform the same
// per-element operation sequence (AVX2 vectorizes across independent outputs
// only), so results are required to be bitwise identical — the equivalence
// tests assert exactly that.
#pragma once

#include <cstdint>

namespace takt::kern {

enum class Backend { kScalar, kAvx2 };

bool avx2_supported();

// Active backend defaults to the best supported one; tests pin it explicitly.
Backend active_backend();
void set_backend(Backend b);

// dst[i] = a[i] + b[i]
void add(double* dst, const double* a, const double* b, int64_t n);
// dst[i] = a[i] - b[i]
void sub(double* dst, const double* a, const double* b, int64_t n);
// dst[i] = a[i] * b[i]
void mul(double* dst, const double* a, const double* b, int64_t n);
// dst[i] = a[i] * alpha
void scale(double* dst, const double* a, double alpha, int64_t n);
// y[i] += alpha * x[i]
void axpy(double* y, double alpha, const double* x, int64_t n);

// c[M,N] = a[M,K] @ b[K,N]   (row-major)
void matmul(double* c, const double* a, const double* b, int64_t m, int64_t k,
            int64_t n);
// c[M,N] += a[M,K] @ b[K,N]
void matmul_acc(double* c, const double* a, const double* b, int64_t m,
                int64_t k, int64_t n);

// dst[C,R] = src[R,C]^T  (plain data movement, backend-independent)
void transpose(double* dst, const double* src, int64_t rows, int64_t cols);

// Bias-corrected Adam update on one parameter tensor; inv_bc1 = 1/(1-b1^t),
// inv_bc2 = 1/(1-b2^t).
void adam_update(double* p, double* m, double* v, const double* g, int64_t n,
                 double lr, double beta1, double beta2, double eps,
                 double inv_bc1, double inv_bc2);

}  // namespace takt::kern
