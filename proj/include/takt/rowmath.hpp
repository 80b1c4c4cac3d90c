// Row-local math shared by the training graph and the incremental inference
// path. Both must call these exact routines so teacher-forced and sampled
// logprobs agree bitwise.
#pragma once

#include <cstdint>

namespace takt::row {

double max_val(const double* x, int64_t n);

// Stable softmax; y may alias x.
void softmax(double* y, const double* x, int64_t n);

// Stable log-softmax; y may alias x.
void log_softmax(double* y, const double* x, int64_t n);

// y = gain * (x - mean) / sqrt(var + eps) + bias, population variance.
void layer_norm(double* y, const double* x, const double* gain,
                const double* bias, int64_t n, double eps);

void tanh_vec(double* y, const double* x, int64_t n);

}  // namespace takt::row
