#include "takt/rowmath.hpp"

#include <cmath>

namespace takt::row {

double max_val(const double* x, int64_t n) {
  double m = x[0];
  for (int64_t i = 1; i < n; ++i)
    if (x[i] > m) m = x[i];
  return m;
}

void softmax(double* y, const double* x, int64_t n) {
  const double m = max_val(x, n);
  double s = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    y[i] = std::exp(x[i] - m);
    s += y[i];
  }
  const double inv = 1.0 / s;
  for (int64_t i = 0; i < n; ++i) y[i] *= inv;
}

void log_softmax(double* y, const double* x, int64_t n) {
  const double m = max_val(x, n);
  double s = 0.0;
  for (int64_t i = 0; i < n; ++i) s += std::exp(x[i] - m);
  const double lse = std::log(s);
  for (int64_t i = 0; i < n; ++i) y[i] = x[i] - m - lse;
}

void layer_norm(double* y, const double* x, const double* gain,
                const double* bias, int64_t n, double eps) {
  double mean = 0.0;
  for (int64_t i = 0; i < n; ++i) mean += x[i];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const double d = x[i] - mean;
    var += d * d;
  }
  var /= static_cast<double>(n);
  const double inv = 1.0 / std::sqrt(var + eps);
  for (int64_t i = 0; i < n; ++i) y[i] = gain[i] * ((x[i] - mean) * inv) + bias[i];
}

void tanh_vec(double* y, const double* x, int64_t n) {
  for (int64_t i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
}

}  // namespace takt::row
