// Dense row-major double tensor. Rank is usually 2; higher ranks only pass
// through the checkpoint container.
#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace takt {

struct Array {
  std::vector<int64_t> shape;
  std::vector<double> data;

  Array() = default;
  Array(std::vector<int64_t> s, std::vector<double> d)
      : shape(std::move(s)), data(std::move(d)) {
    if (static_cast<int64_t>(data.size()) != count(shape))
      throw std::invalid_argument("Array: data length does not match shape");
  }

  static int64_t count(const std::vector<int64_t>& shape) {
    int64_t n = 1;
    for (int64_t s : shape) {
      if (s <= 0) throw std::invalid_argument("Array: non-positive dimension");
      n *= s;
    }
    return n;
  }

  static Array zeros(std::vector<int64_t> shape) {
    const int64_t n = count(shape);
    return Array(std::move(shape), std::vector<double>(static_cast<size_t>(n), 0.0));
  }

  static Array full(std::vector<int64_t> shape, double v) {
    const int64_t n = count(shape);
    return Array(std::move(shape), std::vector<double>(static_cast<size_t>(n), v));
  }

  static Array scalar(double v) { return Array({1, 1}, {v}); }

  static Array row(std::vector<double> v) {
    const int64_t n = static_cast<int64_t>(v.size());
    return Array({1, n}, std::move(v));
  }

  int64_t size() const { return static_cast<int64_t>(data.size()); }
  int64_t rows() const { return shape.empty() ? 0 : shape[0]; }
  int64_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }
  bool is_scalar() const { return size() == 1; }

  double& at(int64_t r, int64_t c) { return data[static_cast<size_t>(r * cols() + c)]; }
  double at(int64_t r, int64_t c) const { return data[static_cast<size_t>(r * cols() + c)]; }

  bool same_shape(const Array& o) const { return shape == o.shape; }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

inline std::string shape_str(const Array& a) {
  std::string s = "[";
  for (size_t i = 0; i < a.shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(a.shape[i]);
  }
  return s + "]";
}

}  // namespace takt
