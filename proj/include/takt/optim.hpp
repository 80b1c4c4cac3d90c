// Named parameter store with per-parameter Adam moments.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "takt/array.hpp"
#include "takt/rng.hpp"

namespace takt {

struct Param {
  Array value;
  Array grad;
  Array m;
  Array v;
};

class ParamStore {
 public:
  // Registers a parameter; throws if the name already exists.
  void add(const std::string& name, Array init);

  bool has(const std::string& name) const { return params_.count(name) != 0; }
  Array& value(const std::string& name);
  const Array& value(const std::string& name) const;
  Array& grad(const std::string& name);
  Param& param(const std::string& name);
  const std::map<std::string, Param>& all() const { return params_; }

  // Deterministic order (std::map is sorted by name).
  std::vector<std::string> names() const;

  void zero_grads();

  // Bias-corrected Adam on every parameter, then clears gradients and
  // advances the shared step counter.
  void adam_step(double lr, double beta1 = 0.9, double beta2 = 0.999,
                 double eps = 1e-8);

  int64_t step_count() const { return step_; }
  void set_step_count(int64_t s) { step_ = s; }

  int64_t total_size() const;

  // FNV-1a over the raw value bytes; used by freeze contracts in tests.
  uint64_t value_checksum() const;

  // Gaussian init helper.
  static Array randn(std::vector<int64_t> shape, double stddev, Rng& rng);

 private:
  std::map<std::string, Param> params_;
  int64_t step_ = 0;
};

}  // namespace takt
