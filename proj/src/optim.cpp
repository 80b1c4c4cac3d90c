#include "takt/optim.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "takt/kernels.hpp"

namespace takt {

void ParamStore::add(const std::string& name, Array init) {
  if (params_.count(name))
    throw std::invalid_argument("ParamStore: duplicate parameter " + name);
  Param p;
  p.grad = Array::zeros(init.shape);
  p.m = Array::zeros(init.shape);
  p.v = Array::zeros(init.shape);
  p.value = std::move(init);
  params_.emplace(name, std::move(p));
}

Array& ParamStore::value(const std::string& name) { return param(name).value; }

const Array& ParamStore::value(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end())
    throw std::invalid_argument("ParamStore: unknown parameter " + name);
  return it->second.value;
}

Array& ParamStore::grad(const std::string& name) { return param(name).grad; }

Param& ParamStore::param(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end())
    throw std::invalid_argument("ParamStore: unknown parameter " + name);
  return it->second;
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& [name, p] : params_) out.push_back(name);
  return out;
}

void ParamStore::zero_grads() {
  for (auto& [name, p] : params_) p.grad.fill(0.0);
}

void ParamStore::adam_step(double lr, double beta1, double beta2, double eps) {
  ++step_;
  const double inv_bc1 = 1.0 / (1.0 - std::pow(beta1, static_cast<double>(step_)));
  const double inv_bc2 = 1.0 / (1.0 - std::pow(beta2, static_cast<double>(step_)));
  for (auto& [name, p] : params_) {
    kern::adam_update(p.value.data.data(), p.m.data.data(), p.v.data.data(),
                      p.grad.data.data(), p.value.size(), lr, beta1, beta2, eps,
                      inv_bc1, inv_bc2);
    p.grad.fill(0.0);
  }
}

int64_t ParamStore::total_size() const {
  int64_t n = 0;
  for (const auto& [name, p] : params_) n += p.value.size();
  return n;
}

uint64_t ParamStore::value_checksum() const {
  uint64_t h = 1469598103934665603ULL;
  auto feed = [&h](const void* data, size_t bytes) {
    const unsigned char* b = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < bytes; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& [name, p] : params_) {
    feed(name.data(), name.size());
    feed(p.value.data.data(), p.value.data.size() * sizeof(double));
  }
  return h;
}

Array ParamStore::randn(std::vector<int64_t> shape, double stddev, Rng& rng) {
  Array a = Array::zeros(std::move(shape));
  for (double& v : a.data) v = stddev * rng.normal();
  return a;
}

}  // namespace takt
