#include "takt/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "container I/O assumes a little-endian host");

namespace takt {

namespace {

constexpr char kMagic[4] = {'T', 'A', 'K', 'T'};
constexpr uint32_t kVersion = 1;
constexpr uint8_t kDtypeF64 = 0;

void write_u32(std::ostream& os, uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_u64(std::ostream& os, uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint32_t read_u32(std::istream& is) {
  uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

uint64_t read_u64(std::istream& is) {
  uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

void save_arrays(const std::string& path, const ArrayMap& arrays) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("save_arrays: cannot open " + path);
  os.write(kMagic, 4);
  write_u32(os, kVersion);
  write_u32(os, static_cast<uint32_t>(arrays.size()));
  for (const auto& [name, a] : arrays) {
    write_u32(os, static_cast<uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    os.put(static_cast<char>(kDtypeF64));
    write_u32(os, static_cast<uint32_t>(a.shape.size()));
    for (int64_t d : a.shape) write_u64(os, static_cast<uint64_t>(d));
    os.write(reinterpret_cast<const char*>(a.data.data()),
             static_cast<std::streamsize>(a.data.size() * sizeof(double)));
  }
  if (!os) throw std::runtime_error("save_arrays: write failed for " + path);
}

ArrayMap load_arrays(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_arrays: cannot open " + path);
  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("load_arrays: bad magic in " + path);
  const uint32_t version = read_u32(is);
  if (version != kVersion)
    throw std::runtime_error("load_arrays: unsupported version in " + path);
  const uint32_t count = read_u32(is);
  ArrayMap out;
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t name_len = read_u32(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    const int dtype = is.get();
    if (dtype != kDtypeF64)
      throw std::runtime_error("load_arrays: unsupported dtype in " + path);
    const uint32_t rank = read_u32(is);
    std::vector<int64_t> shape(rank);
    for (uint32_t r = 0; r < rank; ++r) shape[r] = static_cast<int64_t>(read_u64(is));
    Array a = Array::zeros(shape);
    is.read(reinterpret_cast<char*>(a.data.data()),
            static_cast<std::streamsize>(a.data.size() * sizeof(double)));
    if (!is) throw std::runtime_error("load_arrays: truncated file " + path);
    out.emplace(std::move(name), std::move(a));
  }
  return out;
}

void save_store(const std::string& path, const ParamStore& store) {
  ArrayMap arrays;
  for (const auto& [name, p] : store.all()) {
    arrays.emplace(name, p.value);
    arrays.emplace(name + ".adam_m", p.m);
    arrays.emplace(name + ".adam_v", p.v);
  }
  arrays.emplace("_step", Array::scalar(static_cast<double>(store.step_count())));
  save_arrays(path, arrays);
}

void load_store(const std::string& path, ParamStore& store) {
  ArrayMap arrays = load_arrays(path);
  auto step_it = arrays.find("_step");
  if (step_it == arrays.end())
    throw std::runtime_error("load_store: missing _step in " + path);
  store.set_step_count(static_cast<int64_t>(step_it->second.data[0]));
  for (const auto& name : store.names()) {
    auto v = arrays.find(name);
    auto m = arrays.find(name + ".adam_m");
    auto vv = arrays.find(name + ".adam_v");
    if (v == arrays.end() || m == arrays.end() || vv == arrays.end())
      throw std::runtime_error("load_store: missing parameter " + name);
    Param& p = store.param(name);
    if (v->second.shape != p.value.shape)
      throw std::runtime_error("load_store: shape mismatch for " + name);
    p.value = v->second;
    p.m = m->second;
    p.v = vv->second;
    p.grad.fill(0.0);
  }
}

}  // namespace takt
