// Array container: magic "TAKT", format version, then per-array records
// (name, dtype code, rank, shape, little-endian f64 payload). Round-trips
// must be bit-exact; checkpoints and datasets both use this.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "takt/array.hpp"
#include "takt/optim.hpp"

namespace takt {

using ArrayMap = std::map<std::string, Array>;

void save_arrays(const std::string& path, const ArrayMap& arrays);
ArrayMap load_arrays(const std::string& path);

// ParamStore checkpoint: values plus Adam moments and the step counter, so a
// reloaded store is bit-identical for both inference and resumed training.
void save_store(const std::string& path, const ParamStore& store);
void load_store(const std::string& path, ParamStore& store);

}  // namespace takt
