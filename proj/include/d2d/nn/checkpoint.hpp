#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "d2d/nn/tensor.hpp"

namespace d2d::nn {

// Free-form checkpoint metadata (seed, config digest, epoch, ...).
// Values are stored as strings; numeric fields are formatted by the caller.
using CheckpointMeta = std::map<std::string, std::string>;

// JSON checkpoint, bit-exact round trip for all tensor values.
void save_params(const ParamSet& params, const CheckpointMeta& meta,
                 const std::string& path);

struct Checkpoint {
    ParamSet params;
    CheckpointMeta meta;
};

Checkpoint load_params(const std::string& path);

}  // namespace d2d::nn
