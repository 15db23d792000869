#pragma once

#include <string>
#include <utility>
#include <vector>

#include "specml/tensor.hpp"

namespace specml {

/// Checkpoint container, little-endian binary:
///   magic "SPECMLCK" | u32 version | u32 len + config JSON |
///   u32 count | per array: u32 len + name, u32 dims/nx/ny/channels,
///   f64 values | u32 crc32 of everything after the magic.
struct Checkpoint {
    std::string config_json;
    std::vector<std::pair<std::string, Tensor>> arrays;

    const Tensor* find(const std::string& name) const;
};

void save_checkpoint(
    const std::string& path, const std::string& config_json,
    const std::vector<std::pair<std::string, const Tensor*>>& arrays);

/// Throws: "not a checkpoint file" (bad magic), "unsupported checkpoint
/// version", "checkpoint corrupt" (checksum or truncation).
Checkpoint load_checkpoint(const std::string& path);

}  // namespace specml
