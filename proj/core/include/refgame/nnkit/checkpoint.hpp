#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "refgame/nnkit/tensor.hpp"

namespace rg::nn {

// Checkpoint container: magic "RGTM", format version u32, role tag, then one
// record per parameter (name length + UTF-8 name + rank + dims + little-endian
// 32-bit floats). Round trips are bit-exact.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  std::uint32_t version = 0;
  std::string role;
};

// Writes to a temp file and renames into place.
void save_checkpoint(const ParamStore& params, const std::string& path, std::string_view role);

// Loads into an existing store; every record must match an existing tensor's
// name and shape, and the record count must equal the store's tensor count.
// Throws rg::ConfigError on structural mismatch.
CheckpointMeta load_checkpoint(ParamStore& params, const std::string& path);

CheckpointMeta read_checkpoint_meta(const std::string& path);

// FNV-1a 64-bit hash of a file's bytes; used as dataset/artifact fingerprint.
std::uint64_t file_fingerprint(const std::string& path);

}  // namespace rg::nn
