#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "big2/nn/adam.hpp"
#include "big2/nn/network.hpp"

namespace big2::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// On-disk layout (all integers little-endian):
//   char[8]  magic "BIG2CKPT"
//   u32      format version
//   u64      network config hash
//   u32 n, n bytes   canonical network config string
//   u32      tensor count; per tensor: u32 name length, name bytes, u32 rows, u32 cols
//   u8       1 if optimizer moments follow the weights, else 0
//   i64      optimizer step count (0 when absent)
//   u32 n, n bytes   free-form metadata (JSON text)
//   f32[]    weights, tensor by tensor in header order
//   f32[]    Adam first moments, then second moments (same order), if present
struct Checkpoint {
  Parameters<float> params;
  std::optional<Adam> optimizer;
  std::string metadata;
};

void save_checkpoint(const std::string& path, const Parameters<float>& params,
                     const Adam* optimizer = nullptr, const std::string& metadata = "{}");

// Throws ConfigError on a malformed file, a version mismatch or a config
// hash that does not match the stored config.
Checkpoint load_checkpoint(const std::string& path);

// Also checks that the stored network config equals `expected`.
Checkpoint load_checkpoint(const std::string& path, const NetworkConfig& expected);

NetworkConfig parse_canonical_config(const std::string& canonical);

}  // namespace big2::nn
