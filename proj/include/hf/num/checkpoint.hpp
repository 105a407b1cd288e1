#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "hf/num/mlp.hpp"

namespace hf::num {

// Network file layout (bit-exact across runs):
//   "RGVF" | version 0x01 | u32-le metadata length | UTF-8 JSON metadata |
//   parameters as little-endian f64, per layer weights row-major then biases.
// The metadata always carries layer_sizes and activation (taken from the
// params); callers add seed / config-digest fields.
void save_mlp(const std::filesystem::path& path, const MlpParams& p, nlohmann::json meta);
MlpParams load_mlp(const std::filesystem::path& path, nlohmann::json* meta_out = nullptr);

}  // namespace hf::num
