#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ghne/bank.hpp"

namespace ghne {

inline constexpr int kModelFormatVersion = 1;

/// Model files are JSON:
///
///   {
///     "format": "ghn-model",
///     "version": 1,
///     "layers": [
///       {"name": "conv1", "out_filters": 32, "in_channels": 3,
///        "kernel": [5, 5], "stride": [1, 1],          // or "stride": 1
///        "weights": [ ... out*in*prod(kernel) reals, row-major ... ]},
///       {"name": "conv2", ..., "weights_file": "conv2.f64"}
///     ]
///   }
///
/// `weights_file` names a raw little-endian float64 blob, resolved relative
/// to the model file's directory.
Model parse_model(std::string_view text, const std::filesystem::path& base_dir = {});
Model load_model(const std::filesystem::path& path);

/// Serializes with inline weights. Doubles round-trip exactly.
std::string model_to_json(const Model& model);
void save_model(const Model& model, const std::filesystem::path& path);

}  // namespace ghne
