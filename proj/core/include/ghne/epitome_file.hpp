#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "ghne/bank.hpp"

namespace ghne {

/// GHNE binary bank format, little-endian throughout:
///
///   "GHNE"            4 bytes magic
///   version           u32 (= 1)
///   filters, channels u64, u64
///   rank              u32
///   extents           rank x u64
///   entries           per member [m][c], row-major: (g f64, s u64)
inline constexpr std::uint32_t kEpitomeFormatVersion = 1;

std::string encode_epitome(const Bank& bank);
Bank decode_epitome(std::string_view bytes);

void save_epitome(const Bank& bank, const std::filesystem::path& path);
void save_epitome(const DeepEpitome& deep, const std::filesystem::path& path);
Bank load_epitome(const std::filesystem::path& path);

}  // namespace ghne
