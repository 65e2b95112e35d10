#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ghne/bank.hpp"

namespace ghne {

struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t planes = 1;             // 1 (P5) or 3 (P6)
  std::vector<std::uint8_t> pixels;   // interleaved, row-major
};

Image decode_netpbm(std::string_view bytes);
std::string encode_netpbm(const Image& image);

/// Reads an 8-bit P5/P6 image as a bank of normalized epitomes (p / 255).
/// Grayscale gives filters = 1, colour gives filters = 3 (one per plane);
/// channels = 1 either way.
Bank read_image(const std::filesystem::path& path);
Bank image_to_bank(const Image& image);

struct RenderOptions {
  // Fixed value range mapped to 0..255; per-member min/max when empty.
  std::optional<std::pair<Scalar, Scalar>> bounds;
  // One P6 image per filter from channels 0,1,2 -> R,G,B (requires c == 3).
  bool pseudo_color = false;
  // Render -g/s instead of g/s.
  bool negate = false;
};

// Value range mapped onto 0..255 for one image plane.
struct PlaneScale {
  Scalar lo = 0.0;
  Scalar hi = 0.0;
  bool degenerate = false;  // lo == hi, rendered as constant 128
};

struct RenderedImage {
  std::string file_name;
  Image image;
  std::vector<PlaneScale> scales;  // one per plane
};

/// Renders normalized member values to 8-bit images. Ranks 1 and 2 only.
std::vector<RenderedImage> render_bank(const Bank& bank, const RenderOptions& options);

/// Writes every rendered image plus a `scaling.txt` sidecar into `dir`.
std::vector<std::filesystem::path> write_images(const Bank& bank,
                                                const std::filesystem::path& dir,
                                                const RenderOptions& options = {});

}  // namespace ghne
