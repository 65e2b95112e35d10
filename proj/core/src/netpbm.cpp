#include "ghne/netpbm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "ghne/csv.hpp"
#include "ghne/error.hpp"
#include "ghne/file_io.hpp"

namespace ghne {
namespace {

[[noreturn]] void fail(FormatError::Kind kind, const std::string& what) {
  throw FormatError(kind, "image: " + what);
}

class HeaderParser {
 public:
  explicit HeaderParser(std::string_view bytes) : bytes_(bytes) {}

  std::size_t next_number(const char* field) {
    skip_space_and_comments();
    std::size_t value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      if (++digits > 9) fail(FormatError::Kind::kInvalidHeader, std::string(field) + " too large");
      ++pos_;
    }
    if (digits == 0) fail(FormatError::Kind::kInvalidHeader, std::string("missing ") + field);
    return value;
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      fail(FormatError::Kind::kInvalidHeader, "missing separator before pixel data");
    }
    return pos_ + 1;
  }

  void skip(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::uint8_t to_pixel(Scalar v, const PlaneScale& scale) {
  if (scale.degenerate) return 128;
  const Scalar t = (v - scale.lo) / (scale.hi - scale.lo) * 255.0;
  return static_cast<std::uint8_t>(std::lround(std::clamp(t, 0.0, 255.0)));
}

PlaneScale scale_for(std::span<const Scalar> values,
                     const std::optional<std::pair<Scalar, Scalar>>& bounds) {
  PlaneScale scale;
  if (bounds) {
    scale.lo = bounds->first;
    scale.hi = bounds->second;
  } else {
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    scale.lo = *mn;
    scale.hi = *mx;
  }
  scale.degenerate = !(scale.lo < scale.hi);
  return scale;
}

std::vector<Scalar> member_values(const Epitome& e, bool negate) {
  std::vector<Scalar> values(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) values[i] = negate ? -e.mean(i) : e.mean(i);
  return values;
}

std::string numbered(char prefix, std::size_t value, int width) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%c%0*zu", prefix, width, value);
  return buffer;
}

}  // namespace

Image decode_netpbm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    fail(FormatError::Kind::kUnsupportedImage, "only binary PGM (P5) and PPM (P6) are supported");
  }
  HeaderParser header(bytes);
  header.skip(2);
  Image image;
  image.planes = bytes[1] == '5' ? 1 : 3;
  image.width = header.next_number("width");
  image.height = header.next_number("height");
  const std::size_t maxval = header.next_number("maxval");
  if (image.width == 0 || image.height == 0) fail(FormatError::Kind::kInvalidHeader, "zero size");
  if (maxval != 255) {
    fail(FormatError::Kind::kUnsupportedImage,
         "maxval " + std::to_string(maxval) + " unsupported (8-bit 255 only)");
  }
  const std::size_t offset = header.raster_offset();
  const std::size_t needed = image.width * image.height * image.planes;
  if (bytes.size() - offset < needed) fail(FormatError::Kind::kTruncated, "truncated pixel data");
  image.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                      bytes.begin() + static_cast<std::ptrdiff_t>(offset + needed));
  return image;
}

std::string encode_netpbm(const Image& image) {
  if (image.planes != 1 && image.planes != 3) throw InvalidArgument("image needs 1 or 3 planes");
  if (image.pixels.size() != image.width * image.height * image.planes) {
    throw InvalidArgument("pixel buffer does not match image size");
  }
  std::string out = std::string(image.planes == 1 ? "P5" : "P6") + "\n" +
                    std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(image.pixels.begin(), image.pixels.end());
  return out;
}

Bank image_to_bank(const Image& image) {
  const Shape shape{image.height, image.width};
  const std::size_t pixels = image.width * image.height;
  std::vector<Epitome> planes;
  for (std::size_t p = 0; p < image.planes; ++p) {
    std::vector<Scalar> values(pixels);
    for (std::size_t i = 0; i < pixels; ++i) {
      values[i] = static_cast<Scalar>(image.pixels[i * image.planes + p]) / 255.0;
    }
    planes.push_back(Epitome::normalized(shape, std::move(values)));
  }
  return Bank(image.planes, 1, std::move(planes));
}

Bank read_image(const std::filesystem::path& path) {
  return image_to_bank(decode_netpbm(read_file(path)));
}

std::vector<RenderedImage> render_bank(const Bank& bank, const RenderOptions& options) {
  const Shape& shape = bank.shape();
  if (shape.rank() > 2) {
    throw InvalidArgument("cannot render rank-" + std::to_string(shape.rank()) + " epitomes");
  }
  const std::size_t height = shape.rank() == 2 ? shape.extent(0) : 1;
  const std::size_t width = shape.extent(shape.rank() - 1);

  std::vector<RenderedImage> out;
  if (options.pseudo_color) {
    if (bank.channels() != 3) {
      throw InvalidArgument("pseudo-color rendering needs 3 channels, bank has " +
                            std::to_string(bank.channels()));
    }
    for (std::size_t m = 0; m < bank.filters(); ++m) {
      RenderedImage rendered;
      rendered.file_name = numbered('f', m, 3) + "_rgb.ppm";
      rendered.image = Image{width, height, 3, std::vector<std::uint8_t>(width * height * 3)};
      for (std::size_t c = 0; c < 3; ++c) {
        const auto values = member_values(bank.member(m, c), options.negate);
        const PlaneScale scale = scale_for(values, options.bounds);
        for (std::size_t i = 0; i < values.size(); ++i) {
          rendered.image.pixels[i * 3 + c] = to_pixel(values[i], scale);
        }
        rendered.scales.push_back(scale);
      }
      out.push_back(std::move(rendered));
    }
    return out;
  }

  for (std::size_t m = 0; m < bank.filters(); ++m) {
    for (std::size_t c = 0; c < bank.channels(); ++c) {
      const auto values = member_values(bank.member(m, c), options.negate);
      const PlaneScale scale = scale_for(values, options.bounds);
      RenderedImage rendered;
      rendered.file_name = numbered('f', m, 3) + "_" + numbered('c', c, 2) + ".pgm";
      rendered.image = Image{width, height, 1, std::vector<std::uint8_t>(values.size())};
      for (std::size_t i = 0; i < values.size(); ++i) {
        rendered.image.pixels[i] = to_pixel(values[i], scale);
      }
      rendered.scales.push_back(scale);
      out.push_back(std::move(rendered));
    }
  }
  return out;
}

std::vector<std::filesystem::path> write_images(const Bank& bank,
                                                const std::filesystem::path& dir,
                                                const RenderOptions& options) {
  const auto rendered = render_bank(bank, options);
  std::filesystem::create_directories(dir);

  std::string sidecar = "file,plane,lo,hi,note\n";
  std::vector<std::filesystem::path> written;
  for (const auto& r : rendered) {
    const auto path = dir / r.file_name;
    write_file_atomic(path, encode_netpbm(r.image));
    written.push_back(path);
    for (std::size_t p = 0; p < r.scales.size(); ++p) {
      const auto& s = r.scales[p];
      sidecar += r.file_name + ',' + std::to_string(p) + ',' + format_scalar(s.lo) + ',' +
                 format_scalar(s.hi) + ',' + (s.degenerate ? "degenerate:constant-128" : "") +
                 '\n';
    }
  }
  const auto sidecar_path = dir / "scaling.txt";
  write_file_atomic(sidecar_path, sidecar);
  written.push_back(sidecar_path);
  return written;
}

}  // namespace ghne
