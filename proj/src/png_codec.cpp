#include <cstring>
#include <string>

#include <png.h>

#include "forestmap/error.hpp"
#include "forestmap/png.hpp"

namespace forestmap::png {

namespace {
constexpr std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
}

bool is_png(std::span<const std::uint8_t> bytes) noexcept {
  return bytes.size() >= 8 && std::memcmp(bytes.data(), kSignature, 8) == 0;
}

Image decode_gray8(std::span<const std::uint8_t> bytes) {
  if (!is_png(bytes)) throw Error(Errc::UnsupportedFormat, "not a PNG file");
  // IHDR is always the first chunk: length(4) type(4) width(4) height(4) depth(1) color(1).
  if (bytes.size() < 33 || std::memcmp(bytes.data() + 12, "IHDR", 4) != 0) {
    throw Error(Errc::CorruptRaster, "PNG without IHDR");
  }
  const int bit_depth = bytes[24];
  const int color_type = bytes[25];
  if (bit_depth != 8 || color_type != 0) {
    throw Error(Errc::UnsupportedFormat, "PNG masks must be 8-bit grayscale (depth " +
                                             std::to_string(bit_depth) + ", color type " +
                                             std::to_string(color_type) + ")");
  }

  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(Errc::CorruptRaster, image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  Image out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(Errc::CorruptRaster, msg);
  }
  return out;
}

std::vector<std::uint8_t> encode(const Image& img) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  switch (img.channels) {
    case 1: image.format = PNG_FORMAT_GRAY; break;
    case 2: image.format = PNG_FORMAT_GA; break;
    case 3: image.format = PNG_FORMAT_RGB; break;
    case 4: image.format = PNG_FORMAT_RGBA; break;
    default: throw Error(Errc::InvalidArgument, "PNG channels must be 1..4");
  }
  if (img.pixels.size() != static_cast<std::size_t>(img.width) * img.height * img.channels) {
    throw Error(Errc::InvalidArgument, "PNG pixel buffer size mismatch");
  }
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.pixels.data(), 0, nullptr)) {
    throw Error(Errc::IoError, image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.pixels.data(), 0, nullptr)) {
    throw Error(Errc::IoError, image.message);
  }
  out.resize(size);
  return out;
}

}  // namespace forestmap::png
