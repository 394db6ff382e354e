#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace forestmap::png {

/// 8-bit image with `channels` interleaved samples per pixel.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;
};

bool is_png(std::span<const std::uint8_t> bytes) noexcept;

/// Decodes an 8-bit single-channel grayscale PNG. Palette, color, alpha and
/// non-8-bit files are rejected with UnsupportedFormat.
Image decode_gray8(std::span<const std::uint8_t> bytes);

/// Encodes 1 (gray), 2 (gray+alpha), 3 (RGB) or 4 (RGBA) channels at 8 bits.
std::vector<std::uint8_t> encode(const Image& image);

}  // namespace forestmap::png
