#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "forestmap/raster.hpp"

namespace forestmap::tiff {

enum class SampleType { UInt8, UInt16, UInt32, Float32 };

/// Decoded baseline (Geo)TIFF. Samples are widened to double, which holds
/// every supported sample type exactly, and stored pixel-interleaved.
struct Image {
  int width = 0;
  int height = 0;
  int bands = 0;
  SampleType type = SampleType::UInt8;
  std::vector<double> samples;
  std::optional<double> nodata;
  std::optional<Geotransform> geotransform;
};

enum class Compression { None, Deflate };
enum class Layout { Strips, Tiles };

struct WriteOptions {
  Compression compression = Compression::None;
  Layout layout = Layout::Strips;
  int tile_size = 16;     // multiple of 16
  int rows_per_strip = 0; // 0 picks ~8 KiB strips
  bool planar = false;
  bool big_endian = false;
};

Image decode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode(const Image& image, const WriteOptions& options = {});

Image read(const std::filesystem::path& path);
void write(const std::filesystem::path& path, const Image& image, const WriteOptions& options = {});

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace forestmap::tiff
