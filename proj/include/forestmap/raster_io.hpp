#pragma once

#include <filesystem>
#include <optional>

#include "forestmap/raster.hpp"
#include "forestmap/tiff.hpp"

namespace forestmap {

/// Reads a 1-, 3- or 4-band GeoTIFF of 8/16-bit unsigned or 32-bit float
/// samples. Band order, nodata and geotransform are kept as stored.
Raster read_image(const std::filesystem::path& path);

/// Reads a single-band PNG or GeoTIFF mask. Stored {1,2} becomes {0,1};
/// stored {0,1} passes through. A mask holding only 1s is read as all
/// forest, only 2s as all forest.
LabelMask read_mask(const std::filesystem::path& path);

/// Reads a single-band probability raster. Values within 1e-3 of [0, 1] are
/// clamped into it; anything further out is an OutOfRange error.
Heatmap read_heatmap(const std::filesystem::path& path);

/// Single-band 8-bit GeoTIFF holding 0/1.
void write_binary_map(const LabelMask& map, const std::optional<Geotransform>& geotransform,
                      const std::filesystem::path& path);

void write_image(const Raster& img, const std::filesystem::path& path,
                 tiff::SampleType type = tiff::SampleType::Float32,
                 const tiff::WriteOptions& options = {});

void write_heatmap(const Heatmap& heat, const std::optional<Geotransform>& geotransform,
                   const std::filesystem::path& path);

/// Decoding helpers shared by the file readers.
LabelMask mask_from_values(int width, int height, const std::vector<double>& values);
Heatmap heatmap_from_values(int width, int height, const std::vector<double>& values);

}  // namespace forestmap
