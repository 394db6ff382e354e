#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "forestmap/raster.hpp"

namespace forestmap {

/// Flat-kernel joint spatial/range mean-shift settings.
///
/// `range_radius` is in normalized [0, 1] units. Radii quoted for 8-bit
/// imagery (e.g. "range radius 5") must be divided by 255 first; see
/// `range_radius_from_8bit`.
struct MeanShiftParams {
  double spatial_radius = 5.0;
  double range_radius = 5.0 / 255.0;
  int min_segment_size = 100;
  int max_iterations = 100;
  double convergence_eps = 1e-3;

  void validate() const;
};

constexpr double range_radius_from_8bit(double radius) noexcept { return radius / 255.0; }

using LabelGrid = RowMajorMatrix<std::int32_t>;

/// Dense per-pixel segment ids in [0, segment_count), numbered in raster-scan
/// order of first appearance.
struct SegmentMap {
  int width = 0;
  int height = 0;
  LabelGrid labels;  // height x width
  int segment_count = 0;
  std::vector<std::int64_t> segment_sizes;

  /// Renumbers arbitrary non-negative ids densely in raster-scan order.
  static SegmentMap from_labels(const LabelGrid& labels);

  std::int32_t operator[](Eigen::Index i) const { return labels.data()[i]; }
  Eigen::Index pixel_count() const noexcept { return labels.size(); }
};

/// Moves every pixel's (x, y, spectrum) point to the mean of the samples
/// inside its spatial disc and spectral ball until the joint shift drops
/// below `convergence_eps`, and returns the converged spectra. The joint
/// shift measures spatial motion in spectral units (scaled by h_r / h_s).
///
/// Rows are processed on up to `threads` workers (0 = hardware
/// concurrency); the result does not depend on the worker count.
Raster mean_shift_filter(const Raster& img, const MeanShiftParams& params, int threads = 0);

/// 4-connected components of pixels whose filtered spectra lie within
/// `range_radius` of each other.
SegmentMap label_modes(const Raster& filtered, const MeanShiftParams& params);

/// Repeatedly folds the lowest-numbered undersized segment into the adjacent
/// segment with the closest mean spectrum (ties go to the lower id) until all
/// segments reach `min_segment_size` or a single segment is left.
SegmentMap merge_small_segments(const SegmentMap& seg, const Raster& filtered,
                                const MeanShiftParams& params);

/// filter -> label -> merge.
SegmentMap segment(const Raster& img, const MeanShiftParams& params, int threads = 0);

/// Single-band 32-bit unsigned GeoTIFF of segment ids.
void write_segment_map(const SegmentMap& seg, const std::optional<Geotransform>& geotransform,
                       const std::filesystem::path& path);
SegmentMap read_segment_map(const std::filesystem::path& path);

}  // namespace forestmap
