#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include <Eigen/Core>

namespace forestmap {

template <typename Scalar>
using RowMajorMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One row per pixel in raster-scan order, one column per band.
using SampleMatrix = RowMajorMatrix<float>;

/// Affine pixel-to-world coefficients in GDAL order. Carried, never interpreted.
using Geotransform = std::array<double, 6>;

/// Multiband grid of 32-bit samples, pixel-interleaved, top-left origin.
///
/// Non-nodata samples are always finite; construction validates that and the
/// shape. A NaN nodata value matches NaN samples.
class Raster {
 public:
  Raster(int width, int height, SampleMatrix samples, std::optional<float> nodata = std::nullopt,
         std::optional<Geotransform> geotransform = std::nullopt);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int bands() const noexcept { return static_cast<int>(samples_.cols()); }
  Eigen::Index pixel_count() const noexcept { return samples_.rows(); }

  const SampleMatrix& samples() const noexcept { return samples_; }
  float at(int x, int y, int band) const { return samples_(index(x, y), band); }
  Eigen::Index index(int x, int y) const noexcept {
    return static_cast<Eigen::Index>(y) * width_ + x;
  }

  const std::optional<float>& nodata() const noexcept { return nodata_; }
  bool is_nodata(float v) const noexcept;
  const std::optional<Geotransform>& geotransform() const noexcept { return geotransform_; }

 private:
  int width_;
  int height_;
  SampleMatrix samples_;
  std::optional<float> nodata_;
  std::optional<Geotransform> geotransform_;
};

/// Binary ground truth or prediction: 0 = non-forest, 1 = forest.
class LabelMask {
 public:
  using Grid = RowMajorMatrix<std::uint8_t>;

  /// `labels` is height x width; throws InvalidLabels on values other than 0/1.
  explicit LabelMask(Grid labels);
  LabelMask(int width, int height, std::uint8_t fill = 0);

  int width() const noexcept { return static_cast<int>(labels_.cols()); }
  int height() const noexcept { return static_cast<int>(labels_.rows()); }
  Eigen::Index size() const noexcept { return labels_.size(); }
  const Grid& labels() const noexcept { return labels_; }
  std::uint8_t operator()(int x, int y) const { return labels_(y, x); }
  std::uint8_t operator[](Eigen::Index i) const { return labels_.data()[i]; }

 private:
  Grid labels_;
};

/// Per-pixel forest probability in [0, 1].
class Heatmap {
 public:
  using Grid = RowMajorMatrix<float>;

  /// `prob` is height x width; throws OutOfRange on values outside [0, 1].
  explicit Heatmap(Grid prob);

  int width() const noexcept { return static_cast<int>(prob_.cols()); }
  int height() const noexcept { return static_cast<int>(prob_.rows()); }
  const Grid& prob() const noexcept { return prob_; }
  float operator[](Eigen::Index i) const { return prob_.data()[i]; }

 private:
  Grid prob_;
};

/// Divides every non-nodata sample by `max_value` (> 0).
Raster normalize_image(const Raster& img, float max_value);

}  // namespace forestmap
