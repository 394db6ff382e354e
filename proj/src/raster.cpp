#include "forestmap/raster.hpp"

#include <cmath>
#include <string>

#include "forestmap/error.hpp"

namespace forestmap {

Raster::Raster(int width, int height, SampleMatrix samples, std::optional<float> nodata,
               std::optional<Geotransform> geotransform)
    : width_(width),
      height_(height),
      samples_(std::move(samples)),
      nodata_(nodata),
      geotransform_(geotransform) {
  if (width <= 0 || height <= 0) {
    throw Error(Errc::InvalidArgument, "raster dimensions must be positive");
  }
  if (samples_.cols() < 1) throw Error(Errc::InvalidArgument, "raster needs at least one band");
  if (samples_.rows() != static_cast<Eigen::Index>(width) * height) {
    throw Error(Errc::DimensionMismatch,
                "sample rows " + std::to_string(samples_.rows()) + " != width*height");
  }
  const float* p = samples_.data();
  for (Eigen::Index i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(p[i]) && !is_nodata(p[i])) {
      throw Error(Errc::InvalidArgument, "non-finite sample outside nodata");
    }
  }
}

bool Raster::is_nodata(float v) const noexcept {
  if (!nodata_) return false;
  if (std::isnan(*nodata_)) return std::isnan(v);
  return v == *nodata_;
}

LabelMask::LabelMask(Grid labels) : labels_(std::move(labels)) {
  if (labels_.rows() <= 0 || labels_.cols() <= 0) {
    throw Error(Errc::InvalidArgument, "mask dimensions must be positive");
  }
  if ((labels_.array() > 1).any()) throw Error(Errc::InvalidLabels, "mask values must be 0 or 1");
}

LabelMask::LabelMask(int width, int height, std::uint8_t fill)
    : LabelMask(Grid::Constant(height, width, fill)) {}

Heatmap::Heatmap(Grid prob) : prob_(std::move(prob)) {
  if (prob_.rows() <= 0 || prob_.cols() <= 0) {
    throw Error(Errc::InvalidArgument, "heatmap dimensions must be positive");
  }
  const float* p = prob_.data();
  for (Eigen::Index i = 0; i < prob_.size(); ++i) {
    if (!(p[i] >= 0.0f && p[i] <= 1.0f)) {
      throw Error(Errc::OutOfRange, "heatmap probability outside [0, 1]");
    }
  }
}

Raster normalize_image(const Raster& img, float max_value) {
  if (!(max_value > 0.0f) || !std::isfinite(max_value)) {
    throw Error(Errc::InvalidArgument, "max_value must be positive");
  }
  SampleMatrix out = img.samples();
  float* p = out.data();
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (!img.is_nodata(p[i])) p[i] /= max_value;
  }
  return Raster(img.width(), img.height(), std::move(out), img.nodata(), img.geotransform());
}

}  // namespace forestmap
