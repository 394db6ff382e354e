#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "forestmap/raster.hpp"
#include "forestmap/segmentation.hpp"
#include "forestmap/standardize.hpp"

namespace forestmap {

struct FeatureSpec {
  std::optional<bool> use_ndvi;  // unset: on for 4-band input
  bool use_heatmap = false;

  bool ndvi_for(int bands) const { return use_ndvi.value_or(bands == 4); }
};

/// One row per segment (row i = segment i). Columns are band<k>_mean and
/// band<k>_std per band, then ndvi_mean, then heat_mean and heat_std.
struct FeatureTable {
  std::vector<std::int32_t> segment_ids;
  Eigen::MatrixXd vectors;
  std::vector<std::string> feature_names;

  Eigen::Index rows() const noexcept { return vectors.rows(); }
  Eigen::Index cols() const noexcept { return vectors.cols(); }
};

constexpr double kNdviEpsilon = 1e-9;

FeatureTable extract_features(const Raster& img, const SegmentMap& seg, const Heatmap* heat,
                              const FeatureSpec& spec);

/// Z-scores every column; see `Scaler`.
std::pair<FeatureTable, Scaler<double>> standardize(const FeatureTable& table);

void write_feature_csv(const FeatureTable& table, std::ostream& out);

}  // namespace forestmap
