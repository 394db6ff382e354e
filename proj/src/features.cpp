#include "forestmap/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "forestmap/error.hpp"

namespace forestmap {
namespace {

// Neumaier summation over sorted values: the result depends only on the
// multiset of values, never on the order pixels were visited.
double sum_sorted(const std::vector<double>& v) {
  double sum = 0, comp = 0;
  for (double x : v) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

struct Moments {
  double mean;
  double stddev;
};

Moments moments(std::vector<double>& values, std::vector<double>& scratch) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const double mean = std::clamp(sum_sorted(values) / n, values.front(), values.back());
  scratch.resize(values.size());
  std::transform(values.begin(), values.end(), scratch.begin(),
                 [mean](double v) { return (v - mean) * (v - mean); });
  std::sort(scratch.begin(), scratch.end());
  return {mean, std::sqrt(sum_sorted(scratch) / n)};
}

}  // namespace

FeatureTable extract_features(const Raster& img, const SegmentMap& seg, const Heatmap* heat,
                              const FeatureSpec& spec) {
  if (img.width() != seg.width || img.height() != seg.height) {
    throw Error(Errc::DimensionMismatch, "image and segment map differ in size");
  }
  if (spec.use_heatmap && !heat) throw Error(Errc::MissingHeatmap, "heatmap features requested");
  if (spec.use_heatmap && (heat->width() != img.width() || heat->height() != img.height())) {
    throw Error(Errc::DimensionMismatch, "heatmap and image differ in size");
  }
  const int bands = img.bands();
  const bool ndvi = spec.ndvi_for(bands);
  if (ndvi && bands != 4) throw Error(Errc::RequiresNir, "NDVI needs 4-band (R,G,B,NIR) input");

  FeatureTable table;
  for (int b = 1; b <= bands; ++b) {
    table.feature_names.push_back("band" + std::to_string(b) + "_mean");
    table.feature_names.push_back("band" + std::to_string(b) + "_std");
  }
  if (ndvi) table.feature_names.push_back("ndvi_mean");
  if (spec.use_heatmap) {
    table.feature_names.push_back("heat_mean");
    table.feature_names.push_back("heat_std");
  }

  // Bucket pixel indices by segment.
  const int n = seg.segment_count;
  std::vector<Eigen::Index> start(n + 1, 0);
  for (Eigen::Index i = 0; i < seg.pixel_count(); ++i) ++start[seg[i] + 1];
  std::partial_sum(start.begin(), start.end(), start.begin());
  std::vector<Eigen::Index> order(seg.pixel_count());
  {
    std::vector<Eigen::Index> cursor(start.begin(), start.end() - 1);
    for (Eigen::Index i = 0; i < seg.pixel_count(); ++i) order[cursor[seg[i]]++] = i;
  }

  const auto& s = img.samples();
  table.vectors.resize(n, static_cast<Eigen::Index>(table.feature_names.size()));
  table.segment_ids.resize(n);
  std::vector<double> values, scratch;
  for (int id = 0; id < n; ++id) {
    table.segment_ids[id] = id;
    const auto first = order.begin() + start[id];
    const auto last = order.begin() + start[id + 1];
    if (first == last) throw Error(Errc::InvalidArgument, "empty segment " + std::to_string(id));
    Eigen::Index col = 0;
    auto gather = [&](auto&& value_of) {
      values.clear();
      for (auto it = first; it != last; ++it) values.push_back(value_of(*it));
    };
    for (int b = 0; b < bands; ++b) {
      gather([&](Eigen::Index i) { return static_cast<double>(s(i, b)); });
      const Moments m = moments(values, scratch);
      table.vectors(id, col++) = m.mean;
      table.vectors(id, col++) = m.stddev;
    }
    if (ndvi) {
      gather([&](Eigen::Index i) {
        const double red = s(i, 0), nir = s(i, 3);
        return (nir - red) / (nir + red + kNdviEpsilon);
      });
      table.vectors(id, col++) = moments(values, scratch).mean;
    }
    if (spec.use_heatmap) {
      gather([&](Eigen::Index i) { return static_cast<double>((*heat)[i]); });
      const Moments m = moments(values, scratch);
      table.vectors(id, col++) = m.mean;
      table.vectors(id, col++) = m.stddev;
    }
  }
  if (!table.vectors.allFinite()) throw Error(Errc::NonFiniteFeature, "non-finite segment feature");
  return table;
}

std::pair<FeatureTable, Scaler<double>> standardize(const FeatureTable& table) {
  Scaler<double> scaler = fit_scaler(table.vectors);
  FeatureTable out{table.segment_ids, scaler.apply(table.vectors), table.feature_names};
  return {std::move(out), std::move(scaler)};
}

void write_feature_csv(const FeatureTable& table, std::ostream& out) {
  out << "segment_id";
  for (const auto& name : table.feature_names) out << ',' << name;
  out << '\n';
  const auto precision = out.precision(17);
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    out << table.segment_ids[r];
    for (Eigen::Index c = 0; c < table.cols(); ++c) out << ',' << table.vectors(r, c);
    out << '\n';
  }
  out.precision(precision);
}

}  // namespace forestmap
