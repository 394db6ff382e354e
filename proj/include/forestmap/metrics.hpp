#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "forestmap/raster.hpp"

namespace forestmap {

/// Pixel counts with forest (1) as the positive class.
struct ConfusionMatrix {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const noexcept { return tp + fp + fn + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct RunInfo {
  std::string mode;
  std::uint64_t seed = 0;
  std::string config_hash;
};

struct MetricsReport {
  ConfusionMatrix confusion;
  double iou_forest = 0;
  double iou_nonforest = 0;
  double mean_iou = 0;
  double oa = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  RunInfo run;
};

ConfusionMatrix confusion(const LabelMask& pred, const LabelMask& truth);

/// Ratios whose denominator is zero evaluate to 1 when the class involved is
/// absent from both prediction and truth, and to 0 otherwise.
MetricsReport compute_metrics(const ConfusionMatrix& cm, RunInfo run = {});

inline MetricsReport evaluate(const LabelMask& pred, const LabelMask& truth, RunInfo run = {}) {
  return compute_metrics(confusion(pred, truth), std::move(run));
}

/// Side-by-side view of several runs with the best value of each metric
/// flagged; every run that ties for best is flagged.
struct Comparison {
  static const std::vector<std::string>& metric_names();

  std::vector<std::string> labels;
  std::vector<MetricsReport> reports;
  std::vector<std::vector<bool>> best;  // [run][metric]

  std::string to_text() const;
};

Comparison compare_runs(std::span<const MetricsReport> reports, std::vector<std::string> labels = {});

double metric_value(const MetricsReport& report, const std::string& name);

}  // namespace forestmap
