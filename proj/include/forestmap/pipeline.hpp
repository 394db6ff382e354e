#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "forestmap/features.hpp"
#include "forestmap/metrics.hpp"
#include "forestmap/raster.hpp"
#include "forestmap/segmentation.hpp"
#include "forestmap/svm.hpp"

namespace forestmap {

/// obia: spectral features only. forcm: spectral features plus the segment's
/// heatmap mean and standard deviation.
enum class Mode { Obia, Forcm };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

struct PipelineConfig {
  Mode mode = Mode::Obia;
  double train_fraction = 0.10;
  int min_train_segments = 50;
  std::uint64_t seed = 0;
  double threshold = 0.0;  // on SVM decision values; ties count as forest
  MeanShiftParams meanshift;
  SvmParams svm;
  FeatureSpec features;
  int threads = 0;  // 0 = hardware concurrency; results do not depend on it

  void validate() const;
};

/// Flattened, key-sorted view of every setting that affects results.
std::map<std::string, std::string> canonical_config(const PipelineConfig& cfg);

/// 16 hex digits of FNV-1a over the canonical "key=value\n" lines.
std::string config_hash(const PipelineConfig& cfg);

struct ClassifiedSegments {
  Eigen::VectorXd decision;
  std::vector<std::uint8_t> forest;  // 1 iff decision >= threshold
};

/// +1 iff strictly more than half of a segment's pixels are forest.
std::vector<int> derive_segment_labels(const SegmentMap& seg, const LabelMask& truth);

/// Stratified sample without replacement of
/// min(count, max(min_train_segments, ceil(train_fraction * count))) segment
/// ids. Each class receives its proportional share rounded to nearest, and at
/// least one. Returned ids are ascending.
std::vector<std::int32_t> sample_training_segments(const SegmentMap& seg, std::span<const int> labels,
                                                   const PipelineConfig& cfg);

ClassifiedSegments classify_segments(const Eigen::VectorXd& decision, double threshold);

LabelMask paint_segments(const SegmentMap& seg, const ClassifiedSegments& classes);

struct StageTimings {
  double segment_ms = 0;
  double features_ms = 0;
  double train_ms = 0;
  double classify_ms = 0;
  double evaluate_ms = 0;
};

struct PipelineResult {
  LabelMask prediction;
  ClassifiedSegments classified;
  MetricsReport metrics;
  SegmentMap segments;
  FeatureTable features;
  SvmModel<double> model;
  std::vector<std::int32_t> training_segments;
  SvmTrace trace;
  StageTimings timings;
};

/// segment -> features -> labels of sampled segments -> standardize -> train
/// -> decision values -> threshold -> paint -> evaluate.
PipelineResult run_pipeline(const Raster& img, const Heatmap* heat, const LabelMask& truth,
                            const PipelineConfig& cfg);

/// Same flow on an existing segmentation.
PipelineResult run_pipeline(const Raster& img, SegmentMap segments, const Heatmap* heat,
                            const LabelMask& truth, const PipelineConfig& cfg);

}  // namespace forestmap
