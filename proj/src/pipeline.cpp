#include "forestmap/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "forestmap/error.hpp"
#include "forestmap/rng.hpp"

namespace forestmap {

std::string to_string(Mode mode) { return mode == Mode::Obia ? "obia" : "forcm"; }

Mode parse_mode(const std::string& text) {
  if (text == "obia") return Mode::Obia;
  if (text == "forcm") return Mode::Forcm;
  throw Error(Errc::InvalidArgument, "mode must be obia or forcm, got '" + text + "'");
}

void PipelineConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw Error(Errc::InvalidArgument, "train_fraction must lie in (0, 1]");
  }
  if (min_train_segments < 1) throw Error(Errc::InvalidArgument, "min_train_segments must be >= 1");
  if (!std::isfinite(threshold)) throw Error(Errc::InvalidArgument, "threshold must be finite");
  meanshift.validate();
  svm.validate();
}

namespace {

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

std::map<std::string, std::string> canonical_config(const PipelineConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["mode"] = to_string(cfg.mode);
  kv["train_fraction"] = shortest(cfg.train_fraction);
  kv["min_train_segments"] = std::to_string(cfg.min_train_segments);
  kv["seed"] = std::to_string(cfg.seed);
  kv["threshold"] = shortest(cfg.threshold);
  kv["meanshift.spatial_radius"] = shortest(cfg.meanshift.spatial_radius);
  kv["meanshift.range_radius"] = shortest(cfg.meanshift.range_radius);
  kv["meanshift.min_segment_size"] = std::to_string(cfg.meanshift.min_segment_size);
  kv["meanshift.max_iterations"] = std::to_string(cfg.meanshift.max_iterations);
  kv["meanshift.convergence_eps"] = shortest(cfg.meanshift.convergence_eps);
  kv["svm.C"] = shortest(cfg.svm.C);
  kv["svm.max_epochs"] = std::to_string(cfg.svm.max_epochs);
  kv["svm.tol"] = shortest(cfg.svm.tol);
  kv["svm.seed"] = std::to_string(cfg.svm.seed);
  kv["features.use_ndvi"] = cfg.features.use_ndvi ? (*cfg.features.use_ndvi ? "on" : "off") : "auto";
  kv["features.use_heatmap"] = cfg.features.use_heatmap ? "on" : "off";
  return kv;
}

std::string config_hash(const PipelineConfig& cfg) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const auto& [key, value] : canonical_config(cfg)) {
    for (char ch : key + "=" + value + "\n") {
      h ^= static_cast<std::uint8_t>(ch);
      h *= 0x100000001B3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<int> derive_segment_labels(const SegmentMap& seg, const LabelMask& truth) {
  if (seg.width != truth.width() || seg.height != truth.height()) {
    throw Error(Errc::DimensionMismatch, "segment map and truth differ in size");
  }
  std::vector<std::int64_t> forest(seg.segment_count, 0);
  for (Eigen::Index i = 0; i < seg.pixel_count(); ++i) forest[seg[i]] += truth[i];
  std::vector<int> labels(seg.segment_count);
  for (int s = 0; s < seg.segment_count; ++s) {
    labels[s] = 2 * forest[s] > seg.segment_sizes[s] ? 1 : -1;
  }
  return labels;
}

std::vector<std::int32_t> sample_training_segments(const SegmentMap& seg, std::span<const int> labels,
                                                   const PipelineConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(labels.size()) != seg.segment_count) {
    throw Error(Errc::DimensionMismatch, "one label per segment required");
  }
  std::vector<std::int32_t> pos, neg;
  for (std::int32_t s = 0; s < seg.segment_count; ++s) (labels[s] > 0 ? pos : neg).push_back(s);
  if (pos.empty() || neg.empty()) {
    throw Error(Errc::SingleClassScene, "ground truth places every segment in one class");
  }
  const auto total = static_cast<std::int64_t>(labels.size());
  const auto by_fraction = static_cast<std::int64_t>(std::ceil(cfg.train_fraction * static_cast<double>(total)));
  const std::int64_t target = std::min(total, std::max<std::int64_t>(cfg.min_train_segments, by_fraction));

  const auto n_pos_all = static_cast<std::int64_t>(pos.size());
  const auto n_neg_all = static_cast<std::int64_t>(neg.size());
  // Proportional share rounded half up, in exact integer arithmetic.
  std::int64_t n_pos = (2 * target * n_pos_all + total) / (2 * total);
  n_pos = std::clamp<std::int64_t>(n_pos, 1, n_pos_all);
  std::int64_t n_neg = target - n_pos;
  if (n_neg > n_neg_all) {
    n_neg = n_neg_all;
    n_pos = target - n_neg;
  } else if (n_neg < 1) {
    n_neg = 1;
    n_pos = target - 1;
  }

  SplitMix64 rng = SplitMix64::stream(cfg.seed, 0x5341'4D50);  // "SAMP"
  partial_shuffle(std::span(pos), static_cast<std::size_t>(n_pos), rng);
  partial_shuffle(std::span(neg), static_cast<std::size_t>(n_neg), rng);
  std::vector<std::int32_t> ids(pos.begin(), pos.begin() + n_pos);
  ids.insert(ids.end(), neg.begin(), neg.begin() + n_neg);
  std::sort(ids.begin(), ids.end());
  return ids;
}

ClassifiedSegments classify_segments(const Eigen::VectorXd& decision, double threshold) {
  ClassifiedSegments out{decision, std::vector<std::uint8_t>(decision.size())};
  for (Eigen::Index i = 0; i < decision.size(); ++i) out.forest[i] = decision[i] >= threshold ? 1 : 0;
  return out;
}

LabelMask paint_segments(const SegmentMap& seg, const ClassifiedSegments& classes) {
  if (static_cast<int>(classes.forest.size()) != seg.segment_count) {
    throw Error(Errc::DimensionMismatch, "one class per segment required");
  }
  LabelMask::Grid grid(seg.height, seg.width);
  for (Eigen::Index i = 0; i < grid.size(); ++i) grid.data()[i] = classes.forest[seg[i]];
  return LabelMask(std::move(grid));
}

PipelineResult run_pipeline(const Raster& img, const Heatmap* heat, const LabelMask& truth,
                            const PipelineConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  SegmentMap seg = segment(img, cfg.meanshift, cfg.threads);
  const double segment_ms = elapsed_ms(start);
  PipelineResult result = run_pipeline(img, std::move(seg), heat, truth, cfg);
  result.timings.segment_ms = segment_ms;
  return result;
}

PipelineResult run_pipeline(const Raster& img, SegmentMap segments, const Heatmap* heat,
                            const LabelMask& truth, const PipelineConfig& cfg) {
  cfg.validate();
  if (cfg.mode == Mode::Forcm && !heat) throw Error(Errc::MissingHeatmap, "forcm mode needs a heatmap");
  if (truth.width() != img.width() || truth.height() != img.height()) {
    throw Error(Errc::DimensionMismatch, "truth and image differ in size");
  }
  StageTimings timings;

  auto t = std::chrono::steady_clock::now();
  FeatureSpec spec = cfg.features;
  spec.use_heatmap = cfg.mode == Mode::Forcm;
  FeatureTable features = extract_features(img, segments, spec.use_heatmap ? heat : nullptr, spec);
  timings.features_ms = elapsed_ms(t);

  t = std::chrono::steady_clock::now();
  const std::vector<int> labels = derive_segment_labels(segments, truth);
  std::vector<std::int32_t> training = sample_training_segments(segments, labels, cfg);
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(training.size()), features.cols());
  std::vector<int> y;
  y.reserve(training.size());
  for (std::size_t k = 0; k < training.size(); ++k) {
    rows.row(static_cast<Eigen::Index>(k)) = features.vectors.row(training[k]);
    y.push_back(labels[training[k]]);
  }
  SvmTrace trace;
  SvmModel<double> model = fit_svm(rows, y, cfg.svm, features.feature_names, &trace);
  timings.train_ms = elapsed_ms(t);

  t = std::chrono::steady_clock::now();
  ClassifiedSegments classified = classify_segments(decision_values(model, features.vectors), cfg.threshold);
  LabelMask prediction = paint_segments(segments, classified);
  timings.classify_ms = elapsed_ms(t);

  t = std::chrono::steady_clock::now();
  MetricsReport metrics =
      evaluate(prediction, truth, RunInfo{to_string(cfg.mode), cfg.seed, config_hash(cfg)});
  timings.evaluate_ms = elapsed_ms(t);

  return PipelineResult{std::move(prediction), std::move(classified), std::move(metrics),
                        std::move(segments),   std::move(features),   std::move(model),
                        std::move(training),   std::move(trace),      timings};
}

}  // namespace forestmap
