#include "forestmap/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "forestmap/error.hpp"

namespace forestmap {

ConfusionMatrix confusion(const LabelMask& pred, const LabelMask& truth) {
  if (pred.width() != truth.width() || pred.height() != truth.height()) {
    throw Error(Errc::DimensionMismatch, "prediction and truth differ in size");
  }
  ConfusionMatrix cm;
  const std::uint8_t* p = pred.labels().data();
  const std::uint8_t* t = truth.labels().data();
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    if (p[i]) {
      ++(t[i] ? cm.tp : cm.fp);
    } else {
      ++(t[i] ? cm.fn : cm.tn);
    }
  }
  return cm;
}

namespace {

double ratio(std::int64_t num, std::int64_t den, bool class_absent) {
  if (den == 0) return class_absent ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport compute_metrics(const ConfusionMatrix& cm, RunInfo run) {
  if (cm.tp < 0 || cm.fp < 0 || cm.fn < 0 || cm.tn < 0) {
    throw Error(Errc::InvalidArgument, "negative confusion count");
  }
  if (cm.total() == 0) throw Error(Errc::EmptyMask, "no pixels to evaluate");
  const bool no_forest = cm.tp + cm.fp + cm.fn == 0;
  const bool no_nonforest = cm.tn + cm.fp + cm.fn == 0;

  MetricsReport r;
  r.confusion = cm;
  r.iou_forest = ratio(cm.tp, cm.tp + cm.fp + cm.fn, no_forest);
  r.iou_nonforest = ratio(cm.tn, cm.tn + cm.fn + cm.fp, no_nonforest);
  r.mean_iou = (r.iou_forest + r.iou_nonforest) / 2.0;
  r.oa = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  r.precision = ratio(cm.tp, cm.tp + cm.fp, no_forest);
  r.recall = ratio(cm.tp, cm.tp + cm.fn, no_forest);
  const double pr = r.precision + r.recall;
  r.f1 = pr > 0 ? 2.0 * r.precision * r.recall / pr : (no_forest ? 1.0 : 0.0);
  r.run = std::move(run);
  return r;
}

const std::vector<std::string>& Comparison::metric_names() {
  static const std::vector<std::string> names = {"mean_iou", "iou_forest", "iou_nonforest", "oa",
                                                 "precision", "recall",     "f1"};
  return names;
}

double metric_value(const MetricsReport& r, const std::string& name) {
  if (name == "mean_iou") return r.mean_iou;
  if (name == "iou_forest") return r.iou_forest;
  if (name == "iou_nonforest") return r.iou_nonforest;
  if (name == "oa") return r.oa;
  if (name == "precision") return r.precision;
  if (name == "recall") return r.recall;
  if (name == "f1") return r.f1;
  throw Error(Errc::InvalidArgument, "unknown metric " + name);
}

Comparison compare_runs(std::span<const MetricsReport> reports, std::vector<std::string> labels) {
  if (reports.size() < 2) throw Error(Errc::InvalidArgument, "comparison needs at least two reports");
  if (labels.empty()) {
    for (std::size_t i = 0; i < reports.size(); ++i) {
      labels.push_back(reports[i].run.mode.empty() ? "run" + std::to_string(i + 1) : reports[i].run.mode);
    }
  }
  if (labels.size() != reports.size()) throw Error(Errc::InvalidArgument, "one label per report");
  Comparison c;
  c.labels = std::move(labels);
  c.reports.assign(reports.begin(), reports.end());
  const auto& names = Comparison::metric_names();
  c.best.assign(reports.size(), std::vector<bool>(names.size(), false));
  for (std::size_t m = 0; m < names.size(); ++m) {
    double top = metric_value(reports[0], names[m]);
    for (const auto& r : reports) top = std::max(top, metric_value(r, names[m]));
    for (std::size_t i = 0; i < reports.size(); ++i) {
      c.best[i][m] = metric_value(reports[i], names[m]) == top;
    }
  }
  return c;
}

std::string Comparison::to_text() const {
  const auto& names = metric_names();
  std::size_t label_width = 3;
  for (const auto& l : labels) label_width = std::max(label_width, l.size());
  constexpr int kCol = 14;
  std::ostringstream out;
  char cell[64];
  std::snprintf(cell, sizeof cell, "%-*s", static_cast<int>(label_width), "run");
  out << cell;
  for (const auto& n : names) {
    std::snprintf(cell, sizeof cell, "  %*s", kCol, n.c_str());
    out << cell;
  }
  out << '\n';
  for (std::size_t i = 0; i < reports.size(); ++i) {
    std::snprintf(cell, sizeof cell, "%-*s", static_cast<int>(label_width), labels[i].c_str());
    out << cell;
    for (std::size_t m = 0; m < names.size(); ++m) {
      char value[32];
      std::snprintf(value, sizeof value, "%.4f%s", metric_value(reports[i], names[m]), best[i][m] ? "*" : " ");
      std::snprintf(cell, sizeof cell, "  %*s", kCol, value);
      out << cell;
    }
    out << '\n';
  }
  out << "* best value per metric\n";
  return out.str();
}

}  // namespace forestmap
