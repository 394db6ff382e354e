#pragma once

#include <json.hpp>

#include "forestmap/metrics.hpp"

namespace forestmap {

using Json = nlohmann::ordered_json;

/// {mode, seed, config_hash, tp, fp, fn, tn, iou_forest, iou_nonforest,
///  mean_iou, oa, precision, recall, f1} in that order.
Json to_json(const MetricsReport& report);
MetricsReport metrics_from_json(const Json& j);

Json to_json(const Comparison& comparison);

}  // namespace forestmap
