#include "forestmap/report.hpp"

#include "forestmap/error.hpp"

namespace forestmap {

Json to_json(const MetricsReport& r) {
  Json j;
  j["mode"] = r.run.mode;
  j["seed"] = r.run.seed;
  j["config_hash"] = r.run.config_hash;
  j["tp"] = r.confusion.tp;
  j["fp"] = r.confusion.fp;
  j["fn"] = r.confusion.fn;
  j["tn"] = r.confusion.tn;
  j["iou_forest"] = r.iou_forest;
  j["iou_nonforest"] = r.iou_nonforest;
  j["mean_iou"] = r.mean_iou;
  j["oa"] = r.oa;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  return j;
}

MetricsReport metrics_from_json(const Json& j) {
  try {
    MetricsReport r;
    r.run.mode = j.value("mode", std::string{});
    r.run.seed = j.value("seed", std::uint64_t{0});
    r.run.config_hash = j.value("config_hash", std::string{});
    r.confusion = {j.at("tp").get<std::int64_t>(), j.at("fp").get<std::int64_t>(),
                   j.at("fn").get<std::int64_t>(), j.at("tn").get<std::int64_t>()};
    r.iou_forest = j.at("iou_forest").get<double>();
    r.iou_nonforest = j.at("iou_nonforest").get<double>();
    r.mean_iou = j.at("mean_iou").get<double>();
    r.oa = j.at("oa").get<double>();
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.f1 = j.at("f1").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("metrics JSON: ") + e.what());
  }
}

Json to_json(const Comparison& c) {
  const auto& names = Comparison::metric_names();
  Json runs = Json::array();
  for (std::size_t i = 0; i < c.reports.size(); ++i) {
    Json run;
    run["label"] = c.labels[i];
    run["metrics"] = to_json(c.reports[i]);
    Json flagged = Json::array();
    for (std::size_t m = 0; m < names.size(); ++m) {
      if (c.best[i][m]) flagged.push_back(names[m]);
    }
    run["best"] = std::move(flagged);
    runs.push_back(std::move(run));
  }
  Json best;
  for (std::size_t m = 0; m < names.size(); ++m) {
    Json who = Json::array();
    for (std::size_t i = 0; i < c.reports.size(); ++i) {
      if (c.best[i][m]) who.push_back(c.labels[i]);
    }
    best[names[m]] = std::move(who);
  }
  Json out;
  out["runs"] = std::move(runs);
  out["best"] = std::move(best);
  return out;
}

}  // namespace forestmap
