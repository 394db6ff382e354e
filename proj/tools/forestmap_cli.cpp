// forestmap: command-line front end for segmentation, fusion classification,
// synthetic fixtures and evaluation.
//
// Exit codes: 0 success, 1 processing error, 2 usage error.
// stdout carries only JSON or table payloads; diagnostics go to stderr.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "forestmap/error.hpp"
#include "forestmap/features.hpp"
#include "forestmap/pipeline.hpp"
#include "forestmap/raster_io.hpp"
#include "forestmap/report.hpp"
#include "forestmap/segmentation.hpp"
#include "forestmap/synth.hpp"

namespace fs = std::filesystem;
using namespace forestmap;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// key=value lines; '#' starts a comment. Keys are long flag names without
/// the leading dashes.
std::vector<std::pair<std::string, std::string>> read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path.string());
  auto trim = [](std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return std::string{};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
  };
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path.string() + ":" + std::to_string(number) + ": expected key=value");
    }
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return entries;
}

/// Fills options not given on the command line from the config file, so the
/// precedence is flag > config file > built-in default.
void apply_config(CLI::App& cmd, const std::string& config_path) {
  if (config_path.empty()) return;
  for (const auto& [key, value] : read_config_file(config_path)) {
    CLI::Option* opt = nullptr;
    try {
      opt = cmd.get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw UsageError("unknown config key '" + key + "'");
    }
    if (opt->count() > 0) continue;
    opt->add_result(value);
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError(std::string("config: ") + e.what());
    }
  }
}

float resolve_max_value(const Raster& img, const std::string& flag) {
  if (flag != "auto") {
    try {
      std::size_t used = 0;
      const float v = std::stof(flag, &used);
      if (used == flag.size() && v > 0 && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("--max-value must be 'auto' or a positive number");
  }
  float hi = 0.0f;
  const float* p = img.samples().data();
  for (Eigen::Index i = 0; i < img.samples().size(); ++i) {
    if (!img.is_nodata(p[i])) hi = std::max(hi, p[i]);
  }
  if (hi <= 1.0f + 1e-6f) return 1.0f;
  if (hi <= 255.0f) return 255.0f;
  return 65535.0f;
}

Raster load_normalized(const fs::path& path, const std::string& max_value) {
  const Raster raw = read_image(path);
  const float m = resolve_max_value(raw, max_value);
  return m == 1.0f ? raw : normalize_image(raw, m);
}

struct SegmentFlags {
  double spatial_radius = 5.0;
  double range_radius = 5.0;  // 8-bit units
  int min_size = 100;
  int max_iterations = 100;
  double convergence_eps = 1e-3;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--spatial-radius", spatial_radius, "Spatial window radius in pixels")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--range-radius", range_radius,
                   "Spectral radius in 8-bit units (divided by 255 internally)")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--min-size", min_size, "Minimum segment size in pixels")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--max-iterations", max_iterations)->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--convergence-eps", convergence_eps)->capture_default_str()->check(CLI::PositiveNumber);
  }

  MeanShiftParams params() const {
    return {spatial_radius, range_radius_from_8bit(range_radius), min_size, max_iterations, convergence_eps};
  }
};

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

struct SegmentCommand {
  std::string input, out, config, max_value = "auto";
  int threads = 0;
  SegmentFlags flags;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("segment", "Mean-shift segmentation to a label GeoTIFF");
    cmd->add_option("--input", input, "Image GeoTIFF")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "Output segment-id GeoTIFF (uint32)")->required();
    cmd->add_option("--max-value", max_value, "Normalization divisor or 'auto'")->capture_default_str();
    cmd->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
    cmd->add_option("--config", config, "key=value defaults file");
    flags.add_to(*cmd);
    cmd->callback([this, cmd] {
      apply_config(*cmd, config);
      run();
    });
  }

  void run() const {
    const Raster img = load_normalized(input, max_value);
    const SegmentMap seg = segment(img, flags.params(), threads);
    write_segment_map(seg, img.geotransform(), out);
    std::vector<std::int64_t> sizes = seg.segment_sizes;
    std::sort(sizes.begin(), sizes.end());
    Json stats;
    stats["segments"] = seg.segment_count;
    stats["min_size"] = sizes.front();
    stats["median_size"] = sizes[(sizes.size() - 1) / 2];
    stats["max_size"] = sizes.back();
    std::cout << stats.dump(2) << '\n';
  }
};

struct RunCommand {
  std::string mode_text, input, truth, heatmap, out_dir, config, max_value = "auto", ndvi = "auto";
  std::uint64_t seed = 0;
  double threshold = 0.0, train_fraction = 0.10, svm_c = 1.0, svm_tol = 1e-4;
  int min_train_segments = 50, svm_max_epochs = 1000, threads = 0;
  SegmentFlags flags;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("run", "End-to-end obia or forcm classification and evaluation");
    cmd->add_option("--mode", mode_text, "obia or forcm")->required()->check(CLI::IsMember({"obia", "forcm"}));
    cmd->add_option("--input", input, "Image GeoTIFF")->required()->check(CLI::ExistingFile);
    cmd->add_option("--truth", truth, "Ground-truth mask (PNG or GeoTIFF)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--heatmap", heatmap, "Forest probability GeoTIFF (forcm only)")->check(CLI::ExistingFile);
    cmd->add_option("--out-dir", out_dir, "Output directory")->required();
    cmd->add_option("--seed", seed)->capture_default_str();
    cmd->add_option("--threshold", threshold, "Decision-value threshold")->capture_default_str();
    cmd->add_option("--train-fraction", train_fraction)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--min-train-segments", min_train_segments)->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--svm-c", svm_c)->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--svm-max-epochs", svm_max_epochs)->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--svm-tol", svm_tol)->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--ndvi", ndvi, "auto, on or off")->capture_default_str()->check(CLI::IsMember({"auto", "on", "off"}));
    cmd->add_option("--max-value", max_value, "Normalization divisor or 'auto'")->capture_default_str();
    cmd->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
    cmd->add_option("--config", config, "key=value defaults file");
    flags.add_to(*cmd);
    cmd->callback([this, cmd] {
      apply_config(*cmd, config);
      run();
    });
  }

  PipelineConfig pipeline_config() const {
    PipelineConfig cfg;
    cfg.mode = parse_mode(mode_text);
    cfg.train_fraction = train_fraction;
    cfg.min_train_segments = min_train_segments;
    cfg.seed = seed;
    cfg.threshold = threshold;
    cfg.meanshift = flags.params();
    cfg.svm = SvmParams{svm_c, svm_max_epochs, svm_tol, seed};
    if (ndvi != "auto") cfg.features.use_ndvi = ndvi == "on";
    cfg.threads = threads;
    return cfg;
  }

  void run() const {
    const bool forcm = mode_text == "forcm";
    if (forcm && heatmap.empty()) throw UsageError("--mode forcm requires --heatmap");
    if (!forcm && !heatmap.empty()) throw UsageError("--heatmap is only valid with --mode forcm");
    const PipelineConfig cfg = pipeline_config();
    cfg.validate();

    const auto t0 = std::chrono::steady_clock::now();
    const Raster img = load_normalized(input, max_value);
    const LabelMask truth_mask = read_mask(truth);
    std::optional<Heatmap> heat;
    if (forcm) heat = read_heatmap(heatmap);
    const double read_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    const PipelineResult result = run_pipeline(img, heat ? &*heat : nullptr, truth_mask, cfg);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    write_binary_map(result.prediction, img.geotransform(), dir / "prediction.tif");
    write_segment_map(result.segments, img.geotransform(), dir / "segments.tif");
    {
      std::ofstream model(dir / "model.txt");
      write_model(result.model, model);
    }

    Json metrics = to_json(result.metrics);
    metrics["feature_names"] = result.features.feature_names;
    metrics["segment_count"] = result.segments.segment_count;
    metrics["training_segments"] = result.training_segments.size();
    write_json(dir / "metrics.json", metrics);

    Json manifest;
    manifest["tool"] = "forestmap";
    manifest["version"] = FORESTMAP_VERSION;
    manifest["config_hash"] = config_hash(cfg);
    Json resolved;
    for (const auto& [k, v] : canonical_config(cfg)) resolved[k] = v;
    resolved["max_value"] = max_value;
    manifest["config"] = std::move(resolved);
    manifest["inputs"] = {{"input", input}, {"truth", truth}, {"heatmap", heatmap}};
    manifest["seeds"] = {{"seed", cfg.seed}, {"svm_seed", cfg.svm.seed}};
    manifest["threads"] = threads;
    manifest["svm"] = {{"epochs", result.trace.epochs}, {"converged", result.trace.converged}};
    const auto& t = result.timings;
    manifest["timings_ms"] = {{"read", read_ms},           {"segment", t.segment_ms},
                              {"features", t.features_ms}, {"train", t.train_ms},
                              {"classify", t.classify_ms}, {"evaluate", t.evaluate_ms}};
    manifest["created_utc"] = utc_now();
    write_json(dir / "manifest.json", manifest);

    std::cout << metrics.dump(2) << '\n';
  }
};

struct SynthCommand {
  SceneSpec spec;
  std::optional<int> size;
  std::optional<double> heatmap_error;
  int heatmap_blur = 0;
  std::string out_dir, config;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("synth", "Seeded synthetic scene with ground truth");
    cmd->add_option("--seed", spec.seed)->capture_default_str();
    cmd->add_option("--size", size, "Sets both width and height")->check(CLI::PositiveNumber);
    cmd->add_option("--width", spec.width)->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--height", spec.height)->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--bands", spec.bands)->capture_default_str()->check(CLI::IsMember({3, 4}));
    cmd->add_option("--blobs", spec.n_blobs, "Forest patch count")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--blob-scale", spec.blob_scale)->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--noise", spec.noise_sigma, "Gaussian noise sigma")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--blur", spec.boundary_blur, "Boundary blend radius")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--forest-spectrum", spec.forest_spectrum)->expected(3, 4);
    cmd->add_option("--nonforest-spectrum", spec.nonforest_spectrum)->expected(3, 4);
    cmd->add_option("--heatmap-error", heatmap_error, "Also write an oracle heatmap with this error rate")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--heatmap-blur", heatmap_blur)->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--out-dir", out_dir)->required();
    cmd->add_option("--config", config, "key=value defaults file");
    cmd->callback([this, cmd] {
      apply_config(*cmd, config);
      run();
    });
  }

  void run() {
    if (size) spec.width = spec.height = *size;
    const Scene scene = generate_scene(spec);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    write_image(scene.image, dir / "image.tif");
    write_binary_map(scene.truth, std::nullopt, dir / "truth.tif");
    Json out;
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(scene_hash(scene)));
    out["scene_hash"] = hash;
    out["width"] = spec.width;
    out["height"] = spec.height;
    out["bands"] = spec.bands;
    out["forest_fraction"] =
        static_cast<double>(scene.truth.labels().cast<std::int64_t>().sum()) / static_cast<double>(scene.truth.size());
    Json files = {(dir / "image.tif").string(), (dir / "truth.tif").string()};
    if (heatmap_error) {
      const Heatmap heat = oracle_heatmap(scene.truth, *heatmap_error, heatmap_blur, spec.seed);
      write_heatmap(heat, std::nullopt, dir / "heatmap.tif");
      files.push_back((dir / "heatmap.tif").string());
    }
    out["files"] = std::move(files);
    std::cout << out.dump(2) << '\n';
  }
};

struct PseudoHeatmapCommand {
  std::string input, out, max_value = "auto", config;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("pseudo-heatmap", "NDVI-derived forest probability map");
    cmd->add_option("--input", input, "4-band image GeoTIFF")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "Output heatmap GeoTIFF")->required();
    cmd->add_option("--max-value", max_value, "Normalization divisor or 'auto'")->capture_default_str();
    cmd->add_option("--config", config, "key=value defaults file");
    cmd->callback([this, cmd] {
      apply_config(*cmd, config);
      run();
    });
  }

  void run() const {
    const Raster img = load_normalized(input, max_value);
    const Heatmap heat = ndvi_pseudo_heatmap(img);
    write_heatmap(heat, img.geotransform(), out);
    Json j;
    j["heatmap"] = out;
    j["mean"] = heat.prob().cast<double>().mean();
    std::cout << j.dump(2) << '\n';
  }
};

struct EvaluateCommand {
  std::string pred, truth, mode;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("evaluate", "Pixel-wise metrics of a binary map against truth");
    cmd->add_option("--pred", pred, "Predicted binary map")->required()->check(CLI::ExistingFile);
    cmd->add_option("--truth", truth, "Ground-truth mask")->required()->check(CLI::ExistingFile);
    cmd->add_option("--label", mode, "Run label stored in the mode field");
    cmd->callback([this] { run(); });
  }

  void run() const {
    const MetricsReport r = evaluate(read_mask(pred), read_mask(truth), RunInfo{mode, 0, ""});
    std::cout << to_json(r).dump(2) << '\n';
  }
};

struct CompareCommand {
  std::vector<std::string> files;
  bool json = false;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("compare", "Side-by-side metrics with the best value flagged");
    cmd->add_option("reports", files, "Metrics JSON files")->required()->check(CLI::ExistingFile);
    cmd->add_flag("--json", json, "Emit JSON instead of a text table");
    cmd->callback([this] { run(); });
  }

  void run() const {
    if (files.size() < 2) throw UsageError("compare needs at least two reports");
    std::vector<MetricsReport> reports;
    std::vector<std::string> labels;
    for (const auto& f : files) {
      std::ifstream in(f);
      Json j;
      try {
        j = Json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, f + ": " + e.what());
      }
      reports.push_back(metrics_from_json(j));
      const fs::path p(f);
      labels.push_back(p.parent_path().filename().empty() || p.stem() != "metrics"
                           ? p.stem().string()
                           : p.parent_path().filename().string());
    }
    const Comparison c = compare_runs(reports, labels);
    if (json) {
      std::cout << to_json(c).dump(2) << '\n';
    } else {
      std::cout << c.to_text();
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forest cover mapping: mean-shift objects, heatmap fusion, linear SVM"};
  app.set_version_flag("--version", FORESTMAP_VERSION);
  app.require_subcommand(1);

  SegmentCommand segment_cmd;
  RunCommand run_cmd;
  SynthCommand synth_cmd;
  PseudoHeatmapCommand pseudo_cmd;
  EvaluateCommand evaluate_cmd;
  CompareCommand compare_cmd;
  segment_cmd.attach(app);
  run_cmd.attach(app);
  synth_cmd.attach(app);
  pseudo_cmd.attach(app);
  evaluate_cmd.attach(app);
  compare_cmd.attach(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
