#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "forestmap/raster_io.hpp"
#include "forestmap/tiff.hpp"
#include "test_support.hpp"

namespace forestmap {
namespace {

using Json = nlohmann::json;
using testing::TempDir;

struct Result {
  int status = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(FORESTMAP_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto r = run("synth --seed 7 --size 128 --blob-scale 24 --bands 4 --heatmap-error 0.05 --out-dir " +
                       dir.path().string() + "/scene");
    ASSERT_EQ(r.status, 0) << r.out;
    scene = Json::parse(r.out);
  }

  std::string path(const std::string& name) const { return (dir / name).string(); }

  TempDir dir;
  Json scene;
};

TEST_F(Cli, SynthIsReproducible) {
  const auto again = run("synth --seed 7 --size 128 --blob-scale 24 --bands 4 --out-dir " + path("again"));
  ASSERT_EQ(again.status, 0);
  EXPECT_EQ(Json::parse(again.out)["scene_hash"], scene["scene_hash"]);
  EXPECT_EQ(slurp(path("again/image.tif")), slurp(path("scene/image.tif")));
  const auto other = run("synth --seed 8 --size 128 --blob-scale 24 --bands 4 --out-dir " + path("other"));
  EXPECT_NE(Json::parse(other.out)["scene_hash"], scene["scene_hash"]);
}

TEST_F(Cli, SegmentWritesMapAndStats) {
  const auto r = run("segment --input " + path("scene/image.tif") +
                     " --spatial-radius 5 --range-radius 5 --min-size 100 --out " + path("seg.tif"));
  ASSERT_EQ(r.status, 0);
  const Json stats = Json::parse(r.out);
  EXPECT_GE(stats["segments"].get<int>(), 2);
  EXPECT_GE(stats["min_size"].get<int>(), 100);
  const auto seg = tiff::read(path("seg.tif"));
  EXPECT_EQ(seg.type, tiff::SampleType::UInt32);
  EXPECT_EQ(seg.width, 128);
}

TEST_F(Cli, SegmentConstantImageReportsOneSegment) {
  write_image(testing::constant_raster(40, 30, 3, 0.25f), dir / "flat.tif");
  const auto r = run("segment --input " + path("flat.tif") + " --out " + path("flat_seg.tif"));
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(Json::parse(r.out)["segments"], 1);
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("segment --input " + path("missing.tif") + " --out " + path("x.tif")).status, 2);
  EXPECT_EQ(run("segment --out " + path("x.tif")).status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("run --mode forcm --input " + path("scene/image.tif") + " --truth " + path("scene/truth.tif") +
                " --out-dir " + path("r"))
                .status,
            2);
  EXPECT_EQ(run("run --mode obia --input " + path("scene/image.tif") + " --truth " + path("scene/truth.tif") +
                " --heatmap " + path("scene/heatmap.tif") + " --out-dir " + path("r"))
                .status,
            2);
  EXPECT_EQ(run("run --mode dl --input " + path("scene/image.tif") + " --truth " + path("scene/truth.tif") +
                " --out-dir " + path("r"))
                .status,
            2);
}

TEST_F(Cli, ProcessingErrorsExitOne) {
  std::ofstream(dir / "junk.tif") << "definitely not a tiff";
  EXPECT_EQ(run("segment --input " + path("junk.tif") + " --out " + path("x.tif")).status, 1);
  // Truth of a different size.
  ASSERT_EQ(run("synth --seed 1 --size 64 --out-dir " + path("small")).status, 0);
  EXPECT_EQ(run("run --mode obia --input " + path("scene/image.tif") + " --truth " + path("small/truth.tif") +
                " --out-dir " + path("r"))
                .status,
            1);
}

TEST_F(Cli, RunBothModesAndCompare) {
  const std::string common =
      " --input " + path("scene/image.tif") + " --truth " + path("scene/truth.tif") + " --seed 42";
  const auto obia = run("run --mode obia" + common + " --out-dir " + path("runs/obia"));
  ASSERT_EQ(obia.status, 0);
  const Json m = Json::parse(obia.out);
  EXPECT_TRUE(m.contains("oa"));
  EXPECT_EQ(m["mode"], "obia");
  EXPECT_EQ(m["seed"], 42);

  const auto forcm =
      run("run --mode forcm --heatmap " + path("scene/heatmap.tif") + common + " --out-dir " + path("runs/forcm"));
  ASSERT_EQ(forcm.status, 0);
  const Json report = Json::parse(slurp(path("runs/forcm/metrics.json")));
  const auto names = report["feature_names"].get<std::vector<std::string>>();
  EXPECT_NE(std::find(names.begin(), names.end(), "heat_mean"), names.end());

  for (const char* f : {"prediction.tif", "segments.tif", "model.txt", "metrics.json", "manifest.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / "runs/forcm" / f)) << f;
  }
  const Json manifest = Json::parse(slurp(path("runs/forcm/manifest.json")));
  EXPECT_EQ(manifest["config_hash"], report["config_hash"]);

  const auto pred = read_mask(path("runs/obia/prediction.tif"));
  EXPECT_EQ(pred.width(), 128);

  const auto table = run("compare " + path("runs/obia/metrics.json") + " " + path("runs/forcm/metrics.json"));
  ASSERT_EQ(table.status, 0);
  EXPECT_NE(table.out.find("obia"), std::string::npos);
  EXPECT_NE(table.out.find('*'), std::string::npos);
  const auto cj = run("compare --json " + path("runs/obia/metrics.json") + " " + path("runs/forcm/metrics.json"));
  ASSERT_EQ(cj.status, 0);
  EXPECT_TRUE(Json::parse(cj.out)["best"].contains("oa"));

  const auto ev = run("evaluate --pred " + path("runs/obia/prediction.tif") + " --truth " + path("scene/truth.tif"));
  ASSERT_EQ(ev.status, 0);
  const Json evj = Json::parse(ev.out);
  EXPECT_EQ(evj["oa"], m["oa"]);
  EXPECT_EQ(evj["tp"], m["tp"]);
}

TEST_F(Cli, RunIsByteReproducible) {
  const std::string common = "run --mode forcm --heatmap " + path("scene/heatmap.tif") + " --input " +
                             path("scene/image.tif") + " --truth " + path("scene/truth.tif") + " --seed 3";
  ASSERT_EQ(run(common + " --out-dir " + path("a")).status, 0);
  ASSERT_EQ(run(common + " --threads 1 --out-dir " + path("b")).status, 0);
  EXPECT_EQ(slurp(path("a/prediction.tif")), slurp(path("b/prediction.tif")));
  EXPECT_EQ(slurp(path("a/metrics.json")), slurp(path("b/metrics.json")));
  EXPECT_EQ(slurp(path("a/model.txt")), slurp(path("b/model.txt")));
}

TEST_F(Cli, ConfigFilePrecedence) {
  const std::string base = "run --mode obia --input " + path("scene/image.tif") + " --truth " +
                           path("scene/truth.tif");
  std::ofstream(dir / "a.cfg") << "# run settings\nseed = 5\nsvm-c = 2\nmin-size = 50\n";
  std::ofstream(dir / "b.cfg") << "min-size=50\nsvm-c=2\n\nseed=5\n";

  const auto from_file = run(base + " --config " + path("a.cfg") + " --out-dir " + path("cfg_a"));
  ASSERT_EQ(from_file.status, 0);
  const Json a = Json::parse(from_file.out);
  EXPECT_EQ(a["seed"], 5);

  const auto reordered = run(base + " --config " + path("b.cfg") + " --out-dir " + path("cfg_b"));
  ASSERT_EQ(reordered.status, 0);
  EXPECT_EQ(Json::parse(reordered.out)["config_hash"], a["config_hash"]);

  const auto flags = run(base + " --seed 5 --svm-c 2 --min-size 50 --out-dir " + path("cfg_flags"));
  EXPECT_EQ(Json::parse(flags.out)["config_hash"], a["config_hash"]);

  const auto overridden = run(base + " --config " + path("a.cfg") + " --seed 6 --out-dir " + path("cfg_c"));
  ASSERT_EQ(overridden.status, 0);
  EXPECT_EQ(Json::parse(overridden.out)["seed"], 6);
  EXPECT_NE(Json::parse(overridden.out)["config_hash"], a["config_hash"]);

  const Json manifest = Json::parse(slurp(path("cfg_a/manifest.json")));
  EXPECT_EQ(manifest["config"]["svm.C"], "2");

  std::ofstream(dir / "bad.cfg") << "no-such-key=1\n";
  EXPECT_EQ(run(base + " --config " + path("bad.cfg") + " --out-dir " + path("cfg_bad")).status, 2);
  std::ofstream(dir / "badval.cfg") << "svm-c=-3\n";
  EXPECT_EQ(run(base + " --config " + path("badval.cfg") + " --out-dir " + path("cfg_bad")).status, 2);
}

TEST_F(Cli, PseudoHeatmap) {
  const auto r = run("pseudo-heatmap --input " + path("scene/image.tif") + " --out " + path("ndvi.tif"));
  ASSERT_EQ(r.status, 0);
  const Heatmap h = read_heatmap(path("ndvi.tif"));
  EXPECT_EQ(h.width(), 128);
  ASSERT_EQ(run("synth --seed 1 --size 32 --bands 3 --out-dir " + path("rgb")).status, 0);
  EXPECT_EQ(run("pseudo-heatmap --input " + path("rgb/image.tif") + " --out " + path("x.tif")).status, 1);
}

}  // namespace
}  // namespace forestmap
