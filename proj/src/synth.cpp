#include "forestmap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "forestmap/error.hpp"
#include "forestmap/rng.hpp"

namespace forestmap {
namespace {

constexpr std::uint64_t kGeometryStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kHeatmapStream = 3;

}  // namespace

void SceneSpec::validate() const {
  auto fail = [](const char* what) { throw Error(Errc::InvalidSpec, what); };
  if (width <= 0 || height <= 0) fail("scene dimensions must be positive");
  if (bands != 3 && bands != 4) fail("bands must be 3 or 4");
  if (n_blobs < 0) fail("n_blobs must be >= 0");
  if (!(blob_scale > 0)) fail("blob_scale must be positive");
  if (static_cast<int>(forest_spectrum.size()) < bands || static_cast<int>(nonforest_spectrum.size()) < bands) {
    fail("spectra need one value per band");
  }
  for (int b = 0; b < bands; ++b) {
    for (double v : {forest_spectrum[b], nonforest_spectrum[b]}) {
      if (!(v >= 0.0 && v <= 1.0)) fail("spectra must lie in [0, 1]");
    }
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) fail("noise_sigma must be >= 0");
  if (boundary_blur < 0) fail("boundary_blur must be >= 0");
}

RowMajorMatrix<double> box_blur(const RowMajorMatrix<double>& grid, int radius) {
  if (radius <= 0) return grid;
  const Eigen::Index h = grid.rows(), w = grid.cols();
  // Summed-area table with a zero border row and column.
  RowMajorMatrix<double> sat = RowMajorMatrix<double>::Zero(h + 1, w + 1);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      sat(y + 1, x + 1) = grid(y, x) + sat(y, x + 1) + sat(y + 1, x) - sat(y, x);
    }
  }
  RowMajorMatrix<double> out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    const Eigen::Index y0 = std::max<Eigen::Index>(0, y - radius), y1 = std::min(h, y + radius + 1);
    for (Eigen::Index x = 0; x < w; ++x) {
      const Eigen::Index x0 = std::max<Eigen::Index>(0, x - radius), x1 = std::min(w, x + radius + 1);
      const double sum = sat(y1, x1) - sat(y0, x1) - sat(y1, x0) + sat(y0, x0);
      out(y, x) = sum / static_cast<double>((y1 - y0) * (x1 - x0));
    }
  }
  return out;
}

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  const int w = spec.width, h = spec.height;
  LabelMask::Grid mask = LabelMask::Grid::Zero(h, w);
  SplitMix64 geometry = SplitMix64::stream(spec.seed, kGeometryStream);
  for (int k = 0; k < spec.n_blobs; ++k) {
    const bool ellipse = geometry.below(2) == 1;
    const double ax = spec.blob_scale * (0.5 + 0.5 * geometry.uniform());
    const double ay = spec.blob_scale * (0.5 + 0.5 * geometry.uniform());
    auto place = [&](double half, int extent) {
      const double lo = std::min(half, extent / 2.0), hi = std::max(extent - 1 - half, extent / 2.0);
      return lo + (hi - lo) * geometry.uniform();
    };
    const double cx = place(ax, w);
    const double cy = place(ay, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double dx = (x - cx) / ax, dy = (y - cy) / ay;
        const bool inside = ellipse ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
        if (inside) mask(y, x) = 1;
      }
    }
  }

  const RowMajorMatrix<double> fraction = box_blur(mask.cast<double>(), spec.boundary_blur);
  SplitMix64 noise = SplitMix64::stream(spec.seed, kNoiseStream);
  SampleMatrix samples(static_cast<Eigen::Index>(w) * h, spec.bands);
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    const double f = fraction.data()[i];
    for (int b = 0; b < spec.bands; ++b) {
      double v = f == 1.0   ? spec.forest_spectrum[b]
                 : f == 0.0 ? spec.nonforest_spectrum[b]
                            : f * spec.forest_spectrum[b] + (1.0 - f) * spec.nonforest_spectrum[b];
      if (spec.noise_sigma > 0) v += spec.noise_sigma * noise.normal();
      samples(i, b) = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return Scene{Raster(w, h, std::move(samples)), LabelMask(std::move(mask))};
}

Heatmap oracle_heatmap(const LabelMask& truth, double error_rate, int blur, std::uint64_t seed) {
  if (!(error_rate >= 0.0 && error_rate <= 1.0)) {
    throw Error(Errc::InvalidArgument, "error_rate must lie in [0, 1]");
  }
  if (blur < 0) throw Error(Errc::InvalidArgument, "blur must be >= 0");
  RowMajorMatrix<double> prob = truth.labels().cast<double>();
  const auto n = static_cast<std::size_t>(prob.size());
  const auto flips = static_cast<std::size_t>(std::floor(error_rate * static_cast<double>(n) + 0.5));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng = SplitMix64::stream(seed, kHeatmapStream);
  partial_shuffle(std::span(order), flips, rng);
  for (std::size_t k = 0; k < flips; ++k) prob.data()[order[k]] = 1.0 - prob.data()[order[k]];
  prob = box_blur(prob, blur);
  return Heatmap(prob.cwiseMax(0.0).cwiseMin(1.0).cast<float>());
}

Heatmap ndvi_pseudo_heatmap(const Raster& img) {
  if (img.bands() != 4) throw Error(Errc::RequiresNir, "pseudo heatmap needs R,G,B,NIR bands");
  Heatmap::Grid prob(img.height(), img.width());
  const auto& s = img.samples();
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double red = s(i, 0), nir = s(i, 3);
    const double ndvi = (nir - red) / (nir + red + 1e-9);
    prob.data()[i] = static_cast<float>(std::clamp((ndvi + 1.0) / 2.0, 0.0, 1.0));
  }
  return Heatmap(std::move(prob));
}

std::uint64_t scene_hash(const Scene& scene) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto feed = [&](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 0x100000001B3ULL;
    }
  };
  for (Eigen::Index i = 0; i < scene.image.samples().size(); ++i) {
    // Little-endian bytes of each float, independent of host order.
    std::uint32_t bits;
    std::memcpy(&bits, scene.image.samples().data() + i, 4);
    const unsigned char le[4] = {static_cast<unsigned char>(bits), static_cast<unsigned char>(bits >> 8),
                                 static_cast<unsigned char>(bits >> 16), static_cast<unsigned char>(bits >> 24)};
    feed(le, 4);
  }
  feed(scene.truth.labels().data(), static_cast<std::size_t>(scene.truth.size()));
  return h;
}

}  // namespace forestmap
