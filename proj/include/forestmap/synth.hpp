#pragma once

#include <cstdint>
#include <vector>

#include "forestmap/raster.hpp"

namespace forestmap {

/// Seeded forest/non-forest scene. Forest is the union of `n_blobs`
/// axis-aligned rectangles and ellipses with half-axes drawn from
/// [blob_scale/2, blob_scale], each kept inside the image where it fits.
/// Only the first `bands` entries of each spectrum are used.
struct SceneSpec {
  int width = 256;
  int height = 256;
  int bands = 4;
  int n_blobs = 6;
  double blob_scale = 40.0;
  std::vector<double> forest_spectrum{0.05, 0.15, 0.05, 0.6};
  std::vector<double> nonforest_spectrum{0.3, 0.3, 0.25, 0.3};
  double noise_sigma = 0.0;
  int boundary_blur = 0;  // box radius mixing the two spectra across edges
  std::uint64_t seed = 0;

  void validate() const;
};

struct Scene {
  Raster image;
  LabelMask truth;
};

/// Mask geometry, blend fractions and noise come from separate SplitMix64
/// streams, so the mask never depends on noise settings. Samples are
/// computed in double, clamped to [0, 1] and stored as float.
Scene generate_scene(const SceneSpec& spec);

/// Truth as probabilities with round(error_rate * N) seeded pixels inverted,
/// then box-blurred with radius `blur`.
Heatmap oracle_heatmap(const LabelMask& truth, double error_rate, int blur, std::uint64_t seed);

/// NDVI of a normalized R,G,B,NIR raster mapped from [-1, 1] onto [0, 1].
Heatmap ndvi_pseudo_heatmap(const Raster& img);

/// Mean over the (2r+1)^2 window clipped to the grid.
RowMajorMatrix<double> box_blur(const RowMajorMatrix<double>& grid, int radius);

/// FNV-1a 64 over the raw sample bytes of image and mask.
std::uint64_t scene_hash(const Scene& scene);

}  // namespace forestmap
