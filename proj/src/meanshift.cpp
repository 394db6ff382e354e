#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>
#include <unordered_map>

#include "forestmap/error.hpp"
#include "forestmap/segmentation.hpp"
#include "forestmap/tiff.hpp"

namespace forestmap {

void MeanShiftParams::validate() const {
  if (!(spatial_radius > 0) || !(range_radius > 0) || min_segment_size < 1 || max_iterations < 1 ||
      !(convergence_eps > 0)) {
    throw Error(Errc::InvalidArgument, "mean-shift parameters out of range");
  }
}

SegmentMap SegmentMap::from_labels(const LabelGrid& labels) {
  SegmentMap out;
  out.width = static_cast<int>(labels.cols());
  out.height = static_cast<int>(labels.rows());
  out.labels.resize(labels.rows(), labels.cols());
  std::unordered_map<std::int32_t, std::int32_t> renumber;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const std::int32_t old = labels.data()[i];
    if (old < 0) throw Error(Errc::InvalidArgument, "negative segment id");
    auto [it, fresh] = renumber.try_emplace(old, static_cast<std::int32_t>(renumber.size()));
    if (fresh) out.segment_sizes.push_back(0);
    out.labels.data()[i] = it->second;
    ++out.segment_sizes[it->second];
  }
  out.segment_count = static_cast<int>(renumber.size());
  return out;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::int32_t find(std::int32_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }

 private:
  std::vector<std::int32_t> parent_;
};

void shift_pixel(const Eigen::MatrixXd& data, int width, int height, int x0, int y0,
                 const MeanShiftParams& p, double* out) {
  const int bands = static_cast<int>(data.rows());
  const double hs2 = p.spatial_radius * p.spatial_radius;
  const double hr2 = p.range_radius * p.range_radius;
  const double spatial_to_range = (p.range_radius / p.spatial_radius) * (p.range_radius / p.spatial_radius);
  const double eps2 = p.convergence_eps * p.convergence_eps;

  double cx = x0, cy = y0;
  double center[8];
  double sum[8];
  const auto col0 = static_cast<Eigen::Index>(y0) * width + x0;
  for (int b = 0; b < bands; ++b) center[b] = data(b, col0);

  for (int it = 0; it < p.max_iterations; ++it) {
    const int x_lo = std::max(0, static_cast<int>(std::floor(cx - p.spatial_radius)));
    const int x_hi = std::min(width - 1, static_cast<int>(std::ceil(cx + p.spatial_radius)));
    const int y_lo = std::max(0, static_cast<int>(std::floor(cy - p.spatial_radius)));
    const int y_hi = std::min(height - 1, static_cast<int>(std::ceil(cy + p.spatial_radius)));
    double sx = 0, sy = 0;
    std::fill(sum, sum + bands, 0.0);
    std::int64_t n = 0;
    for (int y = y_lo; y <= y_hi; ++y) {
      const double dy = y - cy;
      for (int x = x_lo; x <= x_hi; ++x) {
        const double dx = x - cx;
        if (dx * dx + dy * dy > hs2) continue;
        const double* s = data.col(static_cast<Eigen::Index>(y) * width + x).data();
        double d2 = 0;
        for (int b = 0; b < bands; ++b) d2 += (s[b] - center[b]) * (s[b] - center[b]);
        if (d2 > hr2) continue;
        sx += x;
        sy += y;
        for (int b = 0; b < bands; ++b) sum[b] += s[b];
        ++n;
      }
    }
    if (n == 0) break;
    const double inv = 1.0 / static_cast<double>(n);
    const double nx = sx * inv, ny = sy * inv;
    double shift2 = spatial_to_range * ((nx - cx) * (nx - cx) + (ny - cy) * (ny - cy));
    for (int b = 0; b < bands; ++b) {
      const double nv = sum[b] * inv;
      shift2 += (nv - center[b]) * (nv - center[b]);
      center[b] = nv;
    }
    cx = nx;
    cy = ny;
    if (shift2 < eps2) break;
  }
  std::copy(center, center + bands, out);
}

}  // namespace

Raster mean_shift_filter(const Raster& img, const MeanShiftParams& params, int threads) {
  params.validate();
  if (img.bands() > 8) throw Error(Errc::InvalidArgument, "at most 8 bands supported");
  const float* raw = img.samples().data();
  for (Eigen::Index i = 0; i < img.samples().size(); ++i) {
    if (img.is_nodata(raw[i])) {
      throw Error(Errc::InvalidArgument, "segmentation input contains nodata samples");
    }
    if (raw[i] > 1.0f + 1e-6f) {
      throw Error(Errc::InvalidArgument, "input is not normalized to [0, 1]");
    }
  }
  const int width = img.width(), height = img.height(), bands = img.bands();
  // Column-major bands x pixels keeps each pixel's spectrum contiguous.
  const Eigen::MatrixXd data = img.samples().cast<double>().transpose();
  Eigen::MatrixXd modes(bands, data.cols());

  const int workers = std::clamp(threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency()),
                                 1, height);
  auto run_rows = [&](int first) {
    for (int y = first; y < height; y += workers) {
      for (int x = 0; x < width; ++x) {
        shift_pixel(data, width, height, x, y, params,
                    modes.col(static_cast<Eigen::Index>(y) * width + x).data());
      }
    }
  };
  if (workers == 1) {
    run_rows(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_rows, w);
  }
  SampleMatrix out = modes.transpose().cast<float>();
  return Raster(width, height, std::move(out), img.nodata(), img.geotransform());
}

SegmentMap label_modes(const Raster& filtered, const MeanShiftParams& params) {
  params.validate();
  const int width = filtered.width(), height = filtered.height();
  const auto& s = filtered.samples();
  const double hr2 = params.range_radius * params.range_radius;
  auto close = [&](Eigen::Index a, Eigen::Index b) {
    double d2 = 0;
    for (Eigen::Index k = 0; k < s.cols(); ++k) {
      const double d = static_cast<double>(s(a, k)) - static_cast<double>(s(b, k));
      d2 += d * d;
    }
    return d2 <= hr2;
  };
  DisjointSets sets(static_cast<std::size_t>(s.rows()));
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Eigen::Index i = filtered.index(x, y);
      if (x + 1 < width && close(i, i + 1)) sets.unite(static_cast<std::int32_t>(i), static_cast<std::int32_t>(i + 1));
      if (y + 1 < height && close(i, i + width)) {
        sets.unite(static_cast<std::int32_t>(i), static_cast<std::int32_t>(i + width));
      }
    }
  }
  LabelGrid roots(height, width);
  for (Eigen::Index i = 0; i < roots.size(); ++i) roots.data()[i] = sets.find(static_cast<std::int32_t>(i));
  return SegmentMap::from_labels(roots);
}

SegmentMap merge_small_segments(const SegmentMap& seg, const Raster& filtered,
                                const MeanShiftParams& params) {
  params.validate();
  if (seg.width != filtered.width() || seg.height != filtered.height()) {
    throw Error(Errc::DimensionMismatch, "segment map and filtered raster differ in size");
  }
  const int n = seg.segment_count;
  const int width = seg.width, height = seg.height;
  const Eigen::Index bands = filtered.bands();

  std::vector<std::int64_t> size(seg.segment_sizes);
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(bands, n);
  for (Eigen::Index i = 0; i < seg.pixel_count(); ++i) {
    sums.col(seg[i]) += filtered.samples().row(i).transpose().cast<double>();
  }
  std::vector<std::set<std::int32_t>> adjacent(n);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::int32_t a = seg.labels(y, x);
      if (x + 1 < width && seg.labels(y, x + 1) != a) {
        adjacent[a].insert(seg.labels(y, x + 1));
        adjacent[seg.labels(y, x + 1)].insert(a);
      }
      if (y + 1 < height && seg.labels(y + 1, x) != a) {
        adjacent[a].insert(seg.labels(y + 1, x));
        adjacent[seg.labels(y + 1, x)].insert(a);
      }
    }
  }

  const std::int64_t min_size = params.min_segment_size;
  std::set<std::int32_t> pending;
  for (std::int32_t s = 0; s < n; ++s) {
    if (size[s] < min_size) pending.insert(s);
  }
  DisjointSets merged(static_cast<std::size_t>(n));
  int alive = n;
  while (!pending.empty() && alive > 1) {
    const std::int32_t s = *pending.begin();
    pending.erase(pending.begin());
    if (size[s] >= min_size || adjacent[s].empty()) continue;

    const Eigen::VectorXd mean_s = sums.col(s) / static_cast<double>(size[s]);
    std::int32_t best = -1;
    double best_d2 = 0;
    for (std::int32_t nb : adjacent[s]) {
      const double d2 = (sums.col(nb) / static_cast<double>(size[nb]) - mean_s).squaredNorm();
      if (best < 0 || d2 < best_d2) {
        best = nb;
        best_d2 = d2;
      }
    }

    size[best] += size[s];
    size[s] = 0;
    sums.col(best) += sums.col(s);
    for (std::int32_t nb : adjacent[s]) {
      adjacent[nb].erase(s);
      if (nb != best) {
        adjacent[nb].insert(best);
        adjacent[best].insert(nb);
      }
    }
    adjacent[s].clear();
    merged.unite(best, s);
    --alive;
    if (size[best] < min_size) pending.insert(best);
  }

  // Resolve every original id to its absorbing survivor.
  std::vector<std::int32_t> owner(n);
  for (std::int32_t s = 0; s < n; ++s) owner[s] = merged.find(s);
  std::vector<std::int32_t> survivor_of_root(n, -1);
  for (std::int32_t s = 0; s < n; ++s) {
    if (size[s] > 0) survivor_of_root[owner[s]] = s;
  }
  LabelGrid out(height, width);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = survivor_of_root[owner[seg[i]]];
  return SegmentMap::from_labels(out);
}

SegmentMap segment(const Raster& img, const MeanShiftParams& params, int threads) {
  const Raster filtered = mean_shift_filter(img, params, threads);
  return merge_small_segments(label_modes(filtered, params), filtered, params);
}

void write_segment_map(const SegmentMap& seg, const std::optional<Geotransform>& geotransform,
                       const std::filesystem::path& path) {
  tiff::Image t;
  t.width = seg.width;
  t.height = seg.height;
  t.bands = 1;
  t.type = tiff::SampleType::UInt32;
  t.samples.assign(seg.labels.data(), seg.labels.data() + seg.labels.size());
  t.geotransform = geotransform;
  tiff::write(path, t);
}

SegmentMap read_segment_map(const std::filesystem::path& path) {
  const tiff::Image t = tiff::read(path);
  if (t.bands != 1 || t.type == tiff::SampleType::Float32) {
    throw Error(Errc::UnsupportedFormat, "segment map must be a single integer band");
  }
  LabelGrid labels(t.height, t.width);
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    if (t.samples[i] > 2147483647.0) throw Error(Errc::UnsupportedFormat, "segment id overflows int32");
    labels.data()[i] = static_cast<std::int32_t>(t.samples[i]);
  }
  return SegmentMap::from_labels(labels);
}

}  // namespace forestmap
