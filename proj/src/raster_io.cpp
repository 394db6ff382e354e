#include "forestmap/raster_io.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "forestmap/error.hpp"
#include "forestmap/png.hpp"

namespace forestmap {

Raster read_image(const std::filesystem::path& path) {
  tiff::Image t = tiff::read(path);
  if (t.bands != 1 && t.bands != 3 && t.bands != 4) {
    throw Error(Errc::UnsupportedFormat, std::to_string(t.bands) + " bands in " + path.string());
  }
  if (t.type == tiff::SampleType::UInt32) {
    throw Error(Errc::UnsupportedFormat, "32-bit integer imagery in " + path.string());
  }
  SampleMatrix samples(static_cast<Eigen::Index>(t.width) * t.height, t.bands);
  std::transform(t.samples.begin(), t.samples.end(), samples.data(),
                 [](double v) { return static_cast<float>(v); });
  std::optional<float> nodata;
  if (t.nodata) nodata = static_cast<float>(*t.nodata);
  return Raster(t.width, t.height, std::move(samples), nodata, t.geotransform);
}

LabelMask mask_from_values(int width, int height, const std::vector<double>& values) {
  bool seen[3] = {false, false, false};
  for (double v : values) {
    if (!(v == 0.0 || v == 1.0 || v == 2.0)) {
      throw Error(Errc::InvalidLabels, "mask value " + std::to_string(v) + " outside {0,1,2}");
    }
    seen[static_cast<int>(v)] = true;
  }
  if (seen[0] && seen[2]) throw Error(Errc::InvalidLabels, "mask mixes {0,1} and {1,2} conventions");
  const std::uint8_t shift = seen[2] ? 1 : 0;
  LabelMask::Grid grid(height, width);
  std::transform(values.begin(), values.end(), grid.data(),
                 [shift](double v) { return static_cast<std::uint8_t>(static_cast<int>(v) - shift); });
  return LabelMask(std::move(grid));
}

LabelMask read_mask(const std::filesystem::path& path) {
  const auto bytes = tiff::read_file(path);
  if (png::is_png(bytes)) {
    const png::Image img = png::decode_gray8(bytes);
    return mask_from_values(img.width, img.height,
                            std::vector<double>(img.pixels.begin(), img.pixels.end()));
  }
  const tiff::Image t = tiff::decode(bytes);
  if (t.bands != 1) throw Error(Errc::UnsupportedFormat, "mask must have a single band");
  return mask_from_values(t.width, t.height, t.samples);
}

Heatmap heatmap_from_values(int width, int height, const std::vector<double>& values) {
  constexpr double kSlack = 1e-3;
  Heatmap::Grid grid(height, width);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!(v >= -kSlack && v <= 1.0 + kSlack)) {
      throw Error(Errc::OutOfRange, "heatmap value " + std::to_string(v) + " outside [0, 1]");
    }
    grid.data()[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
  return Heatmap(std::move(grid));
}

Heatmap read_heatmap(const std::filesystem::path& path) {
  const tiff::Image t = tiff::read(path);
  if (t.bands != 1) throw Error(Errc::UnsupportedFormat, "heatmap must have a single band");
  return heatmap_from_values(t.width, t.height, t.samples);
}

void write_binary_map(const LabelMask& map, const std::optional<Geotransform>& geotransform,
                      const std::filesystem::path& path) {
  tiff::Image t;
  t.width = map.width();
  t.height = map.height();
  t.bands = 1;
  t.type = tiff::SampleType::UInt8;
  t.samples.assign(map.labels().data(), map.labels().data() + map.size());
  t.geotransform = geotransform;
  tiff::write(path, t);
}

void write_image(const Raster& img, const std::filesystem::path& path, tiff::SampleType type,
                 const tiff::WriteOptions& options) {
  tiff::Image t;
  t.width = img.width();
  t.height = img.height();
  t.bands = img.bands();
  t.type = type;
  t.samples.assign(img.samples().data(), img.samples().data() + img.samples().size());
  if (type != tiff::SampleType::Float32) {
    const double hi = type == tiff::SampleType::UInt8 ? 255.0
                      : type == tiff::SampleType::UInt16 ? 65535.0
                                                         : 4294967295.0;
    for (double v : t.samples) {
      if (!(v >= 0.0 && v <= hi) || v != std::floor(v)) {
        throw Error(Errc::InvalidArgument, "sample not representable in the requested integer type");
      }
    }
  }
  if (img.nodata()) t.nodata = *img.nodata();
  t.geotransform = img.geotransform();
  tiff::write(path, t, options);
}

void write_heatmap(const Heatmap& heat, const std::optional<Geotransform>& geotransform,
                   const std::filesystem::path& path) {
  tiff::Image t;
  t.width = heat.width();
  t.height = heat.height();
  t.bands = 1;
  t.type = tiff::SampleType::Float32;
  t.samples.assign(heat.prob().data(), heat.prob().data() + heat.prob().size());
  t.geotransform = geotransform;
  tiff::write(path, t);
}

}  // namespace forestmap
