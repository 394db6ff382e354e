#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <string>

#include <zlib.h>

#include "forestmap/error.hpp"
#include "forestmap/tiff.hpp"

namespace forestmap::tiff {
namespace {

enum Tag : std::uint16_t {
  kImageWidth = 256,
  kImageLength = 257,
  kBitsPerSample = 258,
  kCompression = 259,
  kPhotometric = 262,
  kStripOffsets = 273,
  kSamplesPerPixel = 277,
  kRowsPerStrip = 278,
  kStripByteCounts = 279,
  kPlanarConfig = 284,
  kPredictor = 317,
  kTileWidth = 322,
  kTileLength = 323,
  kTileOffsets = 324,
  kTileByteCounts = 325,
  kExtraSamples = 338,
  kSampleFormat = 339,
  kModelPixelScale = 33550,
  kModelTiepoint = 33922,
  kModelTransformation = 34264,
  kGdalNodata = 42113,
};

enum FieldType : std::uint16_t {
  kByte = 1, kAscii = 2, kShort = 3, kLong = 4, kRational = 5, kSByte = 6, kUndefined = 7,
  kSShort = 8, kSLong = 9, kSRational = 10, kFloat = 11, kDouble = 12,
};

std::size_t field_size(std::uint16_t type) {
  switch (type) {
    case kByte: case kAscii: case kSByte: case kUndefined: return 1;
    case kShort: case kSShort: return 2;
    case kLong: case kSLong: case kFloat: return 4;
    case kRational: case kSRational: case kDouble: return 8;
    default: return 0;
  }
}

int bits_of(SampleType t) {
  switch (t) {
    case SampleType::UInt8: return 8;
    case SampleType::UInt16: return 16;
    case SampleType::UInt32: case SampleType::Float32: return 32;
  }
  return 0;
}

struct Field {
  std::vector<double> numbers;
  std::string text;
};

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, bool big_endian)
      : bytes_(bytes), big_endian_(big_endian) {}

  void require(std::uint64_t offset, std::uint64_t length) const {
    if (offset > bytes_.size() || length > bytes_.size() - offset) {
      throw Error(Errc::CorruptRaster, "TIFF structure points past end of file");
    }
  }

  std::uint64_t uint(std::uint64_t offset, int width) const {
    require(offset, width);
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      const std::uint64_t byte = bytes_[offset + i];
      v |= big_endian_ ? byte << (8 * (width - 1 - i)) : byte << (8 * i);
    }
    return v;
  }

  double number(std::uint64_t offset, std::uint16_t type) const {
    switch (type) {
      case kByte: case kUndefined: return static_cast<double>(uint(offset, 1));
      case kSByte: return static_cast<std::int8_t>(uint(offset, 1));
      case kShort: return static_cast<double>(uint(offset, 2));
      case kSShort: return static_cast<std::int16_t>(uint(offset, 2));
      case kLong: return static_cast<double>(uint(offset, 4));
      case kSLong: return static_cast<std::int32_t>(uint(offset, 4));
      case kRational: {
        const double den = static_cast<double>(uint(offset + 4, 4));
        return den == 0 ? 0.0 : static_cast<double>(uint(offset, 4)) / den;
      }
      case kSRational: {
        const double den = static_cast<std::int32_t>(uint(offset + 4, 4));
        return den == 0 ? 0.0 : static_cast<std::int32_t>(uint(offset, 4)) / den;
      }
      case kFloat: return std::bit_cast<float>(static_cast<std::uint32_t>(uint(offset, 4)));
      case kDouble: return std::bit_cast<double>(uint(offset, 8));
      default: return 0.0;
    }
  }

  std::span<const std::uint8_t> slice(std::uint64_t offset, std::uint64_t length) const {
    require(offset, length);
    return bytes_.subspan(offset, length);
  }

  bool big_endian() const noexcept { return big_endian_; }

 private:
  std::span<const std::uint8_t> bytes_;
  bool big_endian_;
};

std::map<std::uint16_t, Field> read_ifd(const ByteReader& in, std::uint64_t offset) {
  std::map<std::uint16_t, Field> fields;
  const auto count = in.uint(offset, 2);
  for (std::uint64_t e = 0; e < count; ++e) {
    const std::uint64_t entry = offset + 2 + 12 * e;
    const auto tag = static_cast<std::uint16_t>(in.uint(entry, 2));
    const auto type = static_cast<std::uint16_t>(in.uint(entry + 2, 2));
    const auto n = in.uint(entry + 4, 4);
    const std::size_t size = field_size(type);
    if (size == 0) continue;  // unknown type: skip per baseline rules
    const std::uint64_t total = size * n;
    const std::uint64_t data = total <= 4 ? entry + 8 : in.uint(entry + 8, 4);
    in.require(data, total);
    Field field;
    if (type == kAscii) {
      auto chars = in.slice(data, total);
      field.text.assign(chars.begin(), chars.end());
      field.text.erase(std::find(field.text.begin(), field.text.end(), '\0'), field.text.end());
    } else {
      field.numbers.reserve(n);
      for (std::uint64_t i = 0; i < n; ++i) field.numbers.push_back(in.number(data + i * size, type));
    }
    fields.emplace(tag, std::move(field));
  }
  return fields;
}

std::vector<std::uint8_t> inflate_chunk(std::span<const std::uint8_t> packed, std::size_t expected) {
  std::vector<std::uint8_t> out(expected);
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) throw Error(Errc::CorruptRaster, "zlib init failed");
  zs.next_in = const_cast<Bytef*>(packed.data());
  zs.avail_in = static_cast<uInt>(packed.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const std::size_t produced = out.size() - zs.avail_out;
  inflateEnd(&zs);
  if ((rc != Z_STREAM_END && rc != Z_BUF_ERROR && rc != Z_OK) || produced < expected) {
    throw Error(Errc::CorruptRaster, "deflate chunk truncated or corrupt");
  }
  return out;
}

std::vector<std::uint8_t> deflate_chunk(std::span<const std::uint8_t> raw) {
  uLongf size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> out(size);
  if (compress2(out.data(), &size, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw Error(Errc::IoError, "zlib compression failed");
  }
  out.resize(size);
  return out;
}

double sample_value(const std::uint8_t* p, SampleType type, bool big_endian) {
  const int width = bits_of(type) / 8;
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(p[i]) << (8 * (big_endian ? width - 1 - i : i));
  }
  if (type == SampleType::Float32) return std::bit_cast<float>(static_cast<std::uint32_t>(v));
  return static_cast<double>(v);
}

void store_sample(std::uint8_t* p, double value, SampleType type, bool big_endian) {
  const int width = bits_of(type) / 8;
  std::uint64_t v = type == SampleType::Float32
                        ? std::bit_cast<std::uint32_t>(static_cast<float>(value))
                        : static_cast<std::uint64_t>(value);
  for (int i = 0; i < width; ++i) {
    p[big_endian ? width - 1 - i : i] = static_cast<std::uint8_t>(v >> (8 * i));
  }
}

// Undo horizontal differencing in place over native-order integer samples.
void undo_predictor(std::vector<std::uint8_t>& chunk, int row_samples, int rows, int stride,
                    SampleType type, bool big_endian) {
  const int width = bits_of(type) / 8;
  const std::uint64_t mask = width == 4 ? 0xFFFFFFFFULL : (1ULL << (8 * width)) - 1;
  for (int r = 0; r < rows; ++r) {
    std::uint8_t* row = chunk.data() + static_cast<std::size_t>(r) * row_samples * width;
    for (int i = stride; i < row_samples; ++i) {
      const auto prev = static_cast<std::uint64_t>(sample_value(row + (i - stride) * width, type, big_endian));
      const auto cur = static_cast<std::uint64_t>(sample_value(row + i * width, type, big_endian));
      store_sample(row + i * width, static_cast<double>((prev + cur) & mask), type, big_endian);
    }
  }
}

class ByteWriter {
 public:
  explicit ByteWriter(bool big_endian) : big_endian_(big_endian) {}

  void put(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) {
      bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * (big_endian_ ? width - 1 - i : i))));
    }
  }
  void patch(std::size_t at, std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) {
      bytes_[at + i] = static_cast<std::uint8_t>(v >> (8 * (big_endian_ ? width - 1 - i : i)));
    }
  }
  void append(std::span<const std::uint8_t> data) { bytes_.insert(bytes_.end(), data.begin(), data.end()); }
  void align() {
    if (bytes_.size() % 2) bytes_.push_back(0);
  }
  std::size_t size() const noexcept { return bytes_.size(); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  bool big_endian_;
};

struct OutField {
  std::uint16_t tag;
  std::uint16_t type;
  std::vector<double> numbers;
  std::string text;
};

}  // namespace

Image decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw Error(Errc::UnsupportedFormat, "not a TIFF file");
  bool big_endian;
  if (bytes[0] == 'I' && bytes[1] == 'I') {
    big_endian = false;
  } else if (bytes[0] == 'M' && bytes[1] == 'M') {
    big_endian = true;
  } else {
    throw Error(Errc::UnsupportedFormat, "not a TIFF file");
  }
  ByteReader in(bytes, big_endian);
  const auto magic = in.uint(2, 2);
  if (magic == 43) throw Error(Errc::UnsupportedFormat, "BigTIFF is not supported");
  if (magic != 42) throw Error(Errc::UnsupportedFormat, "bad TIFF magic");
  const auto fields = read_ifd(in, in.uint(4, 4));

  auto scalar = [&](std::uint16_t tag, std::optional<double> fallback = std::nullopt) -> double {
    auto it = fields.find(tag);
    if (it == fields.end() || it->second.numbers.empty()) {
      if (fallback) return *fallback;
      throw Error(Errc::UnsupportedFormat, "missing TIFF tag " + std::to_string(tag));
    }
    return it->second.numbers.front();
  };
  auto list = [&](std::uint16_t tag) -> const std::vector<double>* {
    auto it = fields.find(tag);
    return it == fields.end() ? nullptr : &it->second.numbers;
  };

  Image img;
  img.width = static_cast<int>(scalar(kImageWidth));
  img.height = static_cast<int>(scalar(kImageLength));
  img.bands = static_cast<int>(scalar(kSamplesPerPixel, 1));
  if (img.width <= 0 || img.height <= 0 || img.bands <= 0) {
    throw Error(Errc::CorruptRaster, "non-positive TIFF dimensions");
  }
  const int bits = static_cast<int>(scalar(kBitsPerSample, 1));
  if (const auto* all = list(kBitsPerSample)) {
    for (double b : *all) {
      if (static_cast<int>(b) != bits) throw Error(Errc::UnsupportedFormat, "mixed bits per sample");
    }
  }
  const int format = static_cast<int>(scalar(kSampleFormat, 1));
  if (format == 1 && bits == 8) {
    img.type = SampleType::UInt8;
  } else if (format == 1 && bits == 16) {
    img.type = SampleType::UInt16;
  } else if (format == 1 && bits == 32) {
    img.type = SampleType::UInt32;
  } else if (format == 3 && bits == 32) {
    img.type = SampleType::Float32;
  } else {
    throw Error(Errc::UnsupportedFormat, "sample format " + std::to_string(format) + " with " +
                                             std::to_string(bits) + " bits");
  }
  const int compression = static_cast<int>(scalar(kCompression, 1));
  if (compression != 1 && compression != 8 && compression != 32946) {
    throw Error(Errc::UnsupportedFormat, "compression " + std::to_string(compression));
  }
  const int predictor = static_cast<int>(scalar(kPredictor, 1));
  if (predictor != 1 && !(predictor == 2 && img.type != SampleType::Float32)) {
    throw Error(Errc::UnsupportedFormat, "predictor " + std::to_string(predictor));
  }
  const bool planar = static_cast<int>(scalar(kPlanarConfig, 1)) == 2;

  const bool tiled = fields.contains(kTileWidth);
  int chunk_w, chunk_h;
  const std::vector<double>* offsets;
  const std::vector<double>* counts;
  if (tiled) {
    chunk_w = static_cast<int>(scalar(kTileWidth));
    chunk_h = static_cast<int>(scalar(kTileLength));
    offsets = list(kTileOffsets);
    counts = list(kTileByteCounts);
  } else {
    chunk_w = img.width;
    chunk_h = std::min(img.height, static_cast<int>(scalar(kRowsPerStrip, img.height)));
    offsets = list(kStripOffsets);
    counts = list(kStripByteCounts);
  }
  if (chunk_w <= 0 || chunk_h <= 0 || !offsets) throw Error(Errc::CorruptRaster, "bad chunk layout");
  const int across = (img.width + chunk_w - 1) / chunk_w;
  const int down = (img.height + chunk_h - 1) / chunk_h;
  const int planes = planar ? img.bands : 1;
  const int chunk_spp = planar ? 1 : img.bands;
  const std::size_t n_chunks = static_cast<std::size_t>(across) * down * planes;
  if (offsets->size() < n_chunks || (counts && counts->size() < n_chunks)) {
    throw Error(Errc::CorruptRaster, "chunk table shorter than image");
  }
  const int sample_bytes = bits / 8;

  img.samples.assign(static_cast<std::size_t>(img.width) * img.height * img.bands, 0.0);
  for (int plane = 0; plane < planes; ++plane) {
    for (int cy = 0; cy < down; ++cy) {
      for (int cx = 0; cx < across; ++cx) {
        const std::size_t k = (static_cast<std::size_t>(plane) * down + cy) * across + cx;
        const int rows = tiled ? chunk_h : std::min(chunk_h, img.height - cy * chunk_h);
        const std::size_t expected =
            static_cast<std::size_t>(chunk_w) * rows * chunk_spp * sample_bytes;
        const auto offset = static_cast<std::uint64_t>((*offsets)[k]);
        std::vector<std::uint8_t> chunk;
        if (compression == 1) {
          const std::uint64_t stored = counts ? static_cast<std::uint64_t>((*counts)[k]) : expected;
          if (stored < expected) throw Error(Errc::CorruptRaster, "strip shorter than its rows");
          auto raw = in.slice(offset, expected);
          chunk.assign(raw.begin(), raw.end());
        } else {
          if (!counts) throw Error(Errc::CorruptRaster, "compressed data without byte counts");
          chunk = inflate_chunk(in.slice(offset, static_cast<std::uint64_t>((*counts)[k])), expected);
        }
        if (predictor == 2) {
          undo_predictor(chunk, chunk_w * chunk_spp, rows, chunk_spp, img.type, big_endian);
        }
        for (int r = 0; r < rows; ++r) {
          const int y = cy * chunk_h + r;
          if (y >= img.height) break;
          for (int c = 0; c < chunk_w; ++c) {
            const int x = cx * chunk_w + c;
            if (x >= img.width) break;
            for (int s = 0; s < chunk_spp; ++s) {
              const int band = planar ? plane : s;
              const std::uint8_t* p =
                  chunk.data() + ((static_cast<std::size_t>(r) * chunk_w + c) * chunk_spp + s) * sample_bytes;
              img.samples[(static_cast<std::size_t>(y) * img.width + x) * img.bands + band] =
                  sample_value(p, img.type, big_endian);
            }
          }
        }
      }
    }
  }

  if (auto it = fields.find(kGdalNodata); it != fields.end() && !it->second.text.empty()) {
    char* end = nullptr;
    const double v = std::strtod(it->second.text.c_str(), &end);
    if (end != it->second.text.c_str()) img.nodata = v;
  }
  if (const auto* m = list(kModelTransformation); m && m->size() >= 8) {
    img.geotransform = Geotransform{(*m)[3], (*m)[0], (*m)[1], (*m)[7], (*m)[4], (*m)[5]};
  } else if (const auto* tie = list(kModelTiepoint); tie && tie->size() >= 6) {
    const auto* scale = list(kModelPixelScale);
    if (scale && scale->size() >= 2) {
      const double sx = (*scale)[0], sy = (*scale)[1];
      img.geotransform = Geotransform{(*tie)[3] - (*tie)[0] * sx, sx, 0.0,
                                      (*tie)[4] + (*tie)[1] * sy, 0.0, -sy};
    }
  }
  return img;
}

std::vector<std::uint8_t> encode(const Image& img, const WriteOptions& opt) {
  if (img.width <= 0 || img.height <= 0 || img.bands <= 0 ||
      img.samples.size() != static_cast<std::size_t>(img.width) * img.height * img.bands) {
    throw Error(Errc::InvalidArgument, "inconsistent TIFF image shape");
  }
  const bool tiled = opt.layout == Layout::Tiles;
  if (tiled && (opt.tile_size <= 0 || opt.tile_size % 16 != 0)) {
    throw Error(Errc::InvalidArgument, "tile size must be a positive multiple of 16");
  }
  const int sample_bytes = bits_of(img.type) / 8;
  const int planes = opt.planar ? img.bands : 1;
  const int chunk_spp = opt.planar ? 1 : img.bands;
  int chunk_w = img.width, chunk_h;
  if (tiled) {
    chunk_w = chunk_h = opt.tile_size;
  } else if (opt.rows_per_strip > 0) {
    chunk_h = std::min(opt.rows_per_strip, img.height);
  } else {
    const int row_bytes = img.width * chunk_spp * sample_bytes;
    chunk_h = std::clamp(8192 / std::max(row_bytes, 1), 1, img.height);
  }
  const int across = (img.width + chunk_w - 1) / chunk_w;
  const int down = (img.height + chunk_h - 1) / chunk_h;

  ByteWriter out(opt.big_endian);
  out.put(opt.big_endian ? 0x4D4D : 0x4949, 2);
  out.put(42, 2);
  out.put(0, 4);  // IFD offset, patched below

  std::vector<double> chunk_offsets, chunk_counts;
  for (int plane = 0; plane < planes; ++plane) {
    for (int cy = 0; cy < down; ++cy) {
      for (int cx = 0; cx < across; ++cx) {
        const int rows = tiled ? chunk_h : std::min(chunk_h, img.height - cy * chunk_h);
        std::vector<std::uint8_t> raw(static_cast<std::size_t>(chunk_w) * rows * chunk_spp * sample_bytes, 0);
        for (int r = 0; r < rows; ++r) {
          const int y = cy * chunk_h + r;
          if (y >= img.height) break;
          for (int c = 0; c < chunk_w; ++c) {
            const int x = cx * chunk_w + c;
            if (x >= img.width) break;
            for (int s = 0; s < chunk_spp; ++s) {
              const int band = opt.planar ? plane : s;
              store_sample(raw.data() + ((static_cast<std::size_t>(r) * chunk_w + c) * chunk_spp + s) * sample_bytes,
                           img.samples[(static_cast<std::size_t>(y) * img.width + x) * img.bands + band],
                           img.type, opt.big_endian);
            }
          }
        }
        if (opt.compression == Compression::Deflate) raw = deflate_chunk(raw);
        out.align();
        chunk_offsets.push_back(static_cast<double>(out.size()));
        chunk_counts.push_back(static_cast<double>(raw.size()));
        out.append(raw);
      }
    }
  }

  std::vector<OutField> ifd;
  auto add = [&](std::uint16_t tag, std::uint16_t type, std::vector<double> v) {
    ifd.push_back({tag, type, std::move(v), {}});
  };
  add(kImageWidth, kLong, {static_cast<double>(img.width)});
  add(kImageLength, kLong, {static_cast<double>(img.height)});
  add(kBitsPerSample, kShort, std::vector<double>(img.bands, bits_of(img.type)));
  add(kCompression, kShort, {opt.compression == Compression::Deflate ? 8.0 : 1.0});
  const bool rgb = (img.bands == 3 || img.bands == 4) && img.type == SampleType::UInt8;
  add(kPhotometric, kShort, {rgb ? 2.0 : 1.0});
  if (!tiled) add(kStripOffsets, kLong, chunk_offsets);
  add(kSamplesPerPixel, kShort, {static_cast<double>(img.bands)});
  if (!tiled) {
    add(kRowsPerStrip, kLong, {static_cast<double>(chunk_h)});
    add(kStripByteCounts, kLong, chunk_counts);
  }
  add(kPlanarConfig, kShort, {opt.planar ? 2.0 : 1.0});
  if (tiled) {
    add(kTileWidth, kLong, {static_cast<double>(chunk_w)});
    add(kTileLength, kLong, {static_cast<double>(chunk_h)});
    add(kTileOffsets, kLong, chunk_offsets);
    add(kTileByteCounts, kLong, chunk_counts);
  }
  const int extra = img.bands - (rgb ? 3 : 1);
  if (extra > 0) add(kExtraSamples, kShort, std::vector<double>(extra, 0.0));
  add(kSampleFormat, kShort,
      std::vector<double>(img.bands, img.type == SampleType::Float32 ? 3.0 : 1.0));
  if (img.geotransform) {
    const auto& g = *img.geotransform;
    if (g[2] == 0.0 && g[4] == 0.0) {
      add(kModelPixelScale, kDouble, {g[1], -g[5], 0.0});
      add(kModelTiepoint, kDouble, {0.0, 0.0, 0.0, g[0], g[3], 0.0});
    } else {
      add(kModelTransformation, kDouble,
          {g[1], g[2], 0, g[0], g[4], g[5], 0, g[3], 0, 0, 0, 0, 0, 0, 0, 1});
    }
  }
  if (img.nodata) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", *img.nodata);
    ifd.push_back({kGdalNodata, kAscii, {}, buf});
  }

  out.align();
  const std::size_t ifd_offset = out.size();
  out.patch(4, ifd_offset, 4);
  out.put(ifd.size(), 2);
  std::vector<std::pair<std::size_t, const OutField*>> deferred;
  for (const auto& f : ifd) {
    const std::size_t count = f.type == kAscii ? f.text.size() + 1 : f.numbers.size();
    out.put(f.tag, 2);
    out.put(f.type, 2);
    out.put(count, 4);
    if (count * field_size(f.type) <= 4) {
      std::size_t written = 0;
      for (double v : f.numbers) {
        out.put(static_cast<std::uint64_t>(v), static_cast<int>(field_size(f.type)));
        written += field_size(f.type);
      }
      for (char ch : f.text) out.put(static_cast<std::uint8_t>(ch), 1), ++written;
      if (f.type == kAscii) out.put(0, 1), ++written;
      for (; written < 4; ++written) out.put(0, 1);
    } else {
      deferred.emplace_back(out.size(), &f);
      out.put(0, 4);
    }
  }
  out.put(0, 4);  // no further IFDs
  for (const auto& [slot, f] : deferred) {
    out.align();
    out.patch(slot, out.size(), 4);
    if (f->type == kAscii) {
      for (char ch : f->text) out.put(static_cast<std::uint8_t>(ch), 1);
      out.put(0, 1);
    } else if (f->type == kDouble) {
      for (double v : f->numbers) out.put(std::bit_cast<std::uint64_t>(v), 8);
    } else {
      for (double v : f->numbers) {
        out.put(static_cast<std::uint64_t>(v), static_cast<int>(field_size(f->type)));
      }
    }
  }
  return out.take();
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(Errc::FileNotFound, path.string());
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::FileNotFound, path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f), {});
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(Errc::IoError, "short write to " + path.string());
}

Image read(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode(bytes);
}

void write(const std::filesystem::path& path, const Image& image, const WriteOptions& options) {
  write_file(path, encode(image, options));
}

}  // namespace forestmap::tiff
