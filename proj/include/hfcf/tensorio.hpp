// Copyright 2026 The HFCF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Raster images, coefficient tensors, colour conversion, resampling and the
// on-disk formats shared by every stage of the toolkit.

#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hfcf/bytes.hpp"
#include "hfcf/error.hpp"

namespace hfcf {

enum class ColorSpace { RGB, YCbCr, Gray };

inline const char* to_string(ColorSpace space) {
  switch (space) {
    case ColorSpace::RGB: return "RGB";
    case ColorSpace::YCbCr: return "YCbCr";
    case ColorSpace::Gray: return "Gray";
  }
  return "?";
}

// Dense H x W grid of doubles, row-major.
struct Plane {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Plane() = default;
  Plane(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}

  double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  bool same_shape(const Plane& other) const { return rows == other.rows && cols == other.cols; }

  friend bool operator==(const Plane&, const Plane&) = default;
};

// Interleaved pixel grid; samples are 8-bit intensities widened to double.
struct RasterImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 0;
  ColorSpace space = ColorSpace::RGB;
  std::vector<double> data;

  RasterImage() = default;
  RasterImage(std::size_t w, std::size_t h, std::size_t c, ColorSpace s, double fill = 0.0)
      : width(w), height(h), channels(c), space(s), data(w * h * c, fill) {}

  double& at(std::size_t y, std::size_t x, std::size_t c) { return data[(y * width + x) * channels + c]; }
  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return data[(y * width + x) * channels + c];
  }

  // Throws DimError / RangeError when the invariants do not hold.
  void validate() const {
    if (channels != 1 && channels != 3) throw DimError("RasterImage: channels must be 1 or 3");
    if (data.size() != width * height * channels) throw DimError("RasterImage: data length mismatch");
    for (double v : data)
      if (!(v >= 0.0 && v <= 255.0)) throw RangeError("RasterImage: sample outside [0, 255]");
  }

  Plane channel(std::size_t c) const {
    if (c >= channels) throw DimError("RasterImage: channel index out of range");
    Plane p(height, width);
    for (std::size_t i = 0; i < height * width; ++i) p.values[i] = data[i * channels + c];
    return p;
  }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;
};

// H x W x K tensor, row-major with the channel index innermost.
struct Tensor3 {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t depth = 0;
  std::vector<double> data;
  std::vector<std::string> labels;  // empty, or exactly `depth` entries

  Tensor3() = default;
  Tensor3(std::size_t h, std::size_t w, std::size_t k, double fill = 0.0)
      : height(h), width(w), depth(k), data(h * w * k, fill) {}

  double& at(std::size_t i, std::size_t j, std::size_t k) { return data[(i * width + j) * depth + k]; }
  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return data[(i * width + j) * depth + k];
  }

  void validate() const {
    if (data.size() != height * width * depth) throw DimError("Tensor3: data length mismatch");
    if (!labels.empty() && labels.size() != depth) throw DimError("Tensor3: label count mismatch");
  }

  Plane plane(std::size_t k) const {
    if (k >= depth) throw DimError("Tensor3: plane index out of range");
    Plane p(height, width);
    for (std::size_t i = 0; i < height * width; ++i) p.values[i] = data[i * depth + k];
    return p;
  }

  void set_plane(std::size_t k, const Plane& p) {
    if (k >= depth || p.rows != height || p.cols != width) throw DimError("Tensor3: plane shape mismatch");
    for (std::size_t i = 0; i < height * width; ++i) data[i * depth + k] = p.values[i];
  }

  static Tensor3 from_planes(std::span<const Plane> planes, std::vector<std::string> labels = {}) {
    if (planes.empty()) throw DimError("Tensor3: no planes");
    Tensor3 t(planes[0].rows, planes[0].cols, planes.size());
    for (std::size_t k = 0; k < planes.size(); ++k) t.set_plane(k, planes[k]);
    t.labels = std::move(labels);
    t.validate();
    return t;
  }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;
};

inline double clamp_sample(double v) { return std::clamp(v, 0.0, 255.0); }

// ITU-R BT.601 full-range (JPEG) conversion.
inline RasterImage rgb_to_ycbcr(const RasterImage& img) {
  if (img.space != ColorSpace::RGB || img.channels != 3) throw SpaceError("rgb_to_ycbcr: input is not RGB");
  RasterImage out(img.width, img.height, 3, ColorSpace::YCbCr);
  for (std::size_t i = 0; i < img.width * img.height; ++i) {
    const double r = img.data[3 * i], g = img.data[3 * i + 1], b = img.data[3 * i + 2];
    out.data[3 * i] = clamp_sample(0.299 * r + 0.587 * g + 0.114 * b);
    out.data[3 * i + 1] = clamp_sample(128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b);
    out.data[3 * i + 2] = clamp_sample(128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b);
  }
  return out;
}

// Bilinear resampling with corner-aligned grids: output sample y maps to
// input coordinate y * (H - 1) / (factor * H - 1).
inline RasterImage upsample_bilinear(const RasterImage& img, std::size_t factor) {
  if (factor < 1) throw ParamError("upsample_bilinear: factor must be >= 1");
  if (factor == 1) return img;
  if (img.width == 0 || img.height == 0) throw DimError("upsample_bilinear: empty image");
  const std::size_t out_h = img.height * factor, out_w = img.width * factor;
  RasterImage out(out_w, out_h, img.channels, img.space);

  struct Tap {
    std::size_t lo, hi;
    double frac;
  };
  auto taps = [factor](std::size_t in_n) {
    const std::size_t out_n = in_n * factor;
    std::vector<Tap> t(out_n);
    const double scale = in_n > 1 ? double(in_n - 1) / double(out_n - 1) : 0.0;
    for (std::size_t o = 0; o < out_n; ++o) {
      const double src = double(o) * scale;
      auto lo = static_cast<std::size_t>(std::floor(src));
      lo = std::min(lo, in_n - 1);
      const std::size_t hi = std::min(lo + 1, in_n - 1);
      t[o] = {lo, hi, src - double(lo)};
    }
    return t;
  };
  const auto ty = taps(img.height), tx = taps(img.width);
  for (std::size_t y = 0; y < out_h; ++y) {
    const Tap& a = ty[y];
    for (std::size_t x = 0; x < out_w; ++x) {
      const Tap& b = tx[x];
      for (std::size_t c = 0; c < img.channels; ++c) {
        const double top = img.at(a.lo, b.lo, c) * (1.0 - b.frac) + img.at(a.lo, b.hi, c) * b.frac;
        const double bot = img.at(a.hi, b.lo, c) * (1.0 - b.frac) + img.at(a.hi, b.hi, c) * b.frac;
        out.at(y, x, c) = clamp_sample(top * (1.0 - a.frac) + bot * a.frac);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tensor file: "HFT1" | u32 height | u32 width | u32 depth | float32 values.

inline constexpr std::string_view kTensorMagic = "HFT1";

inline bytes::Buffer encode_tensor(const Tensor3& t) {
  t.validate();
  if (t.height == 0 || t.width == 0 || t.depth == 0) throw FormatError("tensor with a zero dimension");
  if (t.height > UINT32_MAX || t.width > UINT32_MAX || t.depth > UINT32_MAX)
    throw FormatError("tensor dimension exceeds u32");
  bytes::Buffer out;
  out.reserve(16 + 4 * t.data.size());
  out.insert(out.end(), kTensorMagic.begin(), kTensorMagic.end());
  bytes::put_le(out, static_cast<std::uint32_t>(t.height));
  bytes::put_le(out, static_cast<std::uint32_t>(t.width));
  bytes::put_le(out, static_cast<std::uint32_t>(t.depth));
  for (double v : t.data) bytes::put_f32(out, static_cast<float>(v));
  return out;
}

inline Tensor3 decode_tensor(std::span<const std::uint8_t> data) {
  if (!bytes::starts_with(data, kTensorMagic)) throw FormatError("tensor: bad magic");
  bytes::Reader in(data.subspan(4));
  Tensor3 t;
  t.height = in.get_le<std::uint32_t>();
  t.width = in.get_le<std::uint32_t>();
  t.depth = in.get_le<std::uint32_t>();
  if (t.height == 0 || t.width == 0 || t.depth == 0) throw FormatError("tensor: zero dimension");
  const std::uint64_t count = std::uint64_t(t.height) * t.width * t.depth;
  if (in.remaining() != count * 4) throw FormatError("tensor: payload size does not match header");
  t.data.resize(count);
  for (auto& v : t.data) v = in.get_f32();
  return t;
}

inline void write_tensor(const Tensor3& t, const std::string& path) {
  bytes::write_file(path, encode_tensor(t));
}

inline Tensor3 read_tensor(const std::string& path) { return decode_tensor(bytes::read_file(path)); }

// ---------------------------------------------------------------------------
// Raster input: binary PPM (P6) and PNG.

namespace detail {

inline RasterImage decode_ppm(std::span<const std::uint8_t> data) {
  std::size_t pos = 2;
  auto next_token = [&]() -> std::size_t {
    for (;;) {
      while (pos < data.size() && std::isspace(data[pos])) ++pos;
      if (pos < data.size() && data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    if (pos >= data.size() || !std::isdigit(data[pos])) throw FormatError("ppm: malformed header");
    std::size_t value = 0;
    while (pos < data.size() && std::isdigit(data[pos])) {
      value = value * 10 + (data[pos++] - '0');
      if (value > (1u << 24)) throw FormatError("ppm: header value too large");
    }
    return value;
  };
  const std::size_t width = next_token(), height = next_token(), maxval = next_token();
  if (width == 0 || height == 0) throw FormatError("ppm: zero dimension");
  if (maxval == 0 || maxval > 255) throw FormatError("ppm: only 8-bit maxval supported");
  if (pos >= data.size() || !std::isspace(data[pos])) throw FormatError("ppm: malformed header");
  ++pos;
  const std::size_t count = width * height * 3;
  if (data.size() - pos < count) throw FormatError("ppm: truncated pixel data");
  RasterImage img(width, height, 3, ColorSpace::RGB);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint8_t v = data[pos + i];
    if (v > maxval) throw FormatError("ppm: sample exceeds maxval");
    img.data[i] = double(v);
  }
  return img;
}

inline RasterImage decode_png(std::span<const std::uint8_t> data) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, data.data(), data.size()))
    throw FormatError(std::string("png: ") + image.message);
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw FormatError("png: " + msg);
  }
  RasterImage img(image.width, image.height, 3, ColorSpace::RGB);
  for (std::size_t i = 0; i < pixels.size(); ++i) img.data[i] = double(pixels[i]);
  return img;
}

inline std::vector<std::uint8_t> to_bytes(const RasterImage& img) {
  img.validate();
  std::vector<std::uint8_t> px(img.data.size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<std::uint8_t>(std::lround(img.data[i]));
  return px;
}

}  // namespace detail

// Returns an RGB image; gray or alpha PNGs are expanded/composited to RGB.
inline RasterImage load_image(const std::string& path) {
  const auto data = bytes::read_file(path);
  static constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (data.size() >= 8 && std::equal(kPngSig, kPngSig + 8, data.begin())) return detail::decode_png(data);
  if (bytes::starts_with(data, "P6")) return detail::decode_ppm(data);
  throw FormatError("unsupported image format: " + path);
}

inline void save_ppm(const RasterImage& img, const std::string& path) {
  if (img.channels != 3) throw DimError("save_ppm: RGB image required");
  const auto px = detail::to_bytes(img);
  const std::string header =
      "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  bytes::Buffer out(header.begin(), header.end());
  out.insert(out.end(), px.begin(), px.end());
  bytes::write_file(path, out);
}

inline void save_png(const RasterImage& img, const std::string& path) {
  const auto px = detail::to_bytes(img);
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, px.data(), 0, nullptr))
    throw IoError(std::string("png write: ") + image.message);
}

// ---------------------------------------------------------------------------
// Embedding vectors: an HFT1 tensor of depth 1, or u32 count + float32 LE.

inline std::vector<double> decode_embedding(std::span<const std::uint8_t> data) {
  if (bytes::starts_with(data, kTensorMagic)) {
    const Tensor3 t = decode_tensor(data);
    if (t.depth != 1) throw FormatError("embedding tensor must have depth 1");
    return t.data;
  }
  bytes::Reader in(data);
  const auto n = in.get_le<std::uint32_t>();
  if (in.remaining() != std::size_t(n) * 4) throw FormatError("embedding: length prefix mismatch");
  std::vector<double> v(n);
  for (auto& x : v) x = in.get_f32();
  return v;
}

inline bytes::Buffer encode_embedding(std::span<const double> v) {
  bytes::Buffer out;
  bytes::put_le(out, static_cast<std::uint32_t>(v.size()));
  for (double x : v) bytes::put_f32(out, static_cast<float>(x));
  return out;
}

inline std::vector<double> read_embedding(const std::string& path) {
  return decode_embedding(bytes::read_file(path));
}

inline void write_embedding(std::span<const double> v, const std::string& path) {
  bytes::write_file(path, encode_embedding(v));
}

}  // namespace hfcf
