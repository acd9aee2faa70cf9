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

// 8x8 block DCT with coefficients gathered into per-frequency planes.
//
// A W x H YCbCr image yields W/8 x H/8 planes, 64 per colour component,
// ordered by the JPEG zig-zag scan. Component planes are stored
// component-major: Y occupies planes [0, 64), Cb [64, 128), Cr [128, 192).

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "hfcf/error.hpp"
#include "hfcf/tensorio.hpp"

namespace hfcf {

inline constexpr std::size_t kBlock = 8;
inline constexpr std::size_t kFreqs = kBlock * kBlock;

enum class DctLayout { Full192, Ac189, Fused63 };
enum class Component { Y, Cb, Cr, Mixed };

inline const char* to_string(DctLayout layout) {
  switch (layout) {
    case DctLayout::Full192: return "Full192";
    case DctLayout::Ac189: return "Ac189";
    case DctLayout::Fused63: return "Fused63";
  }
  return "?";
}

inline const char* to_string(Component c) {
  switch (c) {
    case Component::Y: return "Y";
    case Component::Cb: return "Cb";
    case Component::Cr: return "Cr";
    case Component::Mixed: return "F";
  }
  return "?";
}

inline constexpr std::size_t expected_depth(DctLayout layout) {
  switch (layout) {
    case DctLayout::Full192: return 192;
    case DctLayout::Ac189: return 189;
    case DctLayout::Fused63: return 63;
  }
  return 0;
}

struct PlaneTag {
  Component component = Component::Y;
  int frequency = 0;  // zig-zag index in [0, 64)

  std::string label() const { return std::string(to_string(component)) + ":" + std::to_string(frequency); }
  friend bool operator==(const PlaneTag&, const PlaneTag&) = default;
};

struct DctTensor {
  Tensor3 planes;
  DctLayout layout = DctLayout::Full192;
  std::vector<PlaneTag> tags;

  std::size_t height() const { return planes.height; }
  std::size_t width() const { return planes.width; }
  std::size_t depth() const { return planes.depth; }

  void validate() const {
    planes.validate();
    if (planes.depth != expected_depth(layout)) throw LayoutError("DctTensor: depth does not match layout");
    if (tags.size() != planes.depth) throw LayoutError("DctTensor: tag count mismatch");
  }

  void refresh_labels() {
    planes.labels.clear();
    for (const auto& t : tags) planes.labels.push_back(t.label());
  }
};

struct DcPlanes {
  Plane y, cb, cr;
};

namespace detail {

// zigzag_order()[k] = row * 8 + col of the k-th coefficient in scan order.
inline const std::array<std::size_t, kFreqs>& zigzag_order() {
  static const auto table = [] {
    std::array<std::size_t, kFreqs> t{};
    std::size_t k = 0;
    for (std::size_t s = 0; s < 2 * kBlock - 1; ++s) {
      // Even anti-diagonals run bottom-left to top-right, odd ones the reverse.
      for (std::size_t i = 0; i <= s; ++i) {
        const std::size_t row = (s % 2 == 0) ? s - i : i;
        const std::size_t col = s - row;
        if (row < kBlock && col < kBlock) t[k++] = row * kBlock + col;
      }
    }
    return t;
  }();
  return table;
}

inline const std::array<std::size_t, kFreqs>& zigzag_index() {
  static const auto table = [] {
    std::array<std::size_t, kFreqs> inv{};
    const auto& order = zigzag_order();
    for (std::size_t k = 0; k < kFreqs; ++k) inv[order[k]] = k;
    return inv;
  }();
  return table;
}

// cosine[k][n] = cos((2n + 1) k pi / 16). The normalisation
// C(r) C(c) / 4 is applied per coefficient so that DC scales by exactly 1/8.
inline const std::array<std::array<double, kBlock>, kBlock>& dct_cosine() {
  static const auto basis = [] {
    std::array<std::array<double, kBlock>, kBlock> b{};
    for (std::size_t k = 0; k < kBlock; ++k)
      for (std::size_t n = 0; n < kBlock; ++n)
        b[k][n] = std::cos(double(2 * n + 1) * double(k) * std::numbers::pi / (2.0 * kBlock));
    return b;
  }();
  return basis;
}

inline const std::array<double, kFreqs>& dct_scale() {
  static const auto scale = [] {
    std::array<double, kFreqs> s{};
    for (std::size_t r = 0; r < kBlock; ++r)
      for (std::size_t c = 0; c < kBlock; ++c) {
        const int zeros = int(r == 0) + int(c == 0);
        s[r * kBlock + c] = zeros == 2 ? 0.125 : zeros == 1 ? 0.25 * std::numbers::sqrt2 / 2.0 : 0.25;
      }
    return s;
  }();
  return scale;
}

using Block = std::array<double, kFreqs>;

inline Block dct8x8(const Block& in) {
  const auto& b = dct_cosine();
  const auto& scale = dct_scale();
  Block tmp{}, out{};
  for (std::size_t r = 0; r < kBlock; ++r)
    for (std::size_t x = 0; x < kBlock; ++x) {
      double s = 0.0;
      for (std::size_t y = 0; y < kBlock; ++y) s += b[r][y] * in[y * kBlock + x];
      tmp[r * kBlock + x] = s;
    }
  for (std::size_t r = 0; r < kBlock; ++r)
    for (std::size_t c = 0; c < kBlock; ++c) {
      double s = 0.0;
      for (std::size_t x = 0; x < kBlock; ++x) s += tmp[r * kBlock + x] * b[c][x];
      out[r * kBlock + c] = s * scale[r * kBlock + c];
    }
  return out;
}

inline Block idct8x8(const Block& in) {
  const auto& b = dct_cosine();
  const auto& scale = dct_scale();
  Block scaled{}, tmp{}, out{};
  for (std::size_t i = 0; i < kFreqs; ++i) scaled[i] = in[i] * scale[i];
  for (std::size_t y = 0; y < kBlock; ++y)
    for (std::size_t c = 0; c < kBlock; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < kBlock; ++r) s += b[r][y] * scaled[r * kBlock + c];
      tmp[y * kBlock + c] = s;
    }
  for (std::size_t y = 0; y < kBlock; ++y)
    for (std::size_t x = 0; x < kBlock; ++x) {
      double s = 0.0;
      for (std::size_t c = 0; c < kBlock; ++c) s += tmp[y * kBlock + c] * b[c][x];
      out[y * kBlock + x] = s;
    }
  return out;
}

inline std::vector<PlaneTag> full_tags() {
  std::vector<PlaneTag> tags;
  for (auto comp : {Component::Y, Component::Cb, Component::Cr})
    for (int f = 0; f < int(kFreqs); ++f) tags.push_back({comp, f});
  return tags;
}

}  // namespace detail

// (row, col) of the coefficient that zig-zag position `index` refers to.
inline std::pair<std::size_t, std::size_t> zigzag_position(std::size_t index) {
  const auto rc = detail::zigzag_order().at(index);
  return {rc / kBlock, rc % kBlock};
}

inline std::size_t zigzag(std::size_t row, std::size_t col) {
  return detail::zigzag_index().at(row * kBlock + col);
}

inline DctTensor forward_bdct(const RasterImage& img) {
  if (img.space != ColorSpace::YCbCr || img.channels != 3) throw SpaceError("forward_bdct: YCbCr input required");
  if (img.width % kBlock != 0 || img.height % kBlock != 0 || img.width == 0 || img.height == 0)
    throw DimError("forward_bdct: dimensions must be positive multiples of 8");
  const std::size_t bh = img.height / kBlock, bw = img.width / kBlock;
  DctTensor out{Tensor3(bh, bw, 3 * kFreqs), DctLayout::Full192, detail::full_tags()};
  const auto& zz = detail::zigzag_index();
  detail::Block block{};
  for (std::size_t bi = 0; bi < bh; ++bi)
    for (std::size_t bj = 0; bj < bw; ++bj)
      for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t y = 0; y < kBlock; ++y)
          for (std::size_t x = 0; x < kBlock; ++x)
            block[y * kBlock + x] = img.at(bi * kBlock + y, bj * kBlock + x, c) - 128.0;
        const auto coeffs = detail::dct8x8(block);
        for (std::size_t rc = 0; rc < kFreqs; ++rc) out.planes.at(bi, bj, c * kFreqs + zz[rc]) = coeffs[rc];
      }
  out.refresh_labels();
  return out;
}

// Samples are clamped to [0, 255] after the +128 level shift.
inline RasterImage inverse_bdct(const DctTensor& t) {
  if (t.layout != DctLayout::Full192)
    throw LayoutError("inverse_bdct: only Full192 tensors are invertible (DC or components discarded)");
  t.validate();
  const std::size_t bh = t.height(), bw = t.width();
  RasterImage out(bw * kBlock, bh * kBlock, 3, ColorSpace::YCbCr);
  const auto& zz = detail::zigzag_index();
  detail::Block coeffs{};
  for (std::size_t bi = 0; bi < bh; ++bi)
    for (std::size_t bj = 0; bj < bw; ++bj)
      for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t rc = 0; rc < kFreqs; ++rc) coeffs[rc] = t.planes.at(bi, bj, c * kFreqs + zz[rc]);
        const auto px = detail::idct8x8(coeffs);
        for (std::size_t y = 0; y < kBlock; ++y)
          for (std::size_t x = 0; x < kBlock; ++x)
            out.at(bi * kBlock + y, bj * kBlock + x, c) = clamp_sample(px[y * kBlock + x] + 128.0);
      }
  return out;
}

// Sum of squared coefficients.
inline double channel_energy(const Plane& plane) {
  double g = 0.0;
  for (double v : plane.values) g += v * v;
  return g;
}

inline double channel_energy(const Tensor3& t, std::size_t k) {
  if (k >= t.depth) throw DimError("channel_energy: plane index out of range");
  double g = 0.0;
  for (std::size_t i = 0; i < t.height * t.width; ++i) {
    const double v = t.data[i * t.depth + k];
    g += v * v;
  }
  return g;
}

inline std::pair<DcPlanes, DctTensor> split_dc(const DctTensor& t) {
  if (t.layout != DctLayout::Full192) throw LayoutError("split_dc: Full192 input required");
  t.validate();
  DcPlanes dc{t.planes.plane(0), t.planes.plane(kFreqs), t.planes.plane(2 * kFreqs)};
  const std::size_t n = t.height() * t.width();
  DctTensor ac{Tensor3(t.height(), t.width(), 3 * (kFreqs - 1)), DctLayout::Ac189, {}};
  for (std::size_t k = 0, out_k = 0; k < t.depth(); ++k) {
    if (t.tags[k].frequency == 0) continue;
    ac.tags.push_back(t.tags[k]);
    for (std::size_t i = 0; i < n; ++i) ac.planes.data[i * ac.depth() + out_k] = t.planes.data[i * t.depth() + k];
    ++out_k;
  }
  ac.refresh_labels();
  return {std::move(dc), std::move(ac)};
}

}  // namespace hfcf
