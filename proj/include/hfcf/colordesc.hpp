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

// Local binary patterns and the decoded (bit-plane) LBP stack.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hfcf/error.hpp"
#include "hfcf/tensorio.hpp"

namespace hfcf {

struct LbpCodeImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> codes;
  std::string source_channel;

  std::uint8_t at(std::size_t i, std::size_t j) const { return codes[i * cols + j]; }

  Plane as_plane() const {
    Plane p(rows, cols);
    for (std::size_t i = 0; i < codes.size(); ++i) p.values[i] = codes[i];
    return p;
  }
};

inline constexpr std::size_t kDlbpChannels = 8;
inline constexpr std::size_t kDlbpDepth = kDlbpChannels * 8;

struct DlbpStack {
  Tensor3 planes;

  // Fraction of zero entries over the whole stack.
  double sparsity() const {
    if (planes.data.empty()) return 0.0;
    const auto zeros = std::count(planes.data.begin(), planes.data.end(), 0.0);
    return double(zeros) / double(planes.data.size());
  }
};

// Neighbour offsets (dy, dx) for bits 0..7: top-left first, then clockwise.
inline constexpr std::array<std::array<int, 2>, 8> kLbpNeighbours = {{
    {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1},
}};

// Bit b is set iff neighbour b >= centre. Out-of-range neighbours replicate
// the nearest edge pixel, so the code image keeps the input geometry.
inline LbpCodeImage lbp_codes(const Plane& channel, std::string label = {}) {
  if (channel.rows < 3 || channel.cols < 3) throw DimError("lbp_codes: plane smaller than 3x3");
  LbpCodeImage out{channel.rows, channel.cols, std::vector<std::uint8_t>(channel.rows * channel.cols),
                   std::move(label)};
  const auto rows = static_cast<long>(channel.rows), cols = static_cast<long>(channel.cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) {
      const double centre = channel.at(i, j);
      unsigned code = 0;
      for (unsigned b = 0; b < 8; ++b) {
        const long y = std::clamp(i + kLbpNeighbours[b][0], 0L, rows - 1);
        const long x = std::clamp(j + kLbpNeighbours[b][1], 0L, cols - 1);
        if (channel.at(y, x) >= centre) code |= 1u << b;
      }
      out.codes[i * cols + j] = static_cast<std::uint8_t>(code);
    }
  return out;
}

inline const std::array<const char*, kDlbpChannels>& derived_channel_names() {
  static const std::array<const char*, kDlbpChannels> names = {"R", "G", "B", "Y", "Cb", "Cr", "D1", "D2"};
  return names;
}

// R, G, B, Y, Cb, Cr, D1 = (R - G + 255) / 2, D2 = (G - B + 255) / 2.
inline std::vector<Plane> derive_channels(const RasterImage& img) {
  if (img.space != ColorSpace::RGB || img.channels != 3) throw SpaceError("derive_channels: RGB input required");
  const RasterImage ycc = rgb_to_ycbcr(img);
  std::vector<Plane> out;
  out.reserve(kDlbpChannels);
  for (std::size_t c = 0; c < 3; ++c) out.push_back(img.channel(c));
  for (std::size_t c = 0; c < 3; ++c) out.push_back(ycc.channel(c));
  Plane d1(img.height, img.width), d2(img.height, img.width);
  for (std::size_t i = 0; i < img.width * img.height; ++i) {
    const double r = img.data[3 * i], g = img.data[3 * i + 1], b = img.data[3 * i + 2];
    d1.values[i] = clamp_sample((r - g + 255.0) / 2.0);
    d2.values[i] = clamp_sample((g - b + 255.0) / 2.0);
  }
  out.push_back(std::move(d1));
  out.push_back(std::move(d2));
  return out;
}

// Plane 8c + b holds the channel-c code wherever bit b of that code is set.
inline DlbpStack decode_dlbp(std::span<const LbpCodeImage> codes) {
  if (codes.size() != kDlbpChannels) throw DimError("decode_dlbp: expected 8 code images");
  const std::size_t rows = codes[0].rows, cols = codes[0].cols;
  for (const auto& c : codes)
    if (c.rows != rows || c.cols != cols || c.codes.size() != rows * cols)
      throw DimError("decode_dlbp: code images differ in shape");
  DlbpStack out{Tensor3(rows, cols, kDlbpDepth)};
  const auto& names = derived_channel_names();
  for (std::size_t c = 0; c < kDlbpChannels; ++c) {
    for (std::size_t i = 0; i < rows * cols; ++i) {
      const std::uint8_t code = codes[c].codes[i];
      for (std::size_t b = 0; b < 8; ++b)
        if (code & (1u << b)) out.planes.data[i * kDlbpDepth + 8 * c + b] = code;
    }
    for (std::size_t b = 0; b < 8; ++b)
      out.planes.labels.push_back(std::string("DLBP:") + names[c] + ":" + std::to_string(b));
  }
  return out;
}

inline DlbpStack dlbp_from_image(const RasterImage& img) {
  const auto channels = derive_channels(img);
  const auto& names = derived_channel_names();
  std::vector<LbpCodeImage> codes;
  for (std::size_t c = 0; c < channels.size(); ++c) codes.push_back(lbp_codes(channels[c], names[c]));
  return decode_dlbp(codes);
}

inline std::vector<LbpCodeImage> lbp_rgb(const RasterImage& img) {
  if (img.space != ColorSpace::RGB || img.channels != 3) throw SpaceError("lbp_rgb: RGB input required");
  static constexpr const char* kNames[] = {"R", "G", "B"};
  std::vector<LbpCodeImage> out;
  for (std::size_t c = 0; c < 3; ++c) out.push_back(lbp_codes(img.channel(c), kNames[c]));
  return out;
}

}  // namespace hfcf
