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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hfcf/colordesc.hpp"
#include "support/oracles.hpp"
#include "support/synthetic_faces.hpp"

namespace hfcf {
namespace {

Plane plane_from(std::size_t rows, std::size_t cols, std::vector<double> v) {
  Plane p(rows, cols);
  p.values = std::move(v);
  return p;
}

LbpCodeImage codes_from(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> v) {
  return {rows, cols, std::move(v), "test"};
}

TEST(LbpCodes, ConstantPlaneIsAllOnes) {
  const auto codes = lbp_codes(Plane(5, 7, 42.0));
  for (auto c : codes.codes) EXPECT_EQ(c, 255);
}

TEST(LbpCodes, BrightCentreOnDarkRing) {
  const auto codes = lbp_codes(plane_from(3, 3, {0, 0, 0, 0, 100, 0, 0, 0, 0}));
  EXPECT_EQ(codes.at(1, 1), 0);
}

TEST(LbpCodes, GradientPatchCentre) {
  const std::vector<double> patch = {10, 20, 30, 40, 50, 60, 70, 80, 90};
  const auto codes = lbp_codes(plane_from(3, 3, patch));
  // right, bottom-right, bottom, bottom-left are >= 50: bits 3..6
  EXPECT_EQ(oracle::lbp_code(patch, 3, 3, 1, 1), 120);
  EXPECT_EQ(codes.at(1, 1), 120);
}

TEST(LbpCodes, AgreesWithOracleIncludingBorders) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> u(0, 20);  // small alphabet forces ties
  std::vector<double> v(9 * 13);
  for (auto& x : v) x = u(rng);
  const auto codes = lbp_codes(plane_from(9, 13, v));
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 13; ++j) EXPECT_EQ(codes.at(i, j), oracle::lbp_code(v, 9, 13, i, j));
}

TEST(LbpCodes, TooSmallIsDimError) {
  EXPECT_THROW(lbp_codes(Plane(2, 5)), DimError);
  EXPECT_THROW(lbp_codes(Plane(5, 2)), DimError);
}

TEST(LbpCodes, InvariantUnderMonotonicRemapping) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  for (int trial = 0; trial < 10; ++trial) {
    Plane p(16, 16);
    for (auto& x : p.values) x = std::round(u(rng) / 8.0);
    Plane q = p;
    const double gain = 0.5 + u(rng) / 100.0;
    for (auto& x : q.values) x = std::exp(gain * x / 10.0) + 3.0;  // strictly increasing
    EXPECT_EQ(lbp_codes(p).codes, lbp_codes(q).codes);
  }
}

TEST(DeriveChannels, GrayAndRed) {
  RasterImage gray(1, 1, 3, ColorSpace::RGB, 77.0);
  const auto g = derive_channels(gray);
  ASSERT_EQ(g.size(), 8u);
  EXPECT_DOUBLE_EQ(g[6].values[0], 127.5);
  EXPECT_DOUBLE_EQ(g[7].values[0], 127.5);
  RasterImage red(1, 1, 3, ColorSpace::RGB);
  red.data = {255, 0, 0};
  const auto r = derive_channels(red);
  EXPECT_DOUBLE_EQ(r[0].values[0], 255.0);
  EXPECT_NEAR(r[3].values[0], 76.245, 1e-9);
  EXPECT_DOUBLE_EQ(r[6].values[0], 255.0);
  EXPECT_DOUBLE_EQ(r[7].values[0], 127.5);
  EXPECT_THROW(derive_channels(RasterImage(1, 1, 3, ColorSpace::YCbCr)), SpaceError);
}

TEST(DecodeDlbp, ZeroAndFullCodes) {
  std::vector<LbpCodeImage> zeros(8, codes_from(2, 2, {0, 0, 0, 0}));
  const auto z = decode_dlbp(zeros);
  EXPECT_EQ(z.planes.depth, 64u);
  for (double v : z.planes.data) EXPECT_EQ(v, 0.0);
  EXPECT_DOUBLE_EQ(z.sparsity(), 1.0);
  std::vector<LbpCodeImage> full(8, codes_from(2, 2, {255, 255, 255, 255}));
  for (double v : decode_dlbp(full).planes.data) EXPECT_EQ(v, 255.0);
}

TEST(DecodeDlbp, SinglePixelCodeFive) {
  std::vector<LbpCodeImage> codes(8, codes_from(1, 1, {0}));
  codes[3].codes[0] = 5;
  const auto s = decode_dlbp(codes);
  for (std::size_t k = 0; k < 64; ++k) {
    const double expect = (k == 24 || k == 26) ? 5.0 : 0.0;
    EXPECT_EQ(s.planes.at(0, 0, k), expect) << k;
  }
  EXPECT_EQ(s.planes.labels[24], "DLBP:Y:0");
}

TEST(DecodeDlbp, ShapeErrors) {
  std::vector<LbpCodeImage> codes(8, codes_from(2, 2, {1, 2, 3, 4}));
  codes[5] = codes_from(1, 4, {1, 2, 3, 4});
  EXPECT_THROW(decode_dlbp(codes), DimError);
  codes.pop_back();
  EXPECT_THROW(decode_dlbp(codes), DimError);
}

TEST(DecodeDlbp, BitPlanesReconstructCodes) {
  std::mt19937_64 rng(8);
  std::vector<LbpCodeImage> codes;
  for (int c = 0; c < 8; ++c) {
    std::vector<std::uint8_t> v(30 * 20);
    for (auto& x : v) x = static_cast<std::uint8_t>(rng());
    codes.push_back(codes_from(30, 20, v));
  }
  const auto s = decode_dlbp(codes);
  for (std::size_t c = 0; c < 8; ++c)
    for (std::size_t i = 0; i < 600; ++i) {
      unsigned mask = 0;
      double value = 0.0;
      for (std::size_t b = 0; b < 8; ++b) {
        const double v = s.planes.data[i * 64 + 8 * c + b];
        if (v != 0.0) {
          mask |= 1u << b;
          value = v;
          // plane k nonzero only where bit (k mod 8) is set
          EXPECT_TRUE(codes[c].codes[i] & (1u << b));
        }
      }
      EXPECT_EQ(mask, codes[c].codes[i]);
      if (mask) {
        EXPECT_EQ(value, double(codes[c].codes[i]));
      }
    }
}

TEST(DecodeDlbp, UniformCodesGiveHalfDensePlanes) {
  std::mt19937_64 rng(99);
  std::vector<LbpCodeImage> codes;
  for (int c = 0; c < 8; ++c) {
    std::vector<std::uint8_t> v(100 * 100);
    for (auto& x : v) x = static_cast<std::uint8_t>(rng() & 0xff);
    codes.push_back(codes_from(100, 100, v));
  }
  const auto s = decode_dlbp(codes);
  for (std::size_t k = 0; k < 64; ++k) {
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < 10000; ++i) nonzero += s.planes.data[i * 64 + k] != 0.0;
    EXPECT_NEAR(double(nonzero) / 10000.0, 0.5, 0.025) << k;
  }
  EXPECT_NEAR(s.sparsity(), 0.5, 0.01);
}

TEST(LbpRgb, ConstantColourAndGrayContent) {
  const auto c = lbp_rgb(RasterImage(6, 6, 3, ColorSpace::RGB, 90.0));
  ASSERT_EQ(c.size(), 3u);
  for (const auto& img : c)
    for (auto v : img.codes) EXPECT_EQ(v, 255);

  auto img = testing::random_image(4, 10, 10, ColorSpace::RGB);
  for (std::size_t i = 0; i < 100; ++i) img.data[3 * i + 1] = img.data[3 * i + 2] = img.data[3 * i];
  const auto g = lbp_rgb(img);
  EXPECT_EQ(g[0].codes, g[1].codes);
  EXPECT_EQ(g[1].codes, g[2].codes);
  EXPECT_EQ(g[2].source_channel, "B");
  EXPECT_THROW(lbp_rgb(RasterImage(6, 6, 3, ColorSpace::YCbCr)), SpaceError);
}

TEST(DlbpFromImage, FaceStackIsSparseAndKeepsGeometry) {
  const auto s = dlbp_from_image(testing::synthetic_face(5));
  EXPECT_EQ(s.planes.height, 112u);
  EXPECT_EQ(s.planes.width, 112u);
  EXPECT_EQ(s.planes.depth, 64u);
  EXPECT_GT(s.sparsity(), 0.2);
}

}  // namespace
}  // namespace hfcf
