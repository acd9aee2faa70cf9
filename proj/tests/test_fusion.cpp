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

#include <algorithm>
#include <numeric>
#include <random>

#include "hfcf/fusion.hpp"
#include "support/oracles.hpp"
#include "support/synthetic_faces.hpp"

namespace hfcf {
namespace {

DctTensor ac_tensor(std::size_t h, std::size_t w, std::uint64_t seed, int lo = -3, int hi = 3) {
  const auto full = forward_bdct(RasterImage(8 * w, 8 * h, 3, ColorSpace::YCbCr, 128.0));
  auto ac = split_dc(full).second;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(lo, hi);
  for (auto& v : ac.planes.data) v = u(rng);
  return ac;
}

DctTensor ac_with_pixel(double y, double cb, double cr) {
  auto ac = ac_tensor(1, 1, 0);
  for (std::size_t k = 0; k < ac.depth(); ++k) {
    const auto c = ac.tags[k].component;
    ac.planes.data[k] = c == Component::Y ? y : c == Component::Cb ? cb : cr;
  }
  return ac;
}

DctTensor fused_with_energies(const std::vector<double>& root_energy, std::size_t side = 2) {
  DctTensor t{Tensor3(side, side, 63), DctLayout::Fused63, {}};
  for (std::size_t k = 0; k < 63; ++k) {
    t.tags.push_back({Component::Mixed, int(k + 1)});
    const double e = k < root_energy.size() ? root_energy[k] : 1.0;
    // each of side*side pixels holds sqrt(e / n) so the plane energy is e
    const double v = std::sqrt(e / double(side * side));
    for (std::size_t i = 0; i < side * side; ++i) t.planes.data[i * 63 + k] = v;
  }
  t.refresh_labels();
  return t;
}

TEST(FrequencyFuse, WorkedExamples) {
  EXPECT_EQ(frequency_fuse(ac_with_pixel(-5, 3, 4)).planes.data[0], -5.0);
  EXPECT_EQ(frequency_fuse(ac_with_pixel(0, 0, 0)).planes.data[0], 0.0);
  EXPECT_EQ(frequency_fuse(ac_with_pixel(2, -2, 1)).planes.data[0], 2.0);
  EXPECT_EQ(frequency_fuse(ac_with_pixel(1, -2, 2)).planes.data[0], -2.0);
  EXPECT_EQ(frequency_fuse(ac_with_pixel(1, 0.5, -7.25)).planes.data[0], -7.25);
}

TEST(FrequencyFuse, ExhaustiveAgainstOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto ac = ac_tensor(14, 14, seed);
    const auto fused = frequency_fuse(ac);
    ASSERT_EQ(fused.depth(), 63u);
    ASSERT_EQ(fused.layout, DctLayout::Fused63);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < 14 * 14; ++i)
      for (int f = 1; f < 64; ++f) {
        // Ac189 keeps component-major order: Y 1..63, Cb 1..63, Cr 1..63
        const double y = ac.planes.data[i * 189 + (f - 1)];
        const double cb = ac.planes.data[i * 189 + 63 + (f - 1)];
        const double cr = ac.planes.data[i * 189 + 126 + (f - 1)];
        if (fused.planes.data[i * 63 + (f - 1)] != oracle::max_abs_with_sign(y, cb, cr)) ++mismatches;
      }
    EXPECT_EQ(mismatches, 0u) << "seed " << seed;
  }
}

TEST(FrequencyFuse, TagsAndErrors) {
  const auto fused = frequency_fuse(ac_tensor(2, 2, 1));
  for (std::size_t k = 0; k < 63; ++k) {
    EXPECT_EQ(fused.tags[k].component, Component::Mixed);
    EXPECT_EQ(fused.tags[k].frequency, int(k + 1));
  }
  const auto full = forward_bdct(RasterImage(16, 16, 3, ColorSpace::YCbCr, 10.0));
  EXPECT_THROW(frequency_fuse(full), LayoutError);
  EXPECT_THROW(frequency_fuse(fused), LayoutError);
}

TEST(SortByEnergy, OrdersDescending) {
  std::vector<double> energies(63, 1.0);
  energies[0] = 10;
  energies[1] = 30;
  energies[2] = 20;
  const auto [sorted, perm] = sort_by_energy(fused_with_energies(energies));
  ASSERT_EQ(perm.ordering.size(), 63u);
  EXPECT_EQ(perm.ordering[0], 1u);
  EXPECT_EQ(perm.ordering[1], 2u);
  EXPECT_EQ(perm.ordering[2], 0u);
  EXPECT_EQ(sorted.tags[0].frequency, 2);
}

TEST(SortByEnergy, EqualEnergiesKeepIdentity) {
  const auto [sorted, perm] = sort_by_energy(fused_with_energies({}));
  for (std::size_t k = 0; k < 63; ++k) EXPECT_EQ(perm.ordering[k], k);
}

TEST(SortByEnergy, RandomTensorMatchesIndependentSort) {
  const auto fused = frequency_fuse(ac_tensor(16, 16, 42, -500, 500));
  const auto [sorted, perm] = sort_by_energy(fused);
  std::vector<std::pair<double, std::size_t>> ref;
  for (std::size_t k = 0; k < 63; ++k) {
    double e = 0;
    for (std::size_t i = 0; i < 256; ++i) e += fused.planes.data[i * 63 + k] * fused.planes.data[i * 63 + k];
    ref.push_back({-e, k});
  }
  std::sort(ref.begin(), ref.end());
  for (std::size_t k = 0; k < 63; ++k) {
    EXPECT_EQ(perm.ordering[k], ref[k].second);
    if (k > 0) {
      EXPECT_GE(perm.key_values[k - 1], perm.key_values[k]);
    }
    // applying the permutation to the input reproduces the output
    for (std::size_t i = 0; i < 256; ++i)
      ASSERT_EQ(sorted.planes.data[i * 63 + k], fused.planes.data[i * 63 + perm.ordering[k]]);
  }
  EXPECT_THROW(sort_by_energy(split_dc(forward_bdct(RasterImage(8, 8, 3, ColorSpace::YCbCr))).second), LayoutError);
}

DlbpStack stack_from_planes(const std::vector<Plane>& planes) { return DlbpStack{Tensor3::from_planes(planes)}; }

TEST(SortDlbp, EqualPlaneSortsFirst) {
  Plane dc(4, 4);
  for (std::size_t i = 0; i < 16; ++i) dc.values[i] = double(i);
  Plane far(4, 4, 200.0), near(4, 4, 5.0);
  const auto [sorted, perm] = sort_dlbp_by_dc_similarity(stack_from_planes({far, near, dc}), dc);
  EXPECT_EQ(perm.ordering, (std::vector<std::size_t>{2, 1, 0}));
  EXPECT_EQ(perm.key_values[0], 0.0);
  EXPECT_EQ(sorted.planes.plane(0), dc);
}

TEST(SortDlbp, SwapsByDistance) {
  const Plane zero(1, 1, 0.0);
  const auto [sorted, perm] = sort_dlbp_by_dc_similarity(stack_from_planes({Plane(1, 1, 100.0), Plane(1, 1, 50.0)}), zero);
  EXPECT_EQ(perm.ordering, (std::vector<std::size_t>{1, 0}));
  EXPECT_DOUBLE_EQ(perm.key_values[0], 50.0);
  EXPECT_DOUBLE_EQ(perm.key_values[1], 100.0);
}

TEST(SortDlbp, RandomStackMatchesOracle) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 255);
  std::vector<Plane> planes(64, Plane(12, 12));
  for (auto& p : planes)
    for (auto& v : p.values) v = u(rng);
  Plane dc(12, 12);
  for (auto& v : dc.values) v = u(rng);
  const auto [sorted, perm] = sort_dlbp_by_dc_similarity(stack_from_planes(planes), dc);
  std::vector<std::pair<double, std::size_t>> ref;
  for (std::size_t k = 0; k < 64; ++k) {
    double s = 0;
    for (std::size_t i = 0; i < 144; ++i) s += (planes[k].values[i] - dc.values[i]) * (planes[k].values[i] - dc.values[i]);
    ref.push_back({std::sqrt(s), k});
  }
  std::stable_sort(ref.begin(), ref.end(), [](auto& a, auto& b) { return a.first < b.first; });
  for (std::size_t k = 0; k < 64; ++k) {
    EXPECT_EQ(perm.ordering[k], ref[k].second);
    EXPECT_NEAR(perm.key_values[k], ref[k].first, 1e-9);
    EXPECT_EQ(sorted.planes.plane(k), planes[perm.ordering[k]]);
  }
  EXPECT_THROW(sort_dlbp_by_dc_similarity(stack_from_planes(planes), Plane(11, 12)), DimError);
}

struct Inputs {
  DctTensor freq;
  DlbpStack dlbp;
  std::vector<LbpCodeImage> lbp;
};

Inputs face_inputs(std::uint64_t seed) {
  const auto img = testing::synthetic_face(seed, 32);
  auto [dc, ac] = split_dc(forward_bdct(rgb_to_ycbcr(upsample_bilinear(img, 8))));
  auto freq = sort_by_energy(frequency_fuse(ac)).first;
  auto dlbp = sort_dlbp_by_dc_similarity(dlbp_from_image(img), dc.y).first;
  return {std::move(freq), std::move(dlbp), lbp_rgb(img)};
}

TEST(HybridFuse, DepthPerScheme) {
  const auto in = face_inputs(1);
  EXPECT_EQ(hybrid_freq_only(in.freq).planes.depth, 63u);
  EXPECT_EQ(hybrid_fuse(in.freq, in.dlbp, HybridScheme::FreqOnly63).planes.depth, 63u);
  EXPECT_EQ(hybrid_fuse(in.freq, in.dlbp, HybridScheme::AddDlbp63).planes.depth, 63u);
  EXPECT_EQ(hybrid_fuse(in.freq, in.dlbp, HybridScheme::MultDlbp63).planes.depth, 63u);
  EXPECT_EQ(hybrid_fuse(in.freq, in.dlbp, HybridScheme::ConcatDlbp126).planes.depth, 126u);
  EXPECT_EQ(hybrid_fuse(in.freq, in.lbp, HybridScheme::ConcatLbp66).planes.depth, 66u);
  for (auto s : {HybridScheme::AddDlbp63, HybridScheme::MultDlbp63, HybridScheme::ConcatDlbp126}) {
    const auto h = hybrid_fuse(in.freq, in.dlbp, s);
    EXPECT_NO_THROW(h.validate());
    EXPECT_EQ(h.planes.labels.size(), h.planes.depth);
  }
}

TEST(HybridFuse, ZeroDlbpIsIdentityForAddAndMult) {
  auto in = face_inputs(2);
  DlbpStack zero{Tensor3(in.freq.height(), in.freq.width(), 64)};
  EXPECT_EQ(hybrid_fuse(in.freq, zero, HybridScheme::AddDlbp63).planes.data, in.freq.planes.data);
  EXPECT_EQ(hybrid_fuse(in.freq, zero, HybridScheme::MultDlbp63).planes.data, in.freq.planes.data);
}

TEST(HybridFuse, AddAndMultFormulas) {
  const auto in = face_inputs(3);
  const auto add = hybrid_fuse(in.freq, in.dlbp, HybridScheme::AddDlbp63, 0.5);
  const auto mult = hybrid_fuse(in.freq, in.dlbp, HybridScheme::MultDlbp63);
  for (std::size_t i = 0; i < in.freq.height() * in.freq.width(); ++i)
    for (std::size_t k = 0; k < 63; ++k) {
      const double f = in.freq.planes.data[i * 63 + k];
      const double d = in.dlbp.planes.data[i * 64 + k + 1];
      ASSERT_DOUBLE_EQ(add.planes.data[i * 63 + k], f + 0.5 * d);
      ASSERT_DOUBLE_EQ(mult.planes.data[i * 63 + k], f * (1.0 + d / 255.0));
    }
}

TEST(HybridFuse, ConcatProjectsBackExactly) {
  const auto in = face_inputs(4);
  const auto cat = hybrid_fuse(in.freq, in.dlbp, HybridScheme::ConcatDlbp126);
  for (std::size_t k = 0; k < 63; ++k) {
    EXPECT_EQ(cat.planes.plane(k), in.freq.planes.plane(k));
    EXPECT_EQ(cat.planes.plane(63 + k), in.dlbp.planes.plane(k + 1));
  }
  const auto lbp = hybrid_fuse(in.freq, in.lbp, HybridScheme::ConcatLbp66);
  for (std::size_t k = 0; k < 63; ++k) EXPECT_EQ(lbp.planes.plane(k), in.freq.planes.plane(k));
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(lbp.planes.plane(63 + c), in.lbp[c].as_plane());
  EXPECT_EQ(lbp.planes.labels.back(), "LBP:B");
}

TEST(HybridFuse, LbpOnlyWithConcatenation) {
  const auto in = face_inputs(5);
  EXPECT_THROW(hybrid_fuse(in.freq, in.lbp, HybridScheme::AddDlbp63), SchemeError);
  EXPECT_THROW(hybrid_fuse(in.freq, in.lbp, HybridScheme::MultDlbp63), SchemeError);
  EXPECT_THROW(hybrid_fuse(in.freq, in.dlbp, HybridScheme::ConcatLbp66), SchemeError);
  EXPECT_THROW(parse_scheme("lbp-add"), SchemeError);
  EXPECT_EQ(parse_scheme("concat-lbp"), HybridScheme::ConcatLbp66);
  EXPECT_THROW(hybrid_fuse(in.freq, std::span(in.lbp).first(2), HybridScheme::ConcatLbp66), DimError);
  DlbpStack shallow{Tensor3(in.freq.height(), in.freq.width(), 63)};
  EXPECT_THROW(hybrid_fuse(in.freq, shallow, HybridScheme::AddDlbp63), DimError);
}

HybridTensor random_hybrid(std::uint64_t seed) {
  HybridTensor t{Tensor3(16, 16, 63), HybridScheme::FreqOnly63};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0, 50);
  for (auto& v : t.planes.data) v = n(rng);
  return t;
}

TEST(DpNoise, NoneIsIdentity) {
  const auto t = random_hybrid(1);
  EXPECT_EQ(apply_dp_noise(t, parse_noise("none")).planes, t.planes);
}

TEST(DpNoise, DeterministicUnderSeed) {
  const auto t = random_hybrid(2);
  for (const char* spec : {"laplace:0.5", "gauss:2"}) {
    const auto a = apply_dp_noise(t, parse_noise(spec, 77));
    const auto b = apply_dp_noise(t, parse_noise(spec, 77));
    const auto c = apply_dp_noise(t, parse_noise(spec, 78));
    EXPECT_EQ(a.planes, b.planes);
    EXPECT_NE(a.planes, c.planes);
    EXPECT_NE(a.planes, t.planes);
  }
}

TEST(DpNoise, LaplaceMoments) {
  HybridTensor zero{Tensor3(1000, 1000, 1), HybridScheme::FreqOnly63};
  const auto noisy = apply_dp_noise(zero, parse_noise("laplace:1", 2024, 1.0));
  const auto& d = noisy.planes.data;
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / double(d.size());
  double var = 0;
  for (double v : d) var += (v - mean) * (v - mean);
  var /= double(d.size() - 1);
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 2.0, 0.1);
}

TEST(DpNoise, GaussianMoments) {
  HybridTensor zero{Tensor3(500, 500, 1), HybridScheme::FreqOnly63};
  const auto& d = apply_dp_noise(zero, parse_noise("gauss:3", 5)).planes.data;
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / double(d.size());
  double var = 0;
  for (double v : d) var += (v - mean) * (v - mean);
  var /= double(d.size() - 1);
  EXPECT_NEAR(mean, 0.0, 0.05);
  EXPECT_NEAR(var, 9.0, 0.2);
}

TEST(DpNoise, RejectsBadParameters) {
  EXPECT_THROW(parse_noise("laplace:0"), ParamError);
  EXPECT_THROW(parse_noise("laplace:-1"), ParamError);
  EXPECT_THROW(parse_noise("gauss:0"), ParamError);
  EXPECT_THROW(parse_noise("laplace:abc"), ParamError);
  EXPECT_THROW(parse_noise("laplace:1x"), ParamError);
  EXPECT_THROW(parse_noise("uniform:1"), ParamError);
  EXPECT_THROW(parse_noise("laplace:1", 0, 0.0), ParamError);
  NoiseSpec bad;
  bad.mechanism = NoiseMechanism::Gaussian;
  bad.sigma = -1;
  EXPECT_THROW(apply_dp_noise(random_hybrid(3), bad), ParamError);
}

}  // namespace
}  // namespace hfcf
