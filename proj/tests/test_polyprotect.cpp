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
#include <random>
#include <set>

#include "hfcf/polyprotect.hpp"
#include "support/oracles.hpp"

namespace hfcf {
namespace {

std::vector<double> random_unit(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0, 1);
  std::vector<double> v(n);
  double s = 0;
  for (auto& x : v) {
    x = g(rng);
    s += x * x;
  }
  for (auto& x : v) x /= std::sqrt(s);
  return v;
}

TEST(GenParams, Deterministic) {
  EXPECT_EQ(gen_params(123, 0), gen_params(123, 0));
  EXPECT_EQ(gen_params(123, 4).fingerprint(), gen_params(123, 4).fingerprint());
  EXPECT_NE(gen_params(123, 0).fingerprint(), gen_params(124, 0).fingerprint());
  EXPECT_NE(gen_params(123, 0).fingerprint(), gen_params(123, 1).fingerprint());
}

TEST(GenParams, InvariantsHold) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto p = gen_params(seed, seed % 5);
    ASSERT_EQ(p.coefficients.size(), 5u);
    ASSERT_EQ(p.exponents.size(), 5u);
    for (auto c : p.coefficients) {
      EXPECT_NE(c, 0);
      EXPECT_GE(c, -100);
      EXPECT_LE(c, 100);
    }
    auto e = p.exponents;
    std::sort(e.begin(), e.end());
    EXPECT_EQ(e, (std::vector<std::int64_t>{1, 2, 3, 4, 5}));
  }
}

TEST(GenParams, NoCoefficientCollisionsOverTenThousandSeeds) {
  std::set<std::vector<std::int64_t>> seen;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) seen.insert(gen_params(seed * 7919 + 1, 0).coefficients);
  EXPECT_EQ(seen.size(), 10000u);
}

TEST(GenParams, CoefficientsCoverRangeEvenly) {
  std::vector<int> counts(201, 0);
  for (std::uint64_t seed = 0; seed < 20000; ++seed)
    for (auto c : gen_params(seed, 0).coefficients) ++counts[std::size_t(c + 100)];
  EXPECT_EQ(counts[100], 0);
  // 100000 draws over 200 values: 500 expected per value
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (i != 100) {
      EXPECT_GT(counts[i], 380) << int(i) - 100;
      EXPECT_LT(counts[i], 620) << int(i) - 100;
    }
}

TEST(GenParams, WiderExponentRangeStaysDistinct) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto p = gen_params(seed, 2, 4, {1, 9}, {-3, 3});
    std::set<std::int64_t> e(p.exponents.begin(), p.exponents.end());
    EXPECT_EQ(e.size(), 4u);
    EXPECT_GE(*e.begin(), 1);
    EXPECT_LE(*e.rbegin(), 9);
  }
}

TEST(GenParams, Errors) {
  EXPECT_THROW(gen_params(1, 0, 5, {1, 4}), RangeError);
  EXPECT_THROW(gen_params(1, 0, 5, {1, 5}, {0, 0}), RangeError);
  EXPECT_THROW(gen_params(1, 0, 5, {0, 5}), RangeError);
  EXPECT_THROW(gen_params(1, 5), ParamError);
  EXPECT_NO_THROW(gen_params(1, 4));
  EXPECT_NO_THROW(gen_params(1, 0, 5, {1, 5}, {1, 1}));
}

TEST(ParamsRecord, RoundTrip) {
  const auto p = gen_params(987654321, 4, 5, {1, 5}, {-50, 60});
  EXPECT_EQ(p.to_record(), "seed=987654321 m=5 e=1:5 c=-50:60 overlap=4");
  EXPECT_EQ(parse_params_record(p.to_record()), p);
  EXPECT_THROW(parse_params_record("m=5"), FormatError);
  EXPECT_THROW(parse_params_record("seed=1 bogus=2"), FormatError);
  EXPECT_THROW(parse_params_record("seed=x"), FormatError);
}

TEST(OutputLen, WorkedValues) {
  EXPECT_EQ(output_len(512, 5, 0), 102u);
  EXPECT_EQ(output_len(512, 5, 4), 508u);
  EXPECT_EQ(output_len(10, 5, 1), 2u);
  EXPECT_EQ(output_len(5, 5, 0), 1u);
  EXPECT_THROW(output_len(10, 5, 5), ParamError);
  EXPECT_THROW(output_len(4, 5, 0), ParamError);
}

TEST(OutputLen, MatchesWindowEnumeration) {
  for (int n = 5; n <= 600; ++n)
    for (int overlap = 0; overlap <= 4; ++overlap)
      ASSERT_EQ(int(output_len(n, 5, overlap)), oracle::enumerate_windows(n, 5, overlap)) << n << " " << overlap;
}

ProtectParams explicit_params(std::vector<std::int64_t> c, std::vector<std::int64_t> e, std::size_t overlap = 0) {
  ProtectParams p;
  p.coefficients = std::move(c);
  p.exponents = std::move(e);
  p.window = p.coefficients.size();
  p.overlap = overlap;
  return p;
}

TEST(Protect, WorkedExamples) {
  const auto p = explicit_params({2, -3, 4, 5, -1}, {1, 2, 3, 4, 5});
  const std::vector<double> ones(5, 1.0), zeros(5, 0.0);
  EXPECT_EQ(protect(ones, p).values, std::vector<double>{7.0});
  EXPECT_EQ(protect(zeros, p).values, std::vector<double>{0.0});
  const std::vector<double> v = {0.5, -0.5, 0.25, 1.0, 2.0};
  EXPECT_DOUBLE_EQ(protect(v, p).values.at(0), -26.6875);
}

TEST(Protect, OverlapOneUsesSharedValue) {
  const auto p = explicit_params({1, 1, 1, 1, 1}, {1, 2, 3, 4, 5}, 1);
  std::vector<double> v(10);
  for (std::size_t i = 0; i < 10; ++i) v[i] = double(i + 1);
  const auto out = protect(v, p);
  ASSERT_EQ(out.values.size(), 2u);
  // window 2 is v5..v9
  EXPECT_DOUBLE_EQ(out.values[1], 5.0 + 36.0 + 343.0 + 4096.0 + 59049.0);
  EXPECT_EQ(out.source_dim, 10u);
}

TEST(Protect, NegativeBasesKeepSign) {
  EXPECT_EQ(int_pow(-2.0, 3), -8.0);
  EXPECT_EQ(int_pow(-2.0, 4), 16.0);
  EXPECT_EQ(int_pow(-0.5, 1), -0.5);
}

TEST(Protect, MatchesBruteForceOracle) {
  std::mt19937_64 rng(2025);
  std::uniform_int_distribution<int> len(5, 600), ov(0, 4);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = std::size_t(len(rng));
    const std::size_t overlap = std::size_t(ov(rng));
    std::vector<double> v(n);
    for (auto& x : v) x = val(rng);
    const auto params = gen_params(rng(), overlap);
    const auto got = protect(v, params).values;
    const auto want = oracle::polynomial_protect(v, params.coefficients, params.exponents, int(overlap));
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t j = 0; j < got.size(); ++j) {
      const double scale = std::max(1.0, std::abs(want[j]));
      worst = std::max(worst, std::abs(got[j] - want[j]) / scale);
    }
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Protect, WindowCoverage) {
  for (std::size_t n = 5; n <= 60; ++n)
    for (std::size_t overlap = 0; overlap < 5; ++overlap) {
      const std::size_t stride = 5 - overlap, k = output_len(n, 5, overlap);
      std::vector<bool> used(n, false);
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < 5; ++i) used[j * stride + i] = true;
      const bool all = std::all_of(used.begin(), used.end(), [](bool b) { return b; });
      EXPECT_EQ(all, (n - 5) % stride == 0) << n << " " << overlap;
      const auto dropped = std::size_t(std::count(used.begin(), used.end(), false));
      EXPECT_LT(dropped, stride);
    }
}

TEST(Protect, IsNotLinear) {
  std::mt19937_64 rng(4);
  const auto v = random_unit(rng, 64);
  std::vector<double> scaled(v);
  for (auto& x : scaled) x *= 3.0;
  const auto params = gen_params(11, 0);
  const auto a = protect(v, params).values, b = protect(scaled, params).values;
  double diff = 0;
  for (std::size_t j = 0; j < a.size(); ++j) diff = std::max(diff, std::abs(b[j] - 3.0 * a[j]));
  EXPECT_GT(diff, 1e-3);
}

TEST(Protect, SeparatesIdentities) {
  std::mt19937_64 rng(77);
  double cross = 0, same = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const auto v = random_unit(rng, 128);
    auto v2 = v;
    std::normal_distribution<double> g(0, 0.01);
    for (auto& x : v2) x += g(rng);
    const auto pa = gen_params(2 * std::uint64_t(t), 4), pb = gen_params(2 * std::uint64_t(t) + 1, 4);
    cross += oracle::cosine(protect(v, pa).values, protect(v, pb).values);
    same += oracle::cosine(protect(v, pa).values, protect(v2, pa).values);
  }
  EXPECT_LT(cross / trials, same / trials);
  EXPECT_GT(same / trials, 0.9);
}

TEST(Protect, Errors) {
  const auto params = gen_params(1, 0);
  EXPECT_THROW(protect(std::vector<double>(4, 1.0), params), ParamError);
  std::vector<double> v(10, 0.5);
  v[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(protect(v, params), NonFiniteError);
  v[3] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(protect(v, params), NonFiniteError);
  EXPECT_THROW(protect(std::vector<double>(10, 1e300), explicit_params({1, 1, 1, 1, 1}, {1, 2, 3, 4, 5})), NonFiniteError);
  auto broken = params;
  broken.exponents.pop_back();
  EXPECT_THROW(protect(std::vector<double>(10, 1.0), broken), ParamError);
}

}  // namespace
}  // namespace hfcf
