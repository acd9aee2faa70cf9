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

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "hfcf/error.hpp"
#include "hfcf/tensorio.hpp"

namespace hfcf {

struct MetricReport {
  double psnr_db = 0.0;  // +infinity when the planes are identical
  double ssim = 0.0;
  std::string ref_label;
  std::string test_label;

  bool psnr_infinite() const { return std::isinf(psnr_db); }

  std::string to_line() const {
    std::ostringstream os;
    os << ref_label << " vs " << test_label << ": PSNR=";
    if (psnr_infinite())
      os << "inf";
    else
      os << psnr_db;
    os << " dB SSIM=" << ssim;
    return os.str();
  }
};

// Affine map of the plane onto [0, max_value]; a constant plane maps to 0.
inline Plane normalize_minmax(const Plane& p, double max_value = 255.0) {
  if (p.values.empty()) return p;
  const auto [lo, hi] = std::minmax_element(p.values.begin(), p.values.end());
  Plane out(p.rows, p.cols);
  const double range = *hi - *lo;
  if (range <= 0.0) return out;
  for (std::size_t i = 0; i < p.values.size(); ++i) out.values[i] = (p.values[i] - *lo) / range * max_value;
  return out;
}

inline double psnr(const Plane& ref, const Plane& test, double max_value = 255.0) {
  if (!ref.same_shape(test) || ref.values.empty()) throw DimError("psnr: planes differ in shape");
  double mse = 0.0;
  for (std::size_t i = 0; i < ref.values.size(); ++i) {
    const double d = ref.values[i] - test.values[i];
    mse += d * d;
  }
  mse /= double(ref.values.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_value * max_value / mse);
}

namespace detail {

inline constexpr std::size_t kSsimWindow = 11;

inline const std::array<double, kSsimWindow>& ssim_kernel() {
  static const auto k = [] {
    std::array<double, kSsimWindow> w{};
    constexpr double sigma = 1.5;
    double sum = 0.0;
    for (std::size_t i = 0; i < kSsimWindow; ++i) {
      const double x = double(i) - double(kSsimWindow / 2);
      w[i] = std::exp(-x * x / (2.0 * sigma * sigma));
      sum += w[i];
    }
    for (auto& v : w) v /= sum;
    return w;
  }();
  return k;
}

// Separable Gaussian filter, "valid" region only.
inline Plane filter_valid(const Plane& p) {
  const auto& w = ssim_kernel();
  const std::size_t out_r = p.rows - kSsimWindow + 1, out_c = p.cols - kSsimWindow + 1;
  Plane horiz(p.rows, out_c);
  for (std::size_t i = 0; i < p.rows; ++i)
    for (std::size_t j = 0; j < out_c; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < kSsimWindow; ++t) s += w[t] * p.at(i, j + t);
      horiz.at(i, j) = s;
    }
  Plane out(out_r, out_c);
  for (std::size_t i = 0; i < out_r; ++i)
    for (std::size_t j = 0; j < out_c; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < kSsimWindow; ++t) s += w[t] * horiz.at(i + t, j);
      out.at(i, j) = s;
    }
  return out;
}

inline Plane product(const Plane& a, const Plane& b) {
  Plane out(a.rows, a.cols);
  for (std::size_t i = 0; i < a.values.size(); ++i) out.values[i] = a.values[i] * b.values[i];
  return out;
}

}  // namespace detail

// Mean SSIM over all full 11x11 Gaussian (sigma 1.5) windows,
// C1 = (0.01 L)^2, C2 = (0.03 L)^2.
inline double ssim(const Plane& ref, const Plane& test, double max_value = 255.0) {
  if (!ref.same_shape(test)) throw DimError("ssim: planes differ in shape");
  if (ref.rows < detail::kSsimWindow || ref.cols < detail::kSsimWindow)
    throw DimError("ssim: planes must be at least 11x11");
  const double c1 = (0.01 * max_value) * (0.01 * max_value);
  const double c2 = (0.03 * max_value) * (0.03 * max_value);
  const Plane mu_a = detail::filter_valid(ref), mu_b = detail::filter_valid(test);
  const Plane e_aa = detail::filter_valid(detail::product(ref, ref));
  const Plane e_bb = detail::filter_valid(detail::product(test, test));
  const Plane e_ab = detail::filter_valid(detail::product(ref, test));
  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.values.size(); ++i) {
    const double ma = mu_a.values[i], mb = mu_b.values[i];
    const double var_a = e_aa.values[i] - ma * ma;
    const double var_b = e_bb.values[i] - mb * mb;
    const double cov = e_ab.values[i] - ma * mb;
    total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
  }
  return std::clamp(total / double(mu_a.values.size()), -1.0, 1.0);
}

inline MetricReport compare_planes(const Plane& ref, const Plane& test, std::string ref_label,
                                   std::string test_label, double max_value = 255.0) {
  return {psnr(ref, test, max_value), ssim(ref, test, max_value), std::move(ref_label), std::move(test_label)};
}

}  // namespace hfcf
