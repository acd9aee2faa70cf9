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

// Cross-component frequency fusion, frequency/colour sorting, hybrid
// frequency-colour fusion and pixel-wise noise on the fused representation.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hfcf/bdct.hpp"
#include "hfcf/colordesc.hpp"
#include "hfcf/error.hpp"
#include "hfcf/tensorio.hpp"

namespace hfcf {

struct SortPermutation {
  std::vector<std::size_t> ordering;  // ordering[k] = input index of output plane k
  std::vector<double> key_values;     // key of output plane k
};

enum class HybridScheme { FreqOnly63, AddDlbp63, MultDlbp63, ConcatDlbp126, ConcatLbp66 };

inline const char* to_string(HybridScheme s) {
  switch (s) {
    case HybridScheme::FreqOnly63: return "freq";
    case HybridScheme::AddDlbp63: return "add";
    case HybridScheme::MultDlbp63: return "mult";
    case HybridScheme::ConcatDlbp126: return "concat-dlbp";
    case HybridScheme::ConcatLbp66: return "concat-lbp";
  }
  return "?";
}

inline HybridScheme parse_scheme(const std::string& name) {
  for (auto s : {HybridScheme::FreqOnly63, HybridScheme::AddDlbp63, HybridScheme::MultDlbp63,
                 HybridScheme::ConcatDlbp126, HybridScheme::ConcatLbp66})
    if (name == to_string(s)) return s;
  throw SchemeError("unknown fusion scheme: " + name);
}

inline constexpr std::size_t scheme_depth(HybridScheme s) {
  switch (s) {
    case HybridScheme::FreqOnly63:
    case HybridScheme::AddDlbp63:
    case HybridScheme::MultDlbp63: return 63;
    case HybridScheme::ConcatDlbp126: return 126;
    case HybridScheme::ConcatLbp66: return 66;
  }
  return 0;
}

inline constexpr bool uses_lbp(HybridScheme s) { return s == HybridScheme::ConcatLbp66; }

struct HybridTensor {
  Tensor3 planes;
  HybridScheme scheme = HybridScheme::FreqOnly63;

  void validate() const {
    planes.validate();
    if (planes.depth != scheme_depth(scheme)) throw DimError("HybridTensor: depth does not match scheme");
  }
};

// ---------------------------------------------------------------------------

// Per frequency level and pixel, keeps the Y/Cb/Cr coefficient with the
// largest magnitude (sign kept). Ties go to the earlier of Y, Cb, Cr.
inline DctTensor frequency_fuse(const DctTensor& ac) {
  if (ac.layout != DctLayout::Ac189) throw LayoutError("frequency_fuse: Ac189 input required");
  ac.validate();
  std::array<std::array<std::optional<std::size_t>, kFreqs>, 3> index{};
  for (std::size_t k = 0; k < ac.tags.size(); ++k) {
    const auto& tag = ac.tags[k];
    if (tag.component == Component::Mixed || tag.frequency < 1 || tag.frequency >= int(kFreqs))
      throw LayoutError("frequency_fuse: unexpected plane tag " + tag.label());
    index[std::size_t(tag.component)][tag.frequency] = k;
  }
  DctTensor out{Tensor3(ac.height(), ac.width(), kFreqs - 1), DctLayout::Fused63, {}};
  const std::size_t n = ac.height() * ac.width(), in_d = ac.depth(), out_d = kFreqs - 1;
  for (std::size_t f = 1; f < kFreqs; ++f) {
    std::array<std::size_t, 3> src{};
    for (std::size_t c = 0; c < 3; ++c) {
      if (!index[c][f]) throw LayoutError("frequency_fuse: missing component plane");
      src[c] = *index[c][f];
    }
    out.tags.push_back({Component::Mixed, int(f)});
    for (std::size_t i = 0; i < n; ++i) {
      double best = ac.planes.data[i * in_d + src[0]];
      for (std::size_t c = 1; c < 3; ++c) {
        const double v = ac.planes.data[i * in_d + src[c]];
        if (std::abs(v) > std::abs(best)) best = v;
      }
      out.planes.data[i * out_d + (f - 1)] = best;
    }
  }
  out.refresh_labels();
  return out;
}

namespace detail {

inline Tensor3 permute_planes(const Tensor3& t, std::span<const std::size_t> ordering) {
  Tensor3 out(t.height, t.width, ordering.size());
  const std::size_t n = t.height * t.width;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < ordering.size(); ++k) out.data[i * out.depth + k] = t.data[i * t.depth + ordering[k]];
  if (!t.labels.empty())
    for (std::size_t k : ordering) out.labels.push_back(t.labels[k]);
  return out;
}

template <typename Less>
SortPermutation stable_order(const std::vector<double>& keys, Less less) {
  SortPermutation perm;
  perm.ordering.resize(keys.size());
  std::iota(perm.ordering.begin(), perm.ordering.end(), std::size_t{0});
  std::stable_sort(perm.ordering.begin(), perm.ordering.end(),
                   [&](std::size_t a, std::size_t b) { return less(keys[a], keys[b]); });
  for (std::size_t k : perm.ordering) perm.key_values.push_back(keys[k]);
  return perm;
}

}  // namespace detail

// Descending channel energy, stable.
inline std::pair<DctTensor, SortPermutation> sort_by_energy(const DctTensor& fused) {
  if (fused.layout != DctLayout::Fused63) throw LayoutError("sort_by_energy: Fused63 input required");
  fused.validate();
  std::vector<double> energy(fused.depth());
  for (std::size_t k = 0; k < fused.depth(); ++k) energy[k] = channel_energy(fused.planes, k);
  auto perm = detail::stable_order(energy, [](double a, double b) { return a > b; });
  DctTensor out{detail::permute_planes(fused.planes, perm.ordering), DctLayout::Fused63, {}};
  for (std::size_t k : perm.ordering) out.tags.push_back(fused.tags[k]);
  out.refresh_labels();
  return {std::move(out), std::move(perm)};
}

inline double euclidean_distance(const Tensor3& t, std::size_t k, const Plane& reference) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.height * t.width; ++i) {
    const double d = t.data[i * t.depth + k] - reference.values[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// Ascending Euclidean distance to the luma DC plane (most similar first), stable.
inline std::pair<DlbpStack, SortPermutation> sort_dlbp_by_dc_similarity(const DlbpStack& stack, const Plane& dc_luma) {
  stack.planes.validate();
  if (stack.planes.height != dc_luma.rows || stack.planes.width != dc_luma.cols)
    throw DimError("sort_dlbp_by_dc_similarity: DLBP and DC planes differ in shape");
  std::vector<double> dist(stack.planes.depth);
  for (std::size_t k = 0; k < dist.size(); ++k) dist[k] = euclidean_distance(stack.planes, k, dc_luma);
  auto perm = detail::stable_order(dist, [](double a, double b) { return a < b; });
  return {DlbpStack{detail::permute_planes(stack.planes, perm.ordering)}, std::move(perm)};
}

// ---------------------------------------------------------------------------

namespace detail {

inline void require_freq(const DctTensor& freq) {
  if (freq.layout != DctLayout::Fused63) throw LayoutError("hybrid_fuse: frequency input must be Fused63");
  freq.validate();
}

inline std::vector<std::string> labels_or_index(const Tensor3& t, const std::string& prefix) {
  if (!t.labels.empty()) return t.labels;
  std::vector<std::string> out;
  for (std::size_t k = 0; k < t.depth; ++k) out.push_back(prefix + std::to_string(k));
  return out;
}

}  // namespace detail

inline HybridTensor hybrid_freq_only(const DctTensor& freq) {
  detail::require_freq(freq);
  return {freq.planes, HybridScheme::FreqOnly63};
}

// DLBP schemes drop the first (most DC-like) sorted DLBP plane and use the
// next 63. `alpha` scales the DLBP term of the additive scheme.
inline HybridTensor hybrid_fuse(const DctTensor& freq, const DlbpStack& color, HybridScheme scheme,
                                double alpha = 1.0) {
  if (uses_lbp(scheme)) throw SchemeError("hybrid_fuse: LBP scheme requires LBP code images");
  if (scheme == HybridScheme::FreqOnly63) return hybrid_freq_only(freq);
  detail::require_freq(freq);
  const Tensor3& dlbp = color.planes;
  dlbp.validate();
  if (dlbp.depth < freq.depth() + 1) throw DimError("hybrid_fuse: need at least 64 DLBP planes");
  if (dlbp.height != freq.height() || dlbp.width != freq.width())
    throw DimError("hybrid_fuse: DLBP and frequency planes differ in shape");

  const std::size_t n = freq.height() * freq.width(), fd = freq.depth();
  const auto flabels = detail::labels_or_index(freq.planes, "F#");
  const auto clabels = detail::labels_or_index(dlbp, "DLBP#");
  HybridTensor out{Tensor3(freq.height(), freq.width(), scheme_depth(scheme)), scheme};
  auto color_at = [&](std::size_t i, std::size_t k) { return dlbp.data[i * dlbp.depth + k + 1]; };

  switch (scheme) {
    case HybridScheme::AddDlbp63:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < fd; ++k)
          out.planes.data[i * fd + k] = freq.planes.data[i * fd + k] + alpha * color_at(i, k);
      for (std::size_t k = 0; k < fd; ++k) out.planes.labels.push_back(flabels[k] + "+" + clabels[k + 1]);
      break;
    case HybridScheme::MultDlbp63:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < fd; ++k)
          out.planes.data[i * fd + k] = freq.planes.data[i * fd + k] * (1.0 + color_at(i, k) / 255.0);
      for (std::size_t k = 0; k < fd; ++k) out.planes.labels.push_back(flabels[k] + "*" + clabels[k + 1]);
      break;
    case HybridScheme::ConcatDlbp126: {
      const std::size_t od = out.planes.depth;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < fd; ++k) {
          out.planes.data[i * od + k] = freq.planes.data[i * fd + k];
          out.planes.data[i * od + fd + k] = color_at(i, k);
        }
      out.planes.labels = flabels;
      out.planes.labels.insert(out.planes.labels.end(), clabels.begin() + 1, clabels.begin() + 1 + fd);
      break;
    }
    default: throw SchemeError("hybrid_fuse: unsupported scheme");
  }
  return out;
}

// LBP codes enter only through concatenation.
inline HybridTensor hybrid_fuse(const DctTensor& freq, std::span<const LbpCodeImage> lbp, HybridScheme scheme) {
  if (!uses_lbp(scheme)) throw SchemeError("hybrid_fuse: LBP features are only used with concatenation");
  detail::require_freq(freq);
  if (lbp.size() != 3) throw DimError("hybrid_fuse: expected R, G, B LBP code images");
  for (const auto& c : lbp)
    if (c.rows != freq.height() || c.cols != freq.width())
      throw DimError("hybrid_fuse: LBP and frequency planes differ in shape");
  const std::size_t n = freq.height() * freq.width(), fd = freq.depth(), od = fd + 3;
  HybridTensor out{Tensor3(freq.height(), freq.width(), od), scheme};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < fd; ++k) out.planes.data[i * od + k] = freq.planes.data[i * fd + k];
    for (std::size_t c = 0; c < 3; ++c) out.planes.data[i * od + fd + c] = lbp[c].codes[i];
  }
  out.planes.labels = detail::labels_or_index(freq.planes, "F#");
  for (const auto& c : lbp) out.planes.labels.push_back("LBP:" + c.source_channel);
  return out;
}

// ---------------------------------------------------------------------------

enum class NoiseMechanism { None, Laplace, Gaussian };

struct NoiseSpec {
  NoiseMechanism mechanism = NoiseMechanism::None;
  double epsilon = 1.0;      // Laplace budget
  double sigma = 1.0;        // Gaussian standard deviation
  double sensitivity = 1.0;  // Laplace per-coefficient bound
  std::uint64_t seed = 0;

  void validate() const {
    if (mechanism == NoiseMechanism::Laplace && !(epsilon > 0.0 && sensitivity > 0.0))
      throw ParamError("Laplace noise needs epsilon > 0 and sensitivity > 0");
    if (mechanism == NoiseMechanism::Gaussian && !(sigma > 0.0)) throw ParamError("Gaussian noise needs sigma > 0");
    if (!std::isfinite(epsilon) || !std::isfinite(sigma) || !std::isfinite(sensitivity))
      throw ParamError("noise parameters must be finite");
  }

  std::string describe() const {
    switch (mechanism) {
      case NoiseMechanism::None: return "none";
      case NoiseMechanism::Laplace: return "laplace:" + std::to_string(epsilon);
      case NoiseMechanism::Gaussian: return "gauss:" + std::to_string(sigma);
    }
    return "?";
  }
};

// "none", "laplace:EPS" or "gauss:SIGMA".
inline NoiseSpec parse_noise(const std::string& text, std::uint64_t seed = 0, double sensitivity = 1.0) {
  NoiseSpec spec;
  spec.seed = seed;
  spec.sensitivity = sensitivity;
  auto value_after = [&](std::size_t prefix) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text.substr(prefix), &used);
      if (used != text.size() - prefix) throw ParamError("trailing characters in noise spec: " + text);
      return v;
    } catch (const std::logic_error&) {
      throw ParamError("malformed noise spec: " + text);
    }
  };
  if (text == "none") {
    spec.mechanism = NoiseMechanism::None;
  } else if (text.rfind("laplace:", 0) == 0) {
    spec.mechanism = NoiseMechanism::Laplace;
    spec.epsilon = value_after(8);
  } else if (text.rfind("gauss:", 0) == 0) {
    spec.mechanism = NoiseMechanism::Gaussian;
    spec.sigma = value_after(6);
  } else {
    throw ParamError("unknown noise mechanism: " + text);
  }
  spec.validate();
  return spec;
}

// Inverse-CDF Laplace(0, scale) draw.
template <typename Engine>
double sample_laplace(Engine& engine, double scale) {
  std::uniform_real_distribution<double> uniform(-0.5, 0.5);
  double u;
  do {
    u = uniform(engine);
  } while (u == -0.5);
  return -scale * std::copysign(1.0, u) * std::log1p(-2.0 * std::abs(u));
}

inline HybridTensor apply_dp_noise(const HybridTensor& t, const NoiseSpec& spec) {
  spec.validate();
  HybridTensor out = t;
  if (spec.mechanism == NoiseMechanism::None) return out;
  std::mt19937_64 engine(spec.seed);
  if (spec.mechanism == NoiseMechanism::Laplace) {
    const double scale = spec.sensitivity / spec.epsilon;
    for (auto& v : out.planes.data) v += sample_laplace(engine, scale);
  } else {
    std::normal_distribution<double> normal(0.0, spec.sigma);
    for (auto& v : out.planes.data) v += normal(engine);
  }
  return out;
}

}  // namespace hfcf
