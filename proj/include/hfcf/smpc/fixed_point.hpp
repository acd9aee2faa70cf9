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

// Fixed-point encoding of real vectors into the ring Z_{2^64}.

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "hfcf/error.hpp"

namespace hfcf::smpc {

inline constexpr unsigned kDefaultScaleBits = 16;

using Word = std::uint64_t;

struct FixedVec {
  std::vector<Word> words;  // two's-complement fixed-point values
  unsigned scale_bits = kDefaultScaleBits;

  std::size_t size() const { return words.size(); }
  friend bool operator==(const FixedVec&, const FixedVec&) = default;
};

inline Word encode_fixed(double x, unsigned scale_bits = kDefaultScaleBits) {
  if (scale_bits >= 62) throw ParamError("encode_fixed: scale_bits too large");
  if (!std::isfinite(x)) throw NonFiniteError("encode_fixed: non-finite value");
  const double limit = std::ldexp(1.0, 63 - int(scale_bits));
  if (!(std::abs(x) < limit)) throw OverflowError("encode_fixed: |x| >= 2^(63 - scale_bits)");
  const double scaled = std::nearbyint(std::ldexp(x, int(scale_bits)));
  return static_cast<Word>(static_cast<std::int64_t>(scaled));
}

inline double decode_fixed(Word w, unsigned scale_bits = kDefaultScaleBits) {
  return std::ldexp(double(static_cast<std::int64_t>(w)), -int(scale_bits));
}

inline FixedVec encode_fixed(std::span<const double> x, unsigned scale_bits = kDefaultScaleBits) {
  FixedVec out{std::vector<Word>(x.size()), scale_bits};
  for (std::size_t i = 0; i < x.size(); ++i) out.words[i] = encode_fixed(x[i], scale_bits);
  return out;
}

inline std::vector<double> decode_fixed(const FixedVec& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = decode_fixed(v.words[i], v.scale_bits);
  return out;
}

// Arithmetic right shift: a product at scale 2s back to scale s.
inline Word truncate(Word w, unsigned bits) {
  return static_cast<Word>(static_cast<std::int64_t>(w) >> bits);
}

}  // namespace hfcf::smpc
