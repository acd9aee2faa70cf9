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

// Identity-specific polynomial protection of face embeddings.
//
// Each output value is  p_j = sum_i C_i * v_{s+i}^{E_i},  i = 1..m, over a
// window of m consecutive embedding values starting at s = (j - 1)(m - overlap).
// Consecutive windows share `overlap` values; trailing values that cannot
// fill a whole window are dropped.
//
// With overlap = m - 1 a protected vector can be approximately inverted by
// anyone holding (C, E), so such templates should only be compared through
// the secret-shared route in hfcf/smpc.

#pragma once

#include <sodium.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "hfcf/error.hpp"
#include "hfcf/random.hpp"

namespace hfcf {

struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

inline constexpr std::size_t kDefaultWindow = 5;
inline constexpr IntRange kDefaultExponentRange{1, 5};
inline constexpr IntRange kDefaultCoefficientRange{-100, 100};

struct ProtectParams {
  std::vector<std::int64_t> coefficients;  // C, all non-zero
  std::vector<std::int64_t> exponents;     // E, pairwise distinct
  std::size_t window = kDefaultWindow;     // m
  std::size_t overlap = 0;
  std::uint64_t identity_seed = 0;
  IntRange exponent_range = kDefaultExponentRange;
  IntRange coefficient_range = kDefaultCoefficientRange;

  friend bool operator==(const ProtectParams&, const ProtectParams&) = default;

  // Hex BLAKE2b-128 digest of (m, overlap, C, E).
  std::string fingerprint() const {
    ensure_sodium();
    std::vector<unsigned char> msg;
    auto put = [&](std::int64_t v) {
      for (int i = 0; i < 8; ++i) msg.push_back(static_cast<unsigned char>(static_cast<std::uint64_t>(v) >> (8 * i)));
    };
    put(std::int64_t(window));
    put(std::int64_t(overlap));
    for (auto c : coefficients) put(c);
    for (auto e : exponents) put(e);
    unsigned char digest[16];
    crypto_generichash(digest, sizeof digest, msg.data(), msg.size(), nullptr, 0);
    char hex[2 * sizeof digest + 1];
    sodium_bin2hex(hex, sizeof hex, digest, sizeof digest);
    return hex;
  }

  // Everything needed to regenerate (C, E) with gen_params.
  std::string to_record() const {
    std::ostringstream os;
    os << "seed=" << identity_seed << " m=" << window << " e=" << exponent_range.lo << ":" << exponent_range.hi
       << " c=" << coefficient_range.lo << ":" << coefficient_range.hi << " overlap=" << overlap;
    return os.str();
  }
};

struct ProtectedEmbedding {
  std::vector<double> values;
  std::size_t source_dim = 0;
  std::string params_fingerprint;
};

inline std::size_t output_len(std::size_t n, std::size_t m, std::size_t overlap) {
  if (m == 0) throw ParamError("output_len: window must be >= 1");
  if (overlap >= m) throw ParamError("output_len: overlap must be < window");
  if (n < m) throw ParamError("output_len: embedding shorter than window");
  return (n - m) / (m - overlap) + 1;
}

inline ProtectParams gen_params(std::uint64_t identity_seed, std::size_t overlap, std::size_t m = kDefaultWindow,
                                IntRange e_range = kDefaultExponentRange,
                                IntRange c_range = kDefaultCoefficientRange) {
  if (m == 0) throw ParamError("gen_params: window must be >= 1");
  if (overlap >= m) throw ParamError("gen_params: overlap must be in [0, m-1]");
  if (e_range.hi < e_range.lo || std::uint64_t(e_range.hi - e_range.lo) + 1 < m)
    throw RangeError("gen_params: exponent range holds fewer than m values");
  if (e_range.lo < 1) throw RangeError("gen_params: exponents must be positive");
  if (c_range.hi < c_range.lo) throw RangeError("gen_params: empty coefficient range");
  const bool has_zero = c_range.lo <= 0 && c_range.hi >= 0;
  const std::uint64_t nonzero = std::uint64_t(c_range.hi - c_range.lo) + 1 - (has_zero ? 1 : 0);
  if (nonzero == 0) throw RangeError("gen_params: coefficient range contains only 0");

  std::mt19937_64 engine(identity_seed);
  ProtectParams p;
  p.window = m;
  p.overlap = overlap;
  p.identity_seed = identity_seed;
  p.exponent_range = e_range;
  p.coefficient_range = c_range;
  for (std::size_t i = 0; i < m; ++i) {
    auto c = c_range.lo + static_cast<std::int64_t>(uniform_below(engine, nonzero));
    if (has_zero && c >= 0) ++c;
    p.coefficients.push_back(c);
  }
  std::vector<std::int64_t> pool;
  for (auto e = e_range.lo; e <= e_range.hi; ++e) pool.push_back(e);
  for (std::size_t i = 0; i < m; ++i) {
    const auto j = i + uniform_below(engine, pool.size() - i);
    std::swap(pool[i], pool[j]);
    p.exponents.push_back(pool[i]);
  }
  return p;
}

inline ProtectParams parse_params_record(const std::string& record) {
  std::istringstream in(record);
  std::string token;
  std::uint64_t seed = 0;
  std::size_t m = kDefaultWindow, overlap = 0;
  IntRange e = kDefaultExponentRange, c = kDefaultCoefficientRange;
  bool have_seed = false;
  auto parse_range = [&](const std::string& v) {
    const auto colon = v.find(':', 1);
    if (colon == std::string::npos) throw FormatError("params record: malformed range " + v);
    return IntRange{std::stoll(v.substr(0, colon)), std::stoll(v.substr(colon + 1))};
  };
  try {
    while (in >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) throw FormatError("params record: malformed token " + token);
      const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
      if (key == "seed") {
        seed = std::stoull(value);
        have_seed = true;
      } else if (key == "m") {
        m = std::stoul(value);
      } else if (key == "overlap") {
        overlap = std::stoul(value);
      } else if (key == "e") {
        e = parse_range(value);
      } else if (key == "c") {
        c = parse_range(value);
      } else {
        throw FormatError("params record: unknown key " + key);
      }
    }
  } catch (const std::logic_error&) {
    throw FormatError("params record: malformed number in '" + record + "'");
  }
  if (!have_seed) throw FormatError("params record: missing seed");
  return gen_params(seed, overlap, m, e, c);
}

// Repeated multiplication keeps the sign of negative bases for odd exponents.
inline double int_pow(double base, std::int64_t exponent) {
  double result = 1.0;
  for (std::int64_t i = 0; i < exponent; ++i) result *= base;
  return result;
}

inline ProtectedEmbedding protect(std::span<const double> v, const ProtectParams& params) {
  const std::size_t m = params.window;
  if (params.coefficients.size() != m || params.exponents.size() != m)
    throw ParamError("protect: C and E must both have m entries");
  for (double x : v)
    if (!std::isfinite(x)) throw NonFiniteError("protect: embedding contains a non-finite value");
  const std::size_t k = output_len(v.size(), m, params.overlap);
  const std::size_t stride = m - params.overlap;
  ProtectedEmbedding out{std::vector<double>(k), v.size(), params.fingerprint()};
  for (std::size_t j = 0; j < k; ++j) {
    double p = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      p += double(params.coefficients[i]) * int_pow(v[j * stride + i], params.exponents[i]);
    if (!std::isfinite(p)) throw NonFiniteError("protect: protected value overflowed");
    out.values[j] = p;
  }
  return out;
}

}  // namespace hfcf
