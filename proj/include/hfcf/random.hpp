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

#include <sodium.h>

#include <array>
#include <cstdint>
#include <cstring>
#include <random>

#include "hfcf/error.hpp"

namespace hfcf {

inline void ensure_sodium() {
  static const int status = sodium_init();
  if (status < 0) throw Error("libsodium initialisation failed");
}

// Unbiased draw from [0, bound) by rejection on the raw 64-bit stream.
// Avoids std::uniform_int_distribution so that seeded draws are identical
// across standard library implementations.
template <typename Engine>
std::uint64_t uniform_below(Engine& engine, std::uint64_t bound) {
  if (bound == 0) throw RangeError("uniform_below: empty range");
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t draw;
  do {
    draw = engine();
  } while (draw >= limit);
  return draw % bound;
}

template <typename Engine>
std::int64_t uniform_int(Engine& engine, std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw RangeError("uniform_int: hi < lo");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(uniform_below(engine, span));
}

// ChaCha20 keystream exposed as a 64-bit word generator. Seeded instances are
// reproducible; secure() draws its key from the OS.
class RingRng {
 public:
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return UINT64_MAX; }

  explicit RingRng(std::uint64_t seed) {
    ensure_sodium();
    std::array<unsigned char, 8> seed_bytes{};
    for (int i = 0; i < 8; ++i) seed_bytes[i] = static_cast<unsigned char>(seed >> (8 * i));
    static constexpr char kContext[] = "hfcf.ring-rng.v1";
    crypto_generichash(key_.data(), key_.size(), seed_bytes.data(), seed_bytes.size(),
                       reinterpret_cast<const unsigned char*>(kContext), sizeof(kContext) - 1);
  }

  static RingRng secure() {
    ensure_sodium();
    RingRng rng;
    randombytes_buf(rng.key_.data(), rng.key_.size());
    return rng;
  }

  result_type operator()() {
    if (pos_ == kWords) refill();
    return buffer_[pos_++];
  }

 private:
  static constexpr std::size_t kWords = 512;
  static constexpr std::size_t kBlocks = kWords * 8 / 64;

  RingRng() = default;

  void refill() {
    std::array<unsigned char, kWords * 8> bytes{};
    static constexpr std::array<unsigned char, crypto_stream_chacha20_NONCEBYTES> kNonce{};
    crypto_stream_chacha20_xor_ic(bytes.data(), bytes.data(), bytes.size(), kNonce.data(),
                                  counter_, key_.data());
    counter_ += kBlocks;
    for (std::size_t i = 0; i < kWords; ++i) {
      std::uint64_t w = 0;
      for (int b = 7; b >= 0; --b) w = (w << 8) | bytes[i * 8 + b];
      buffer_[i] = w;
    }
    pos_ = 0;
  }

  std::array<unsigned char, crypto_stream_chacha20_KEYBYTES> key_{};
  std::array<std::uint64_t, kWords> buffer_{};
  std::size_t pos_ = kWords;
  std::uint64_t counter_ = 0;
};

}  // namespace hfcf
