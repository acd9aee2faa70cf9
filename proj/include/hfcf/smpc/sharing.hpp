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

// Two-party additive secret sharing over Z_{2^64} and Beaver-triple dot
// products with a trusted dealer.

#pragma once

#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hfcf/bytes.hpp"
#include "hfcf/error.hpp"
#include "hfcf/random.hpp"
#include "hfcf/smpc/fixed_point.hpp"

namespace hfcf::smpc {

enum class Party : std::uint8_t { Client = 1, Server = 2 };

struct ShareVector {
  Party party = Party::Client;
  std::vector<Word> words;
  std::uint64_t session_id = 0;

  friend bool operator==(const ShareVector&, const ShareVector&) = default;
};

// Client share is uniform; server share = secret - client share.
template <typename Rng>
std::pair<ShareVector, ShareVector> share(const FixedVec& secret, Rng& rng, std::uint64_t session_id = 0) {
  ShareVector client{Party::Client, std::vector<Word>(secret.size()), session_id};
  ShareVector server{Party::Server, std::vector<Word>(secret.size()), session_id};
  for (std::size_t i = 0; i < secret.size(); ++i) {
    client.words[i] = rng();
    server.words[i] = secret.words[i] - client.words[i];
  }
  return {std::move(client), std::move(server)};
}

inline std::vector<Word> reconstruct(std::span<const Word> a, std::span<const Word> b) {
  if (a.size() != b.size()) throw ProtocolError("reconstruct: share lengths differ");
  std::vector<Word> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline Word ring_dot(std::span<const Word> a, std::span<const Word> b) {
  Word s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// One party's share of a dot-product triple: c = <a, b> after reconstruction.
struct BeaverTripleShare {
  std::uint64_t id = 0;
  std::vector<Word> a;
  std::vector<Word> b;
  Word c = 0;

  std::size_t dim() const { return a.size(); }
  friend bool operator==(const BeaverTripleShare&, const BeaverTripleShare&) = default;
};

struct DealerOutput {
  std::vector<BeaverTripleShare> client;
  std::vector<BeaverTripleShare> server;
};

// Deterministic under `seed`; triple ids run 1..count.
inline DealerOutput dealer_make_triples(std::size_t count, std::size_t dim, std::uint64_t seed) {
  if (count == 0 || dim == 0) throw ParamError("dealer_make_triples: count and dim must be >= 1");
  RingRng rng(seed);
  DealerOutput out;
  out.client.reserve(count);
  out.server.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    BeaverTripleShare cs{t + 1, std::vector<Word>(dim), std::vector<Word>(dim), 0};
    BeaverTripleShare ss{t + 1, std::vector<Word>(dim), std::vector<Word>(dim), 0};
    Word c = 0;
    for (std::size_t i = 0; i < dim; ++i) {
      const Word a = rng(), b = rng();
      c += a * b;
      cs.a[i] = rng();
      ss.a[i] = a - cs.a[i];
      cs.b[i] = rng();
      ss.b[i] = b - cs.b[i];
    }
    cs.c = rng();
    ss.c = c - cs.c;
    out.client.push_back(std::move(cs));
    out.server.push_back(std::move(ss));
  }
  return out;
}

inline bool triple_consistent(const BeaverTripleShare& x, const BeaverTripleShare& y) {
  if (x.id != y.id || x.dim() != y.dim() || x.b.size() != x.dim() || y.b.size() != y.dim()) return false;
  const auto a = reconstruct(x.a, y.a), b = reconstruct(x.b, y.b);
  return x.c + y.c == ring_dot(a, b);
}

// Records consumed triple ids; a second use of any id is a protocol error.
class TripleLedger {
 public:
  void consume(std::uint64_t id) {
    std::lock_guard lock(mutex_);
    if (!used_.insert(id).second) throw ProtocolError("Beaver triple " + std::to_string(id) + " reused");
  }

  bool used(std::uint64_t id) const {
    std::lock_guard lock(mutex_);
    return used_.contains(id);
  }

 private:
  mutable std::mutex mutex_;
  std::unordered_set<std::uint64_t> used_;
};

// One party's pool of triples.
class TripleStore {
 public:
  TripleStore() = default;
  explicit TripleStore(std::vector<BeaverTripleShare> triples) {
    for (auto& t : triples) {
      const auto id = t.id;
      if (!index_.emplace(id, triples_.size()).second)
        throw FormatError("triple store: duplicate id " + std::to_string(id));
      triples_.push_back(std::move(t));
    }
  }

  // Marks `id` used and returns its share.
  const BeaverTripleShare& consume(std::uint64_t id) {
    const auto it = index_.find(id);
    if (it == index_.end()) throw ProtocolError("unknown Beaver triple " + std::to_string(id));
    ledger_.consume(id);
    return triples_[it->second];
  }

  // Next never-used triple in store order.
  const BeaverTripleShare& take_next() {
    std::lock_guard lock(cursor_mutex_);
    while (cursor_ < triples_.size() && ledger_.used(triples_[cursor_].id)) ++cursor_;
    if (cursor_ == triples_.size()) throw ProtocolError("Beaver triple pool exhausted");
    return consume(triples_[cursor_++].id);
  }

  std::size_t size() const { return triples_.size(); }
  const std::vector<BeaverTripleShare>& triples() const { return triples_; }

 private:
  std::vector<BeaverTripleShare> triples_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  TripleLedger ledger_;
  std::mutex cursor_mutex_;
  std::size_t cursor_ = 0;
};

// ---------------------------------------------------------------------------
// Beaver steps. With x = x1 + x2, y = y1 + y2 and a triple (a, b, c):
//   d = x - a and e = y - b are opened, then
//   z_client = c1 + <d, b1> + <e, a1> + <d, e>,  z_server = c2 + <d, b2> + <e, a2>
// and z_client + z_server = <x, y>.

inline std::vector<Word> masked_difference(std::span<const Word> x, std::span<const Word> mask) {
  if (x.size() != mask.size()) throw ProtocolError("Beaver open: input and triple lengths differ");
  std::vector<Word> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - mask[i];
  return out;
}

inline Word beaver_result_share(Party party, const BeaverTripleShare& triple, std::span<const Word> d,
                                std::span<const Word> e) {
  if (d.size() != triple.dim() || e.size() != triple.dim()) throw ProtocolError("Beaver combine: length mismatch");
  Word z = triple.c + ring_dot(d, triple.b) + ring_dot(e, triple.a);
  if (party == Party::Client) z += ring_dot(d, e);
  return z;
}

struct ScalarShares {
  Word client = 0;
  Word server = 0;
};

// In-process run of the two-party exchange. Both parties' shares are given;
// the same `ledger` must be used for every call drawing from one dealer run.
inline ScalarShares shared_dot(const ShareVector& x_client, const ShareVector& x_server, const ShareVector& y_client,
                               const ShareVector& y_server, const BeaverTripleShare& t_client,
                               const BeaverTripleShare& t_server, TripleLedger& ledger) {
  const std::size_t n = x_client.words.size();
  if (x_server.words.size() != n || y_client.words.size() != n || y_server.words.size() != n)
    throw ProtocolError("shared_dot: share lengths differ");
  if (t_client.id != t_server.id) throw ProtocolError("shared_dot: parties hold different triples");
  if (t_client.dim() != n || t_server.dim() != n) throw ProtocolError("shared_dot: triple dimension mismatch");
  ledger.consume(t_client.id);
  const auto d = reconstruct(masked_difference(x_client.words, t_client.a), masked_difference(x_server.words, t_server.a));
  const auto e = reconstruct(masked_difference(y_client.words, t_client.b), masked_difference(y_server.words, t_server.b));
  return {beaver_result_share(Party::Client, t_client, d, e), beaver_result_share(Party::Server, t_server, d, e)};
}

// Reconstructs a product at scale 2s, truncates once, and decodes.
inline double reconstruct_product(Word z_client, Word z_server, unsigned scale_bits = kDefaultScaleBits) {
  return decode_fixed(truncate(z_client + z_server, scale_bits), scale_bits);
}

// ---------------------------------------------------------------------------
// Triple file: "HFB1" | u8 party | u32 count | u32 dim | per triple:
// u64 id, dim x u64 a, dim x u64 b, u64 c.

inline constexpr std::string_view kTripleMagic = "HFB1";

inline bytes::Buffer encode_triples(Party party, std::span<const BeaverTripleShare> triples) {
  if (triples.empty()) throw FormatError("triple file: no triples");
  const std::size_t dim = triples[0].dim();
  bytes::Buffer out(kTripleMagic.begin(), kTripleMagic.end());
  out.push_back(static_cast<std::uint8_t>(party));
  bytes::put_le(out, static_cast<std::uint32_t>(triples.size()));
  bytes::put_le(out, static_cast<std::uint32_t>(dim));
  for (const auto& t : triples) {
    if (t.dim() != dim || t.b.size() != dim) throw FormatError("triple file: mixed dimensions");
    bytes::put_le(out, t.id);
    for (Word w : t.a) bytes::put_le(out, w);
    for (Word w : t.b) bytes::put_le(out, w);
    bytes::put_le(out, t.c);
  }
  return out;
}

inline std::pair<Party, std::vector<BeaverTripleShare>> decode_triples(std::span<const std::uint8_t> data) {
  if (!bytes::starts_with(data, kTripleMagic)) throw FormatError("triple file: bad magic");
  bytes::Reader in(data.subspan(4));
  const auto party_byte = in.get_le<std::uint8_t>();
  if (party_byte != 1 && party_byte != 2) throw FormatError("triple file: bad party tag");
  const auto count = in.get_le<std::uint32_t>(), dim = in.get_le<std::uint32_t>();
  if (count == 0 || dim == 0) throw FormatError("triple file: zero count or dimension");
  if (in.remaining() != std::uint64_t(count) * (16 + 16 * std::uint64_t(dim)))
    throw FormatError("triple file: size does not match header");
  std::vector<BeaverTripleShare> triples(count);
  for (auto& t : triples) {
    t.id = in.get_le<std::uint64_t>();
    t.a.resize(dim);
    t.b.resize(dim);
    for (auto& w : t.a) w = in.get_le<std::uint64_t>();
    for (auto& w : t.b) w = in.get_le<std::uint64_t>();
    t.c = in.get_le<std::uint64_t>();
  }
  return {static_cast<Party>(party_byte), std::move(triples)};
}

}  // namespace hfcf::smpc
