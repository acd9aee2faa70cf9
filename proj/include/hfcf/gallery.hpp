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

// Enrolment database of protected templates and 1:N identification.
//
// (C, E) are identity specific, so a 1:N query is re-protected once per
// candidate identity with that identity's parameters before comparison.

#pragma once

#include <sodium.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hfcf/bytes.hpp"
#include "hfcf/error.hpp"
#include "hfcf/polyprotect.hpp"
#include "hfcf/random.hpp"
#include "hfcf/smpc/session.hpp"

namespace hfcf {

struct GalleryRecord {
  std::string identity;
  std::vector<double> values;  // P_A, float32-representable
  std::string params_fingerprint;
  double norm = 0.0;

  friend bool operator==(const GalleryRecord&, const GalleryRecord&) = default;
};

struct RankedIdentity {
  std::string identity;
  double distance = 0.0;
};

struct QueryResult {
  std::vector<RankedIdentity> ranked;  // ascending distance
  std::optional<std::string> truth;
};

inline double cosine_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimError("cosine_distance: length mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (!(na > 0.0 && nb > 0.0)) throw NormError("cosine_distance: zero-norm vector");
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace detail {

inline void check_identity(const std::string& id) {
  if (id.empty() || id.find_first_of("\t\r\n") != std::string::npos)
    throw ParamError("identity label must be non-empty and free of tabs/newlines");
}

inline std::string base64_encode(std::span<const std::uint8_t> data) {
  ensure_sodium();
  std::string out(sodium_base64_ENCODED_LEN(data.size(), sodium_base64_VARIANT_ORIGINAL), '\0');
  sodium_bin2base64(out.data(), out.size(), data.data(), data.size(), sodium_base64_VARIANT_ORIGINAL);
  out.resize(std::strlen(out.c_str()));
  return out;
}

inline bytes::Buffer base64_decode(const std::string& text) {
  ensure_sodium();
  bytes::Buffer out(text.size() / 4 * 3 + 3);
  std::size_t len = 0;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr, &len, nullptr,
                        sodium_base64_VARIANT_ORIGINAL) != 0)
    throw FormatError("invalid base64 payload");
  out.resize(len);
  return out;
}

inline std::vector<double> to_float32(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(static_cast<float>(v[i]));
  return out;
}

inline void rank(QueryResult& result, std::size_t k) {
  std::stable_sort(result.ranked.begin(), result.ranked.end(),
                   [](const RankedIdentity& a, const RankedIdentity& b) { return a.distance < b.distance; });
  if (result.ranked.size() > k) result.ranked.resize(k);
}

}  // namespace detail

// identity TAB base64(float32 LE P_A) TAB norm TAB fingerprint
inline std::string encode_record(const GalleryRecord& r) {
  detail::check_identity(r.identity);
  bytes::Buffer raw;
  for (double v : r.values) bytes::put_f32(raw, static_cast<float>(v));
  std::ostringstream os;
  os << r.identity << '\t' << detail::base64_encode(raw) << '\t' << std::setprecision(17) << r.norm << '\t'
     << r.params_fingerprint;
  return os.str();
}

inline GalleryRecord decode_record(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (fields.size() != 4) throw FormatError("gallery record: expected 4 tab-separated fields");
  GalleryRecord r;
  r.identity = fields[0];
  detail::check_identity(r.identity);
  const auto raw = detail::base64_decode(fields[1]);
  if (raw.size() % 4 != 0 || raw.empty()) throw FormatError("gallery record: bad vector payload");
  bytes::Reader in(raw);
  r.values.resize(raw.size() / 4);
  for (auto& v : r.values) v = in.get_f32();
  try {
    std::size_t used = 0;
    r.norm = std::stod(fields[2], &used);
    if (used != fields[2].size()) throw FormatError("gallery record: bad norm");
  } catch (const std::logic_error&) {
    throw FormatError("gallery record: bad norm");
  }
  if (!(r.norm > 0.0)) throw FormatError("gallery record: norm must be positive");
  r.params_fingerprint = fields[3];
  if (r.params_fingerprint.empty() ||
      r.params_fingerprint.find_first_not_of("0123456789abcdef") != std::string::npos)
    throw FormatError("gallery record: fingerprint must be lowercase hex");
  return r;
}

// Client-side map identity -> protection parameters.
class ParamsStore {
 public:
  void put(const std::string& identity, const ProtectParams& p) {
    detail::check_identity(identity);
    params_[identity] = p;
  }

  std::optional<ProtectParams> get(const std::string& identity) const {
    const auto it = params_.find(identity);
    if (it == params_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<std::string> identities() const {
    std::vector<std::string> out;
    for (const auto& [id, p] : params_) out.push_back(id);
    return out;
  }

  // identity TAB params-record, one per line
  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& [id, p] : params_) out << id << '\t' << p.to_record() << '\n';
    if (!out) throw IoError("write failed: " + path);
  }

  static ParamsStore load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    ParamsStore store;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw FormatError("params store: missing tab");
      store.put(line.substr(0, tab), parse_params_record(line.substr(tab + 1)));
    }
    return store;
  }

 private:
  std::map<std::string, ProtectParams> params_;
};

using ParamsProvider = std::function<std::optional<ProtectParams>(const std::string&)>;

inline ParamsProvider provider_for(const ParamsStore& store) {
  return [&store](const std::string& id) { return store.get(id); };
}

// One record per identity, kept in ascending identity order. When attached to
// a store file every enrolment is appended to it. Readers share the lock;
// enrolment is exclusive.
class Gallery {
 public:
  Gallery() = default;

  static Gallery open(const std::string& path) {
    Gallery g;
    g.path_ = path;
    std::ifstream in(path);
    if (!in) return g;  // new store
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      GalleryRecord r = decode_record(line);
      if (g.records_.contains(r.identity)) throw DuplicateIdentity("store lists '" + r.identity + "' twice");
      g.records_.emplace(r.identity, std::move(r));
    }
    return g;
  }

  Gallery(Gallery&& other) noexcept : records_(std::move(other.records_)), path_(std::move(other.path_)) {}

  // Protects V under gen_params(identity_seed, overlap); raw V is not kept.
  GalleryRecord enroll(const std::string& identity, std::span<const double> v, std::uint64_t identity_seed,
                       std::size_t overlap) {
    return enroll(identity, v, gen_params(identity_seed, overlap));
  }

  GalleryRecord enroll(const std::string& identity, std::span<const double> v, const ProtectParams& params) {
    detail::check_identity(identity);
    const ProtectedEmbedding p = protect(v, params);
    GalleryRecord r{identity, detail::to_float32(p.values), p.params_fingerprint, 0.0};
    r.norm = smpc::l2_norm(r.values);
    if (!(r.norm > 0.0)) throw NormError("protected embedding has zero norm");
    std::unique_lock lock(mutex_);
    if (records_.contains(identity)) throw DuplicateIdentity("identity already enrolled: " + identity);
    if (path_) {
      std::ofstream out(*path_, std::ios::app);
      if (!out) throw IoError("cannot append to " + *path_);
      out << encode_record(r) << '\n';
      if (!out) throw IoError("append failed: " + *path_);
    }
    records_.emplace(identity, r);
    return r;
  }

  std::vector<GalleryRecord> records() const {
    std::shared_lock lock(mutex_);
    std::vector<GalleryRecord> out;
    for (const auto& [id, r] : records_) out.push_back(r);
    return out;
  }

  std::optional<GalleryRecord> find(const std::string& identity) const {
    std::shared_lock lock(mutex_);
    const auto it = records_.find(identity);
    if (it == records_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return records_.size();
  }

  void save(const std::string& path) const {
    std::shared_lock lock(mutex_);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& [id, r] : records_) out << encode_record(r) << '\n';
    if (!out) throw IoError("write failed: " + path);
  }

  std::vector<smpc::EnrolledShare> enrolled_shares(unsigned scale_bits = smpc::kDefaultScaleBits) const {
    std::vector<smpc::EnrolledShare> out;
    for (const auto& r : records()) out.push_back(smpc::make_enrolled_share(r.identity, r.values, scale_bits));
    return out;
  }

 private:
  std::map<std::string, GalleryRecord> records_;
  std::optional<std::string> path_;
  mutable std::shared_mutex mutex_;
};

// Per-candidate protected queries in gallery order.
inline std::vector<smpc::Candidate> protected_candidates(std::span<const double> query,
                                                         std::span<const std::string> identities,
                                                         const ParamsProvider& params) {
  std::vector<smpc::Candidate> out;
  for (const auto& id : identities) {
    const auto p = params(id);
    if (!p) throw UnknownIdentityParams("no protection parameters for '" + id + "'");
    out.push_back({id, protect(query, *p).values, std::nullopt});
  }
  return out;
}

inline QueryResult query_1n(std::span<const double> query, const Gallery& gallery, const ParamsProvider& params,
                            std::size_t k, std::optional<std::string> truth = std::nullopt) {
  if (k == 0) throw ParamError("query_1n: k must be >= 1");
  const auto records = gallery.records();
  if (records.empty()) throw EmptyGallery("query_1n: gallery is empty");
  QueryResult result{{}, std::move(truth)};
  for (const auto& r : records) {
    const auto p = params(r.identity);
    if (!p) throw UnknownIdentityParams("no protection parameters for '" + r.identity + "'");
    result.ranked.push_back({r.identity, cosine_distance(protect(query, *p).values, r.values)});
  }
  detail::rank(result, k);
  return result;
}

// Same ranking computed through the secret-shared protocol, in process.
inline QueryResult query_1n_secure(std::span<const double> query, const Gallery& gallery,
                                   const ParamsProvider& params, std::size_t k, std::uint64_t dealer_seed,
                                   std::optional<std::string> truth = std::nullopt, bool use_tcp = false) {
  if (k == 0) throw ParamError("query_1n: k must be >= 1");
  if (gallery.size() == 0) throw EmptyGallery("query_1n: gallery is empty");
  std::vector<std::string> ids;
  for (const auto& r : gallery.records()) ids.push_back(r.identity);
  const auto candidates = protected_candidates(query, ids, params);
  QueryResult result{{}, std::move(truth)};
  for (const auto& m : smpc::verify_session(candidates, gallery.enrolled_shares(), dealer_seed, use_tcp))
    result.ranked.push_back({m.identity, m.distance});
  detail::rank(result, k);
  return result;
}

// Client side against a remote server; `identities` must match the server's
// gallery order.
inline QueryResult query_1n_remote(std::span<const double> query, std::span<const std::string> identities,
                                   const ParamsProvider& params, std::size_t k, smpc::Channel& channel,
                                   smpc::SmpcClient& client, std::optional<std::string> truth = std::nullopt) {
  if (k == 0) throw ParamError("query_1n: k must be >= 1");
  if (identities.empty()) throw EmptyGallery("query_1n: no candidate identities");
  const auto candidates = protected_candidates(query, identities, params);
  QueryResult result{{}, std::move(truth)};
  for (const auto& m : client.verify(channel, candidates)) result.ranked.push_back({m.identity, m.distance});
  detail::rank(result, k);
  return result;
}

inline double retrieval_rate(std::span<const QueryResult> results, std::size_t k) {
  if (k == 0) throw ParamError("retrieval_rate: k must be >= 1");
  if (results.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& r : results) {
    if (!r.truth) throw MissingTruth("retrieval_rate: query without truth label");
    const std::size_t depth = std::min(k, r.ranked.size());
    for (std::size_t i = 0; i < depth; ++i)
      if (r.ranked[i].identity == *r.truth) {
        ++hits;
        break;
      }
  }
  return double(hits) / double(results.size());
}

}  // namespace hfcf
