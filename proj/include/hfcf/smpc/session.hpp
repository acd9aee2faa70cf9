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

// Secret-shared cosine distance between a client's protected query and the
// server's enrolled templates.
//
// Per enrolled entry the client contributes x = P_a and the server y = P_A,
// each held as its own additive share (the other party's share is zero, or
// a complement split off at enrolment). One Beaver triple per entry yields
// shares of <P_a, P_A>; the server returns its share [Y]2 with ||P_A|| and
// only the client reconstructs the dot product.
//
// Message flow, one session:
//   C->S HELLO            S->C HELLO
//   per entry:
//   C->S TRIPLE_ID, OPEN_D(d1), OPEN_E(e1)
//   S->C OPEN_D(d2), OPEN_E(e2), RESULT_SHARE([Y]2, ||P_A||)
//   C->S BYE              S->C BYE
//
// Entries are visited in the server's store order; the client's candidate
// list must follow the same order (ascending identity label for a gallery).

#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hfcf/error.hpp"
#include "hfcf/random.hpp"
#include "hfcf/smpc/fixed_point.hpp"
#include "hfcf/smpc/sharing.hpp"
#include "hfcf/smpc/transport.hpp"
#include "hfcf/smpc/wire.hpp"

namespace hfcf::smpc {

inline double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

struct EnrolledShare {
  std::string identity;
  ShareVector share;  // server-side share of encode(P_A)
  double norm = 0.0;  // ||P_A||, public to the client
};

// Server holds the whole encoding; the client's complement is zero.
inline EnrolledShare make_enrolled_share(std::string identity, std::span<const double> protected_values,
                                         unsigned scale_bits = kDefaultScaleBits) {
  const double norm = l2_norm(protected_values);
  if (!(norm > 0.0)) throw NormError("enrolled embedding has zero norm");
  auto encoded = encode_fixed(protected_values, scale_bits);
  return {std::move(identity), ShareVector{Party::Server, std::move(encoded.words), 0}, norm};
}

// Genuine two-way split: returns the client complement and the server entry.
template <typename Rng>
std::pair<ShareVector, EnrolledShare> split_enrolled_share(std::string identity,
                                                           std::span<const double> protected_values, Rng& rng,
                                                           unsigned scale_bits = kDefaultScaleBits) {
  EnrolledShare entry = make_enrolled_share(std::move(identity), protected_values, scale_bits);
  auto [client, server] = share(FixedVec{entry.share.words, scale_bits}, rng);
  entry.share = std::move(server);
  return {std::move(client), std::move(entry)};
}

struct Candidate {
  std::string identity;
  std::vector<double> query;             // P_a protected for this candidate
  std::optional<ShareVector> complement;  // client share of P_A, if split
};

struct Match {
  std::string identity;
  double cosine = 0.0;
  double distance = 0.0;
};

namespace detail {
[[noreturn]] inline void fail(Channel& ch, std::uint64_t session, const std::string& reason) {
  try {
    ch.send(make_error(session, reason));
  } catch (const Error&) {
  }
  throw ProtocolError(reason);
}

// Turns a peer ERROR frame into a ProtocolError.
inline Frame recv_checked(Channel& ch, std::uint64_t session) {
  Frame f = ch.recv();
  if (f.is(MsgType::Error)) throw ProtocolError("peer reported: " + parse_error(f));
  if (f.session_id != session) throw ProtocolError("frame carries a foreign session id");
  return f;
}
}  // namespace detail

class SmpcServer {
 public:
  SmpcServer(std::vector<EnrolledShare> entries, TripleStore& triples)
      : entries_(std::move(entries)), triples_(triples) {
    for (const auto& e : entries_)
      if (!(e.norm > 0.0)) throw NormError("enrolled entry '" + e.identity + "' has zero norm");
  }

  // Runs one session to completion; returns the number of entries compared.
  // Protocol violations are answered with an ERROR frame and rethrown.
  std::size_t serve(Channel& ch) {
    Frame hello = ch.recv();
    const std::uint64_t session = hello.session_id;
    if (!hello.is(MsgType::Hello)) detail::fail(ch, session, "expected HELLO");
    if (parse_hello(hello) != kProtocolVersion) detail::fail(ch, session, "unsupported protocol version");
    ch.send(make_hello(session));

    std::size_t next = 0;
    for (;;) {
      Frame f = ch.recv();
      if (f.session_id != session) detail::fail(ch, session, "frame carries a foreign session id");
      if (!is_known_type(f.type)) {
        detail::fail(ch, session, "unknown message type " + std::to_string(f.type));
      }
      if (f.is(MsgType::Bye)) {
        ch.send(make_bye(session));
        return next;
      }
      if (f.is(MsgType::Error)) throw ProtocolError("peer reported: " + parse_error(f));
      if (!f.is(MsgType::TripleId)) detail::fail(ch, session, std::string(to_string(f.msg_type())) + " out of order");
      compare_entry(ch, session, parse_triple_id(f), next);
      ++next;
    }
  }

  const std::vector<EnrolledShare>& entries() const { return entries_; }

 private:
  void compare_entry(Channel& ch, std::uint64_t session, std::uint64_t triple_id, std::size_t index) {
    if (index >= entries_.size()) detail::fail(ch, session, "no enrolled entries left");
    const BeaverTripleShare* triple = nullptr;
    try {
      triple = &triples_.consume(triple_id);
    } catch (const ProtocolError& e) {
      detail::fail(ch, session, e.what());
    }
    const EnrolledShare& entry = entries_[index];
    const std::size_t n = entry.share.words.size();
    if (triple->dim() != n) detail::fail(ch, session, "triple dimension does not match enrolled entry");

    std::vector<Word> d1, e1;
    try {
      d1 = parse_words(ch.recv(), MsgType::OpenD, n);
      e1 = parse_words(ch.recv(), MsgType::OpenE, n);
    } catch (const ProtocolError& e) {
      detail::fail(ch, session, e.what());
    }
    const std::vector<Word> zero(n, 0);
    const auto d2 = masked_difference(zero, triple->a);
    const auto e2 = masked_difference(entry.share.words, triple->b);
    ch.send(make_words(MsgType::OpenD, session, d2));
    ch.send(make_words(MsgType::OpenE, session, e2));
    const auto d = reconstruct(d1, d2), e = reconstruct(e1, e2);
    ch.send(make_result_share(session, beaver_result_share(Party::Server, *triple, d, e), entry.norm));
  }

  std::vector<EnrolledShare> entries_;
  TripleStore& triples_;
};

class SmpcClient {
 public:
  SmpcClient(TripleStore& triples, RingRng rng, unsigned scale_bits = kDefaultScaleBits)
      : triples_(triples), rng_(std::move(rng)), scale_bits_(scale_bits) {}

  std::vector<Match> verify(Channel& ch, std::span<const Candidate> candidates) {
    const std::uint64_t session = rng_();
    ch.send(make_hello(session));
    if (parse_hello(detail::recv_checked(ch, session)) != kProtocolVersion)
      throw ProtocolError("server speaks another protocol version");

    std::vector<Match> out;
    out.reserve(candidates.size());
    for (const auto& cand : candidates) out.push_back(compare(ch, session, cand));
    ch.send(make_bye(session));
    const Frame bye = detail::recv_checked(ch, session);
    if (!bye.is(MsgType::Bye)) throw ProtocolError("expected BYE");
    return out;
  }

  // Forces a specific triple id, used to exercise reuse detection.
  void pin_next_triple(std::uint64_t id) { pinned_ = id; }

 private:
  Match compare(Channel& ch, std::uint64_t session, const Candidate& cand) {
    const std::size_t n = cand.query.size();
    const double query_norm = l2_norm(cand.query);
    if (!(query_norm > 0.0)) throw NormError("query embedding has zero norm");
    const std::vector<Word> x1 = encode_fixed(cand.query, scale_bits_).words;
    std::vector<Word> y1(n, 0);
    if (cand.complement) {
      if (cand.complement->words.size() != n) throw ProtocolError("complement share length mismatch");
      y1 = cand.complement->words;
    }
    std::uint64_t id;
    const BeaverTripleShare* triple;
    if (pinned_) {
      id = *pinned_;
      pinned_.reset();
      triple = &find(id);
    } else {
      triple = &triples_.take_next();
      id = triple->id;
    }
    if (triple->dim() != n) throw ProtocolError("triple dimension does not match query");

    const auto d1 = masked_difference(x1, triple->a);
    const auto e1 = masked_difference(y1, triple->b);
    ch.send(make_triple_id(session, id));
    ch.send(make_words(MsgType::OpenD, session, d1));
    ch.send(make_words(MsgType::OpenE, session, e1));
    const auto d2 = parse_words(detail::recv_checked(ch, session), MsgType::OpenD, n);
    const auto e2 = parse_words(detail::recv_checked(ch, session), MsgType::OpenE, n);
    const ResultShare result = parse_result_share(detail::recv_checked(ch, session));
    if (!(result.norm > 0.0) || !std::isfinite(result.norm)) throw NormError("server sent a non-positive norm");

    const auto d = reconstruct(d1, d2), e = reconstruct(e1, e2);
    const Word z1 = beaver_result_share(Party::Client, *triple, d, e);
    const double dot = reconstruct_product(z1, result.share, scale_bits_);
    const double cosine = dot / (query_norm * result.norm);
    return {cand.identity, cosine, 1.0 - cosine};
  }

  const BeaverTripleShare& find(std::uint64_t id) const {
    for (const auto& t : triples_.triples())
      if (t.id == id) return t;
    throw ProtocolError("unknown Beaver triple " + std::to_string(id));
  }

  TripleStore& triples_;
  RingRng rng_;
  unsigned scale_bits_;
  std::optional<std::uint64_t> pinned_;
};

// Runs client and server in-process, the server on its own thread over a
// memory pipe or TCP loopback, with fresh dealer triples.
inline std::vector<Match> verify_session(std::span<const Candidate> candidates, std::vector<EnrolledShare> gallery,
                                         std::uint64_t dealer_seed, bool use_tcp = false,
                                         unsigned scale_bits = kDefaultScaleBits) {
  if (candidates.empty()) return {};
  const std::size_t dim = candidates.front().query.size();
  auto dealt = dealer_make_triples(candidates.size(), dim, dealer_seed);
  TripleStore client_triples(std::move(dealt.client)), server_triples(std::move(dealt.server));
  SmpcServer server(std::move(gallery), server_triples);
  SmpcClient client(client_triples, RingRng::secure(), scale_bits);

  std::exception_ptr server_error;
  auto run_server = [&](Channel ch) {
    try {
      server.serve(ch);
    } catch (...) {
      server_error = std::current_exception();
    }
  };
  std::vector<Match> result;
  if (use_tcp) {
    TcpListener listener(Endpoint{"127.0.0.1", 0});
    std::thread worker([&] { run_server(listener.accept()); });
    try {
      Channel ch = tcp_connect(Endpoint{"127.0.0.1", listener.port()});
      result = client.verify(ch, candidates);
    } catch (...) {
      worker.join();
      throw;
    }
    worker.join();
  } else {
    auto [client_end, server_end] = memory_channel_pair();
    std::thread worker(run_server, std::move(server_end));
    try {
      result = client.verify(client_end, candidates);
    } catch (...) {
      client_end.close();
      worker.join();
      throw;
    }
    worker.join();
  }
  if (server_error) std::rethrow_exception(server_error);
  return result;
}

}  // namespace hfcf::smpc
