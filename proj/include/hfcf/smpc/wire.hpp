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

// Frame codec for the secure distance protocol.
//
//   frame = "HFC1" | msg_type u8 | session_id u64 | payload_len u32 | payload
//
// All integers are little-endian.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hfcf/bytes.hpp"
#include "hfcf/error.hpp"
#include "hfcf/smpc/fixed_point.hpp"

namespace hfcf::smpc {

enum class MsgType : std::uint8_t {
  Hello = 0x01,
  TripleId = 0x02,
  OpenD = 0x03,
  OpenE = 0x04,
  ResultShare = 0x05,
  Error = 0x06,
  Bye = 0x07,
};

inline constexpr std::string_view kFrameMagic = "HFC1";
inline constexpr std::size_t kFrameHeaderSize = 4 + 1 + 8 + 4;
inline constexpr std::uint32_t kMaxPayload = 1u << 26;
inline constexpr std::uint16_t kProtocolVersion = 1;

inline bool is_known_type(std::uint8_t t) { return t >= 0x01 && t <= 0x07; }

inline const char* to_string(MsgType t) {
  switch (t) {
    case MsgType::Hello: return "HELLO";
    case MsgType::TripleId: return "TRIPLE_ID";
    case MsgType::OpenD: return "OPEN_D";
    case MsgType::OpenE: return "OPEN_E";
    case MsgType::ResultShare: return "RESULT_SHARE";
    case MsgType::Error: return "ERROR";
    case MsgType::Bye: return "BYE";
  }
  return "UNKNOWN";
}

struct Frame {
  std::uint8_t type = 0;  // raw, so unknown types survive decoding
  std::uint64_t session_id = 0;
  bytes::Buffer payload;

  MsgType msg_type() const { return static_cast<MsgType>(type); }
  bool is(MsgType t) const { return type == static_cast<std::uint8_t>(t); }
  friend bool operator==(const Frame&, const Frame&) = default;
};

inline bytes::Buffer encode_frame(const Frame& f) {
  if (f.payload.size() > kMaxPayload) throw ProtocolError("frame payload too large");
  bytes::Buffer out(kFrameMagic.begin(), kFrameMagic.end());
  out.reserve(kFrameHeaderSize + f.payload.size());
  out.push_back(f.type);
  bytes::put_le(out, f.session_id);
  bytes::put_le(out, static_cast<std::uint32_t>(f.payload.size()));
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  return out;
}

struct FrameHeader {
  std::uint8_t type = 0;
  std::uint64_t session_id = 0;
  std::uint32_t payload_len = 0;
};

inline FrameHeader decode_header(std::span<const std::uint8_t> header) {
  if (header.size() != kFrameHeaderSize || !bytes::starts_with(header, kFrameMagic))
    throw ProtocolError("frame: bad magic");
  bytes::Reader in(header.subspan(4));
  FrameHeader h;
  h.type = in.get_le<std::uint8_t>();
  h.session_id = in.get_le<std::uint64_t>();
  h.payload_len = in.get_le<std::uint32_t>();
  if (h.payload_len > kMaxPayload) throw ProtocolError("frame: payload length exceeds limit");
  return h;
}

inline Frame decode_frame(std::span<const std::uint8_t> data) {
  if (data.size() < kFrameHeaderSize) throw ProtocolError("frame: truncated header");
  const FrameHeader h = decode_header(data.first(kFrameHeaderSize));
  if (data.size() != kFrameHeaderSize + h.payload_len) throw ProtocolError("frame: payload length mismatch");
  const auto body = data.subspan(kFrameHeaderSize);
  return {h.type, h.session_id, bytes::Buffer(body.begin(), body.end())};
}

// ---------------------------------------------------------------------------
// Typed payloads.

inline Frame make_hello(std::uint64_t session, std::uint16_t version = kProtocolVersion) {
  Frame f{static_cast<std::uint8_t>(MsgType::Hello), session, {}};
  bytes::put_le(f.payload, version);
  return f;
}

inline Frame make_triple_id(std::uint64_t session, std::uint64_t id) {
  Frame f{static_cast<std::uint8_t>(MsgType::TripleId), session, {}};
  bytes::put_le(f.payload, id);
  return f;
}

inline Frame make_words(MsgType type, std::uint64_t session, std::span<const Word> words) {
  Frame f{static_cast<std::uint8_t>(type), session, {}};
  f.payload.reserve(8 * words.size());
  for (Word w : words) bytes::put_le(f.payload, w);
  return f;
}

inline Frame make_result_share(std::uint64_t session, Word share, double norm) {
  Frame f{static_cast<std::uint8_t>(MsgType::ResultShare), session, {}};
  bytes::put_le(f.payload, share);
  bytes::put_f64(f.payload, norm);
  return f;
}

inline Frame make_error(std::uint64_t session, std::string_view reason) {
  return {static_cast<std::uint8_t>(MsgType::Error), session, bytes::Buffer(reason.begin(), reason.end())};
}

inline Frame make_bye(std::uint64_t session) { return {static_cast<std::uint8_t>(MsgType::Bye), session, {}}; }

namespace detail {
inline void expect_type(const Frame& f, MsgType t) {
  if (!f.is(t))
    throw ProtocolError(std::string("expected ") + to_string(t) + " frame, got " +
                        (is_known_type(f.type) ? to_string(f.msg_type()) : "unknown type"));
}
}  // namespace detail

inline std::uint16_t parse_hello(const Frame& f) {
  detail::expect_type(f, MsgType::Hello);
  if (f.payload.size() != 2) throw ProtocolError("HELLO: bad payload length");
  return bytes::Reader(f.payload).get_le<std::uint16_t>();
}

inline std::uint64_t parse_triple_id(const Frame& f) {
  detail::expect_type(f, MsgType::TripleId);
  if (f.payload.size() != 8) throw ProtocolError("TRIPLE_ID: bad payload length");
  return bytes::Reader(f.payload).get_le<std::uint64_t>();
}

inline std::vector<Word> parse_words(const Frame& f, MsgType type, std::size_t expected) {
  detail::expect_type(f, type);
  if (f.payload.size() != 8 * expected) throw ProtocolError(std::string(to_string(type)) + ": bad vector length");
  bytes::Reader in(f.payload);
  std::vector<Word> out(expected);
  for (auto& w : out) w = in.get_le<std::uint64_t>();
  return out;
}

struct ResultShare {
  Word share = 0;
  double norm = 0.0;
};

inline ResultShare parse_result_share(const Frame& f) {
  detail::expect_type(f, MsgType::ResultShare);
  if (f.payload.size() != 16) throw ProtocolError("RESULT_SHARE: bad payload length");
  bytes::Reader in(f.payload);
  ResultShare r;
  r.share = in.get_le<std::uint64_t>();
  r.norm = in.get_f64();
  return r;
}

inline std::string parse_error(const Frame& f) {
  detail::expect_type(f, MsgType::Error);
  return std::string(f.payload.begin(), f.payload.end());
}

}  // namespace hfcf::smpc
