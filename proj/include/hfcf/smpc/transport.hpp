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

// Byte-stream transports (in-memory pipe, TCP) and the framed channel used by
// protocol sessions.

#pragma once

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hfcf/error.hpp"
#include "hfcf/smpc/wire.hpp"

namespace hfcf::smpc {

class ByteStream {
 public:
  virtual ~ByteStream() = default;
  virtual void write(std::span<const std::uint8_t> data) = 0;
  // Fills `out` completely or throws TransportError.
  virtual void read_exact(std::span<std::uint8_t> out) = 0;
  virtual void close() = 0;
};

namespace detail {

struct Pipe {
  std::mutex mutex;
  std::condition_variable ready;
  std::deque<std::uint8_t> data;
  bool closed = false;
};

class MemoryStream final : public ByteStream {
 public:
  MemoryStream(std::shared_ptr<Pipe> in, std::shared_ptr<Pipe> out) : in_(std::move(in)), out_(std::move(out)) {}
  ~MemoryStream() override { close(); }

  void write(std::span<const std::uint8_t> data) override {
    std::lock_guard lock(out_->mutex);
    if (out_->closed) throw TransportError("memory stream: write after close");
    out_->data.insert(out_->data.end(), data.begin(), data.end());
    out_->ready.notify_all();
  }

  void read_exact(std::span<std::uint8_t> out) override {
    std::unique_lock lock(in_->mutex);
    in_->ready.wait(lock, [&] { return in_->data.size() >= out.size() || in_->closed; });
    if (in_->data.size() < out.size()) throw TransportError("memory stream: peer closed");
    std::copy_n(in_->data.begin(), out.size(), out.begin());
    in_->data.erase(in_->data.begin(), in_->data.begin() + static_cast<std::ptrdiff_t>(out.size()));
  }

  void close() override {
    for (auto* p : {in_.get(), out_.get()}) {
      std::lock_guard lock(p->mutex);
      p->closed = true;
      p->ready.notify_all();
    }
  }

 private:
  std::shared_ptr<Pipe> in_, out_;
};

class SocketStream final : public ByteStream {
 public:
  explicit SocketStream(int fd) : fd_(fd) {
    const int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  ~SocketStream() override { close(); }
  SocketStream(const SocketStream&) = delete;
  SocketStream& operator=(const SocketStream&) = delete;

  void write(std::span<const std::uint8_t> data) override {
    std::size_t sent = 0;
    while (sent < data.size()) {
      const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("send: ") + std::strerror(errno));
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  void read_exact(std::span<std::uint8_t> out) override {
    std::size_t got = 0;
    while (got < out.size()) {
      const ssize_t n = ::recv(fd_, out.data() + got, out.size() - got, 0);
      if (n == 0) throw TransportError("recv: peer closed connection");
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("recv: ") + std::strerror(errno));
      }
      got += static_cast<std::size_t>(n);
    }
  }

  void close() override {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_;
};

}  // namespace detail

// Frame-level view of a byte stream. Optionally keeps a transcript of every
// encoded frame it sends and receives.
class Channel {
 public:
  explicit Channel(std::unique_ptr<ByteStream> stream) : stream_(std::move(stream)) {}

  void send(const Frame& f) {
    const auto encoded = encode_frame(f);
    stream_->write(encoded);
    if (recording_) sent_.push_back(encoded);
  }

  Frame recv() {
    std::vector<std::uint8_t> header(kFrameHeaderSize);
    stream_->read_exact(header);
    const FrameHeader h = decode_header(header);
    Frame f{h.type, h.session_id, bytes::Buffer(h.payload_len)};
    if (h.payload_len > 0) stream_->read_exact(f.payload);
    if (recording_) received_.push_back(encode_frame(f));
    return f;
  }

  void close() { stream_->close(); }

  void set_recording(bool on) { recording_ = on; }
  const std::vector<bytes::Buffer>& sent_transcript() const { return sent_; }
  const std::vector<bytes::Buffer>& received_transcript() const { return received_; }

 private:
  std::unique_ptr<ByteStream> stream_;
  bool recording_ = false;
  std::vector<bytes::Buffer> sent_, received_;
};

inline std::pair<Channel, Channel> memory_channel_pair() {
  auto ab = std::make_shared<detail::Pipe>(), ba = std::make_shared<detail::Pipe>();
  return {Channel(std::make_unique<detail::MemoryStream>(ba, ab)),
          Channel(std::make_unique<detail::MemoryStream>(ab, ba))};
}

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

// "host:port"
inline Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon + 1 == text.size()) throw ParamError("endpoint must be host:port");
  Endpoint ep;
  ep.host = text.substr(0, colon);
  try {
    const unsigned long port = std::stoul(text.substr(colon + 1));
    if (port > 65535) throw ParamError("port out of range");
    ep.port = static_cast<std::uint16_t>(port);
  } catch (const std::logic_error&) {
    throw ParamError("malformed port in " + text);
  }
  return ep;
}

namespace detail {
struct AddrInfo {
  addrinfo* head = nullptr;
  ~AddrInfo() {
    if (head) ::freeaddrinfo(head);
  }
};

inline AddrInfo resolve(const Endpoint& ep, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  AddrInfo info;
  const std::string port = std::to_string(ep.port);
  const int rc = ::getaddrinfo(ep.host.empty() ? nullptr : ep.host.c_str(), port.c_str(), &hints, &info.head);
  if (rc != 0) throw TransportError(std::string("getaddrinfo: ") + ::gai_strerror(rc));
  return info;
}
}  // namespace detail

class TcpListener {
 public:
  explicit TcpListener(const Endpoint& ep) {
    const auto info = detail::resolve(ep, true);
    for (addrinfo* ai = info.head; ai; ai = ai->ai_next) {
      const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd < 0) continue;
      const int one = 1;
      ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
      if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 16) == 0) {
        fd_ = fd;
        break;
      }
      ::close(fd);
    }
    if (fd_ < 0) throw TransportError("cannot listen on " + ep.host + ":" + std::to_string(ep.port));
  }
  ~TcpListener() {
    if (fd_ >= 0) ::close(fd_);
  }
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const {
    sockaddr_storage addr{};
    socklen_t len = sizeof addr;
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0) throw TransportError("getsockname failed");
    if (addr.ss_family == AF_INET) return ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
    return ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
  }

  Channel accept() {
    for (;;) {
      const int fd = ::accept(fd_, nullptr, nullptr);
      if (fd >= 0) return Channel(std::make_unique<detail::SocketStream>(fd));
      if (errno != EINTR) throw TransportError(std::string("accept: ") + std::strerror(errno));
    }
  }

 private:
  int fd_ = -1;
};

inline Channel tcp_connect(const Endpoint& ep) {
  const auto info = detail::resolve(ep, false);
  for (addrinfo* ai = info.head; ai; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) return Channel(std::make_unique<detail::SocketStream>(fd));
    ::close(fd);
  }
  throw TransportError("cannot connect to " + ep.host + ":" + std::to_string(ep.port));
}

}  // namespace hfcf::smpc
