#include "evstream/client.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "evstream/clock.hpp"

namespace evstream {

namespace {
constexpr size_t kReadChunk = 256 * 1024;
}

Result<std::unique_ptr<Client>> Client::connect(const std::string& host, uint16_t port,
                                                int timeout_ms) {
  int fd = socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) return Status::ConnectionLost;

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    close(fd);
    return Status::ConnectionLost;
  }

  timeval tv{timeout_ms / 1000, (timeout_ms % 1000) * 1000};
  setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    close(fd);
    return Status::ConnectionLost;
  }
  int one = 1;
  setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));

  auto client = std::unique_ptr<Client>(new Client());
  client->fd_ = fd;
  return client;
}

Client::~Client() {
  if (fd_ >= 0) close(fd_);
}

Result<void> Client::send_raw(wire::ByteView bytes) {
  size_t off = 0;
  while (off < bytes.size()) {
    ssize_t n = send(fd_, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      return Status::ConnectionLost;
    }
    off += static_cast<size_t>(n);
  }
  return {};
}

Result<void> Client::send_frame(wire::FrameType type, wire::ByteView body) {
  auto frame = wire::encode_frame(type, body);
  if (!frame.ok()) return frame.status();
  return send_raw(frame.value());
}

Result<Client::PollResult> Client::poll_frame(int timeout_ms) {
  for (;;) {
    auto res = wire::decode_frame(wire::ByteView(buf_.data() + off_, buf_.size() - off_));
    if (std::holds_alternative<wire::DecodedFrame>(res)) {
      auto& f = std::get<wire::DecodedFrame>(res);
      PollResult out;
      out.has_frame = true;
      out.frame.type = f.type;
      out.frame.body.assign(f.body.begin(), f.body.end());
      off_ += f.consumed;
      if (off_ == buf_.size()) {
        buf_.clear();
        off_ = 0;
      } else if (off_ > kReadChunk) {
        buf_.erase(buf_.begin(), buf_.begin() + static_cast<ptrdiff_t>(off_));
        off_ = 0;
      }
      return out;
    }
    if (std::holds_alternative<Status>(res)) return std::get<Status>(res);

    pollfd pfd{fd_, POLLIN, 0};
    int pr = ::poll(&pfd, 1, timeout_ms);
    if (pr == 0) return PollResult{};  // timeout, no frame
    if (pr < 0) {
      if (errno == EINTR) continue;
      return Status::ConnectionLost;
    }
    size_t old = buf_.size();
    buf_.resize(old + kReadChunk);
    ssize_t n = recv(fd_, buf_.data() + old, kReadChunk, 0);
    if (n <= 0) {
      buf_.resize(old);
      if (n < 0 && (errno == EAGAIN || errno == EINTR)) continue;
      return Status::ConnectionLost;
    }
    buf_.resize(old + static_cast<size_t>(n));
    last_read_ts_ns_ = monotonic_ns();
  }
}

Result<Client::OwnedFrame> Client::request(wire::FrameType type, wire::ByteView body,
                                           int timeout_ms) {
  if (auto s = send_frame(type, body); !s.ok()) return s.status();
  for (;;) {
    auto polled = poll_frame(timeout_ms);
    if (!polled.ok()) return polled.status();
    if (!polled.value().has_frame) return Status::ConnectionLost;  // reply timeout
    auto& frame = polled.value().frame;
    if (frame.type == static_cast<uint8_t>(wire::FrameType::Reply)) return std::move(frame);
    pending_events.push_back(std::move(frame));
  }
}

}  // namespace evstream
