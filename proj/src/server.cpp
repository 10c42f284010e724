#include "evstream/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/epoll.h>
#include <sys/eventfd.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <unordered_map>
#include <vector>

#include "evstream/clock.hpp"
#include "evstream/module_host.hpp"
#include "evstream/store.hpp"
#include "evstream/wire.hpp"

namespace evstream {

namespace {

constexpr size_t kReadChunk = 64 * 1024;
// Stop copying hub events into a connection's output once this much is
// already pending; backpressure then accumulates in the hub queue, whose
// bound implements the overflow policy.
constexpr size_t kOutSoftBytes = 4 * 1024 * 1024;
constexpr uint64_t kDrainDeadlineNs = 2'000'000'000ull;

void set_nodelay(int fd) {
  int one = 1;
  setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

struct Conn {
  int fd = -1;
  std::vector<uint8_t> in;
  size_t in_off = 0;
  std::vector<uint8_t> out;
  size_t out_off = 0;
  SubscriberId sub_id = 0;  // 0 until the first SUB
  bool close_after_flush = false;
  bool epollout = false;

  size_t out_pending() const { return out.size() - out_off; }
};

}  // namespace

struct Server::Impl {
  ServerConfig config;
  int listen_fd = -1;
  int epoll_fd = -1;
  int wake_fd = -1;
  uint16_t bound_port = 0;
  std::thread loop_thread;
  std::atomic<bool> stopping{false};
  std::atomic<bool> stopped{false};

  Store store;
  Hub hub{Hub::kDefaultQueueEvents};
  std::unique_ptr<ModuleHost> module_host;
  std::unordered_map<int, Conn> conns;

  std::atomic<uint64_t> footprint_mirror{0};
  std::atomic<uint64_t> commands{0};

  Impl(const ServerConfig& cfg) : config(cfg), hub(cfg.max_queue_events) {
    module_host = std::make_unique<ModuleHost>(
        [this](std::string_view channel, std::string_view payload) {
          return hub.publish(channel, payload);
        });
    store.set_hook([this](OpKind op, std::string_view key, std::string_view value) {
      module_host->dispatch(op, key, value);
    });
  }

  ~Impl() {
    if (listen_fd >= 0) close(listen_fd);
    if (epoll_fd >= 0) close(epoll_fd);
    if (wake_fd >= 0) close(wake_fd);
  }

  Result<void> bind_and_listen() {
    listen_fd = socket(AF_INET, SOCK_STREAM | SOCK_NONBLOCK, 0);
    if (listen_fd < 0) return Status::BindFailure;
    int one = 1;
    setsockopt(listen_fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(config.port);
    if (inet_pton(AF_INET, config.host.c_str(), &addr.sin_addr) != 1) return Status::BindFailure;
    if (bind(listen_fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
      return Status::BindFailure;
    if (listen(listen_fd, 128) != 0) return Status::BindFailure;

    socklen_t len = sizeof(addr);
    getsockname(listen_fd, reinterpret_cast<sockaddr*>(&addr), &len);
    bound_port = ntohs(addr.sin_port);

    epoll_fd = epoll_create1(0);
    wake_fd = eventfd(0, EFD_NONBLOCK);
    if (epoll_fd < 0 || wake_fd < 0) return Status::BindFailure;

    epoll_event ev{};
    ev.events = EPOLLIN;
    ev.data.fd = listen_fd;
    epoll_ctl(epoll_fd, EPOLL_CTL_ADD, listen_fd, &ev);
    ev.data.fd = wake_fd;
    epoll_ctl(epoll_fd, EPOLL_CTL_ADD, wake_fd, &ev);
    return {};
  }

  void want_epollout(Conn& c, bool enable) {
    if (c.epollout == enable) return;
    c.epollout = enable;
    epoll_event ev{};
    ev.events = EPOLLIN | EPOLLRDHUP | (enable ? EPOLLOUT : 0u);
    ev.data.fd = c.fd;
    epoll_ctl(epoll_fd, EPOLL_CTL_MOD, c.fd, &ev);
  }

  void close_conn(int fd) {
    auto it = conns.find(fd);
    if (it == conns.end()) return;
    if (it->second.sub_id != 0) hub.remove_subscriber(it->second.sub_id);
    epoll_ctl(epoll_fd, EPOLL_CTL_DEL, fd, nullptr);
    close(fd);
    conns.erase(it);
  }

  // Copy pending hub events into the connection's output buffer (up to the
  // soft cap) and emit the overflow notice when the hub dropped it.
  void drain_subscriber(Conn& c) {
    if (c.sub_id == 0 || c.close_after_flush) return;
    EventPtr ev;
    while (c.out_pending() < kOutSoftBytes && hub.pop(c.sub_id, ev)) {
      auto body = wire::encode_evt_body(*ev);
      auto frame = wire::encode_frame(wire::FrameType::Evt, body);
      c.out.insert(c.out.end(), frame.value().begin(), frame.value().end());
    }
    if (hub.overflowed(c.sub_id)) {
      auto body = wire::encode_reply_status(Status::Overflow);
      auto frame = wire::encode_frame(wire::FrameType::Reply, body);
      c.out.insert(c.out.end(), frame.value().begin(), frame.value().end());
      c.close_after_flush = true;
      hub.remove_subscriber(c.sub_id);
      c.sub_id = 0;
    }
  }

  // Returns false if the connection died.
  bool flush(Conn& c) {
    while (c.out_pending() > 0) {
      ssize_t n = send(c.fd, c.out.data() + c.out_off, c.out_pending(), MSG_NOSIGNAL);
      if (n > 0) {
        c.out_off += static_cast<size_t>(n);
        continue;
      }
      if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
        want_epollout(c, true);
        return true;
      }
      return false;
    }
    c.out.clear();
    c.out_off = 0;
    want_epollout(c, false);
    return !c.close_after_flush;
  }

  void append_frame(Conn& c, wire::FrameType type, const wire::Bytes& body) {
    auto frame = wire::encode_frame(type, body);
    c.out.insert(c.out.end(), frame.value().begin(), frame.value().end());
  }

  // Handle one decoded request; returns false when the connection must be
  // closed (protocol violation).
  bool handle_frame(Conn& c, uint8_t type, wire::ByteView body) {
    wire::Bytes reply;
    uint64_t request_bytes = 0;

    switch (static_cast<wire::FrameType>(type)) {
      case wire::FrameType::Set: {
        auto parsed = wire::parse_set_body(body);
        if (!parsed.ok()) return false;
        request_bytes = parsed.value().value.size();
        auto res = store.set(parsed.value().key, parsed.value().value);
        reply = res.ok() ? wire::encode_reply_set(res.value().op, res.value().version)
                         : wire::encode_reply_status(res.status());
        break;
      }
      case wire::FrameType::Get: {
        auto res = store.get(wire::as_string(body));
        if (res.ok()) {
          request_bytes = res.value().size();
          reply = wire::encode_reply_get(res.value());
        } else {
          reply = wire::encode_reply_status(res.status());
        }
        break;
      }
      case wire::FrameType::Del: {
        auto res = store.del(wire::as_string(body));
        reply = res.ok() ? wire::encode_reply_del(res.value())
                         : wire::encode_reply_status(res.status());
        break;
      }
      case wire::FrameType::Sub: {
        if (c.sub_id == 0) c.sub_id = hub.add_subscriber();
        auto res = hub.subscribe(c.sub_id, wire::as_string(body));
        reply = res.ok() ? wire::encode_reply_sub(res.value())
                         : wire::encode_reply_status(res.status());
        break;
      }
      case wire::FrameType::Unsub: {
        if (c.sub_id == 0) {
          reply = wire::encode_reply_status(Status::UnknownSubscription);
        } else {
          auto res = hub.unsubscribe(c.sub_id, wire::as_string(body));
          reply = wire::encode_reply_status(res.status());
        }
        break;
      }
      case wire::FrameType::Pub: {
        auto parsed = wire::parse_pub_body(body);
        if (!parsed.ok()) return false;
        request_bytes = parsed.value().payload.size();
        if (parsed.value().payload.size() > kMaxValueBytes) {
          reply = wire::encode_reply_status(Status::ValueTooLarge);
        } else {
          auto res = hub.publish(parsed.value().channel, parsed.value().payload);
          reply = res.ok()
                      ? wire::encode_reply_pub(res.value().seq, res.value().delivered)
                      : wire::encode_reply_status(res.status());
        }
        break;
      }
      case wire::FrameType::RegCb: {
        auto parsed = wire::parse_regcb_body(body);
        if (!parsed.ok()) return false;
        auto res = module_host->register_callback(parsed.value().op_mask,
                                                  parsed.value().key_filter,
                                                  parsed.value().channel);
        reply = res.ok() ? wire::encode_reply_regcb(res.value())
                         : wire::encode_reply_status(res.status());
        break;
      }
      case wire::FrameType::UnregCb: {
        auto parsed = wire::parse_unregcb_body(body);
        if (!parsed.ok()) return false;
        auto res = module_host->unregister_callback(parsed.value());
        reply = wire::encode_reply_status(res.status());
        break;
      }
      default:
        return false;  // EVT/REPLY from a client, or an unknown type
    }

    footprint_mirror.store(store.footprint_bytes(), std::memory_order_relaxed);
    commands.fetch_add(1, std::memory_order_relaxed);

    // Modeled protection cost: paid after the operation, before anything
    // it produced leaves the process.
    const uint64_t delay = overhead_ns(config.profile, request_bytes, store.footprint_bytes());
    if (delay > 0) delay_precise_ns(delay);

    append_frame(c, wire::FrameType::Reply, reply);
    return true;
  }

  void pump_subscribers() {
    for (auto& [fd, conn] : conns) {
      if (conn.sub_id == 0 && !conn.close_after_flush) continue;
      drain_subscriber(conn);
    }
  }

  void on_readable(int fd) {
    auto it = conns.find(fd);
    if (it == conns.end()) return;
    Conn& c = it->second;

    for (;;) {
      size_t old = c.in.size();
      c.in.resize(old + kReadChunk);
      ssize_t n = recv(fd, c.in.data() + old, kReadChunk, 0);
      if (n > 0) {
        c.in.resize(old + static_cast<size_t>(n));
        if (static_cast<size_t>(n) < kReadChunk) break;
        continue;
      }
      c.in.resize(old);
      if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) break;
      close_conn(fd);  // EOF or error
      return;
    }

    bool alive = true;
    while (alive) {
      auto res = wire::decode_frame(
          wire::ByteView(c.in.data() + c.in_off, c.in.size() - c.in_off));
      if (std::holds_alternative<wire::NeedMore>(res)) break;
      if (std::holds_alternative<Status>(res)) {
        alive = false;
        break;
      }
      auto& frame = std::get<wire::DecodedFrame>(res);
      alive = handle_frame(c, frame.type, frame.body);
      c.in_off += frame.consumed;
      if (alive) {
        // Event fan-out and replies leave together, after the delay.
        pump_subscribers();
        std::vector<int> dirty;
        dirty.reserve(conns.size());
        for (auto& [ofd, oc] : conns) {
          if (oc.out_pending() > 0) dirty.push_back(ofd);
        }
        for (int ofd : dirty) {
          auto oit = conns.find(ofd);
          if (oit != conns.end() && !flush(oit->second)) close_conn(ofd);
        }
        if (conns.find(fd) == conns.end()) return;  // we were the casualty
      }
    }

    if (!alive) {
      close_conn(fd);
      return;
    }
    if (c.in_off == c.in.size()) {
      c.in.clear();
      c.in_off = 0;
    } else if (c.in_off > kReadChunk) {
      c.in.erase(c.in.begin(), c.in.begin() + static_cast<ptrdiff_t>(c.in_off));
      c.in_off = 0;
    }
  }

  void on_writable(int fd) {
    auto it = conns.find(fd);
    if (it == conns.end()) return;
    Conn& c = it->second;
    if (!flush(c)) {
      close_conn(fd);
      return;
    }
    drain_subscriber(c);  // room may have opened up
    if (c.out_pending() > 0 && !flush(c)) close_conn(fd);
  }

  void accept_new() {
    for (;;) {
      int fd = accept4(listen_fd, nullptr, nullptr, SOCK_NONBLOCK);
      if (fd < 0) return;
      set_nodelay(fd);
      epoll_event ev{};
      ev.events = EPOLLIN | EPOLLRDHUP;
      ev.data.fd = fd;
      epoll_ctl(epoll_fd, EPOLL_CTL_ADD, fd, &ev);
      Conn c;
      c.fd = fd;
      conns.emplace(fd, std::move(c));
    }
  }

  void drain_before_exit() {
    const uint64_t deadline = monotonic_ns() + kDrainDeadlineNs;
    for (;;) {
      bool pending = false;
      for (auto& [fd, c] : conns) {
        if (c.out_pending() > 0) pending = true;
      }
      if (!pending || monotonic_ns() >= deadline) break;
      epoll_event events[16];
      int n = epoll_wait(epoll_fd, events, 16, 10);
      for (int i = 0; i < n; ++i) {
        int fd = events[i].data.fd;
        if (fd == listen_fd || fd == wake_fd) continue;
        auto it = conns.find(fd);
        if (it != conns.end() && !flush(it->second)) close_conn(fd);
      }
      // also retry conns that were blocked on EAGAIN without epollout
      std::vector<int> fds;
      fds.reserve(conns.size());
      for (auto& [fd, c] : conns) {
        if (c.out_pending() > 0) fds.push_back(fd);
      }
      for (int fd : fds) {
        auto it = conns.find(fd);
        if (it != conns.end() && !flush(it->second)) close_conn(fd);
      }
    }
    std::vector<int> fds;
    for (auto& [fd, c] : conns) fds.push_back(fd);
    for (int fd : fds) close_conn(fd);
  }

  void loop() {
    epoll_event events[64];
    while (!stopping.load(std::memory_order_acquire)) {
      int n = epoll_wait(epoll_fd, events, 64, 100);
      for (int i = 0; i < n; ++i) {
        const int fd = events[i].data.fd;
        const uint32_t mask = events[i].events;
        if (fd == wake_fd) {
          uint64_t v;
          while (read(wake_fd, &v, sizeof(v)) > 0) {
          }
          continue;
        }
        if (fd == listen_fd) {
          accept_new();
          continue;
        }
        if (mask & (EPOLLHUP | EPOLLERR)) {
          close_conn(fd);
          continue;
        }
        if (mask & EPOLLOUT) on_writable(fd);
        if (mask & (EPOLLIN | EPOLLRDHUP)) on_readable(fd);
      }
    }
    drain_before_exit();
    stopped.store(true, std::memory_order_release);
  }
};

Result<std::unique_ptr<Server>> Server::start(const ServerConfig& config) {
  if (auto v = config.profile.validate(); !v.ok()) return v.status();
  auto server = std::unique_ptr<Server>(new Server());
  server->impl_ = std::make_unique<Impl>(config);
  if (auto r = server->impl_->bind_and_listen(); !r.ok()) return r.status();
  server->impl_->loop_thread = std::thread([impl = server->impl_.get()] { impl->loop(); });
  return server;
}

Server::~Server() { stop(); }

void Server::stop() {
  if (!impl_ || impl_->stopping.exchange(true)) return;
  uint64_t one = 1;
  [[maybe_unused]] ssize_t n = write(impl_->wake_fd, &one, sizeof(one));
  if (impl_->loop_thread.joinable()) impl_->loop_thread.join();
}

uint16_t Server::port() const { return impl_->bound_port; }
const std::string& Server::host() const { return impl_->config.host; }
const ProtectionProfile& Server::profile() const { return impl_->config.profile; }
uint64_t Server::store_footprint_bytes() const {
  return impl_->footprint_mirror.load(std::memory_order_relaxed);
}
uint64_t Server::commands_processed() const {
  return impl_->commands.load(std::memory_order_relaxed);
}

}  // namespace evstream
