#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>

#include "evstream/protection.hpp"
#include "evstream/pubsub.hpp"
#include "evstream/status.hpp"

namespace evstream {

struct ServerConfig {
  std::string host = "127.0.0.1";
  uint16_t port = 0;  // 0 picks an ephemeral port
  ProtectionProfile profile;
  size_t max_queue_events = Hub::kDefaultQueueEvents;
};

// TCP endpoint wiring the wire protocol to store, module host and hub.
//
// One thread runs an epoll loop and executes every command on it, which is
// the serialized command sequence the store contract requires: mutations
// are totally ordered, sequence assignment is atomic, replies on a
// connection are in request order. The protection profile is fixed at
// construction; each request is delayed by its modeled overhead after the
// operation executes and before its reply and any event frames reach a
// socket.
class Server {
 public:
  static Result<std::unique_ptr<Server>> start(const ServerConfig& config);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Graceful: stops accepting, drains pending output (bounded), closes.
  void stop();

  uint16_t port() const;
  const std::string& host() const;
  const ProtectionProfile& profile() const;

  // Observability for tests; mirrors updated on the command thread.
  uint64_t store_footprint_bytes() const;
  uint64_t commands_processed() const;

 private:
  Server() = default;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace evstream
