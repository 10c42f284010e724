#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "evstream/status.hpp"
#include "evstream/wire.hpp"

namespace evstream {

// Blocking client codec. One connection, pipelining allowed: send_frame
// queues requests back to back; poll_frame / request consume what comes
// back. Pushed EVT frames that arrive while a reply is awaited are parked
// in pending_events.
class Client {
 public:
  struct OwnedFrame {
    uint8_t type = 0;
    std::vector<uint8_t> body;
  };

  static Result<std::unique_ptr<Client>> connect(const std::string& host, uint16_t port,
                                                 int timeout_ms = 5000);
  ~Client();

  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  Result<void> send_frame(wire::FrameType type, wire::ByteView body);
  // Pre-assembled frames, written in one burst (publisher batching).
  Result<void> send_raw(wire::ByteView bytes);

  // Next frame of any type. timeout_ms < 0 blocks, 0 polls. Returns
  // Status::Ok with has_frame=false on timeout; ConnectionLost on EOF.
  struct PollResult {
    bool has_frame = false;
    OwnedFrame frame;
  };
  Result<PollResult> poll_frame(int timeout_ms);

  // send_frame + wait for the next REPLY, parking EVT frames.
  Result<OwnedFrame> request(wire::FrameType type, wire::ByteView body, int timeout_ms = 5000);

  // Monotonic timestamp taken right after the read() that produced the
  // most recent buffered bytes; subscribers use it as the receive time for
  // every frame parsed out of that read.
  uint64_t last_read_ts_ns() const { return last_read_ts_ns_; }

  std::deque<OwnedFrame> pending_events;

 private:
  Client() = default;

  int fd_ = -1;
  std::vector<uint8_t> buf_;
  size_t off_ = 0;
  uint64_t last_read_ts_ns_ = 0;
};

}  // namespace evstream
