#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evstream/protection.hpp"
#include "evstream/status.hpp"

namespace evstream {

// One benchmark cell: fixed-rate, fixed-size injection against one server.
// Publishers drive the store (SET on bench keys); a registered callback
// turns each write into an event on `channel`; subscribers receive it.
struct WorkloadSpec {
  double target_rate = 1000;        // messages/second
  uint32_t message_size_bytes = 64;  // value bytes per SET
  double duration_s = 1.0;
  uint32_t publishers = 1;
  uint32_t subscribers = 1;
  std::string channel = "bench";
  uint64_t seed = 1;
  bool allow_any_size = false;  // lifts the default [64, 512] size bounds

  Result<void> validate() const;
};

// Intended send offsets from run start: t_i = i / target_rate for
// i = 0 .. ceil(target_rate * duration_s) - 1.
std::vector<uint64_t> schedule_ns(double target_rate, double duration_s);

// Round-robin partition: publisher p owns global indices p, p+P, p+2P, ...
std::vector<uint64_t> publisher_indices(uint64_t total_sends, uint32_t publishers, uint32_t p);

// All timestamps are nanosecond offsets from the run start on the shared
// monotonic clock. Event latency is measured to the *last* subscriber
// (until all subscribers receive the content); corrected latency is
// against the intended send time, so a backed-up sender cannot hide
// queueing delay (coordinated omission).
struct LatencyRecord {
  uint64_t seq = 0;  // channel sequence number
  uint64_t intended_send_ns = 0;
  uint64_t actual_send_ns = 0;
  uint64_t publish_ns = 0;
  uint64_t recv_max_ns = 0;
  uint32_t receive_count = 0;
  int64_t latency_ns = 0;            // recv_max - publish
  int64_t corrected_latency_ns = 0;  // recv_max - intended
};

struct RunResult {
  std::vector<LatencyRecord> records;  // seq order; complete and partial
  uint64_t scheduled = 0;
  uint64_t delivered = 0;  // events received by every subscriber
  double makespan_s = 0;   // first intended send to last delivery
  double achieved_rate = 0;
  uint64_t order_violations = 0;
  uint64_t duplicate_deliveries = 0;
  std::vector<uint64_t> per_subscriber_received;
  bool partial = false;
  std::string error;
};

Result<RunResult> run_workload(const WorkloadSpec& spec, const std::string& host, uint16_t port);

// Nearest-rank quantiles (q in [0,100]) over the given samples.
Result<std::vector<int64_t>> percentiles(std::span<const int64_t> samples,
                                         std::span<const double> quantiles);

extern const char* const kLatencyCsvHeader;
Result<void> write_latency_csv(const std::string& path, std::span<const LatencyRecord> records);
Result<std::vector<LatencyRecord>> read_latency_csv(const std::string& path);

}  // namespace evstream
