#include <doctest.h>

#include "evstream/bench.hpp"
#include "evstream/server.hpp"

using namespace evstream;

namespace {

std::unique_ptr<Server> start_server(const ProtectionProfile& profile) {
  ServerConfig config;
  config.profile = profile;
  auto server = Server::start(config);
  REQUIRE(server.ok());
  return server.take();
}

}  // namespace

TEST_CASE("workload: full pub/sub flow with three subscribers") {
  auto server = start_server(ProtectionProfile::native());

  WorkloadSpec spec;
  spec.target_rate = 2000;
  spec.message_size_bytes = 64;
  spec.duration_s = 1.0;
  spec.publishers = 1;
  spec.subscribers = 3;
  spec.seed = 11;

  auto run = run_workload(spec, "127.0.0.1", server->port());
  REQUIRE(run.ok());
  const auto& r = run.value();
  CHECK(r.scheduled == 2000);
  CHECK(r.delivered == 2000);
  CHECK_FALSE(r.partial);
  CHECK(r.order_violations == 0);
  CHECK(r.duplicate_deliveries == 0);
  REQUIRE(r.per_subscriber_received.size() == 3);
  for (auto count : r.per_subscriber_received) CHECK(count == 2000);
  REQUIRE(r.records.size() == 2000);
  for (const auto& rec : r.records) {
    CHECK(rec.receive_count == 3);
    CHECK(rec.latency_ns >= 0);
    CHECK(rec.corrected_latency_ns >= rec.latency_ns);
    CHECK(rec.actual_send_ns >= rec.intended_send_ns);
  }
  // Sequences are gapless 1..N in seq order.
  for (size_t i = 0; i < r.records.size(); ++i) CHECK(r.records[i].seq == i + 1);
}

TEST_CASE("workload: two publishers split the schedule round-robin") {
  auto server = start_server(ProtectionProfile::native());

  WorkloadSpec spec;
  spec.target_rate = 1000;
  spec.duration_s = 1.0;
  spec.publishers = 2;
  spec.subscribers = 1;
  spec.seed = 5;

  auto run = run_workload(spec, "127.0.0.1", server->port());
  REQUIRE(run.ok());
  CHECK(run.value().delivered == 1000);
  CHECK_FALSE(run.value().partial);
  // Every intended time from the schedule shows up exactly once.
  auto sched = schedule_ns(spec.target_rate, spec.duration_s);
  std::vector<uint64_t> seen;
  for (const auto& rec : run.value().records) seen.push_back(rec.intended_send_ns);
  std::sort(seen.begin(), seen.end());
  CHECK(seen == sched);
}

TEST_CASE("workload: saturation keeps intended timestamps and reports shortfall") {
  auto server = start_server(ProtectionProfile::native());

  WorkloadSpec spec;
  spec.target_rate = 400000;  // far beyond what one core moves end to end
  spec.message_size_bytes = 64;
  spec.duration_s = 0.25;
  spec.publishers = 1;
  spec.subscribers = 1;
  spec.seed = 2;

  auto run = run_workload(spec, "127.0.0.1", server->port());
  REQUIRE(run.ok());
  const auto& r = run.value();
  CHECK(r.scheduled == 100000);
  CHECK(r.delivered == r.scheduled);  // TCP backpressure, not loss
  CHECK(r.makespan_s > spec.duration_s);
  CHECK(r.achieved_rate < spec.target_rate * 0.8);
  for (size_t i = 0; i < r.records.size(); i += 997) {
    const auto& rec = r.records[i];
    CHECK(rec.corrected_latency_ns >= rec.latency_ns);  // intended timestamps kept
  }
}

TEST_CASE("workload: unreachable server reports connection loss") {
  WorkloadSpec spec;
  auto run = run_workload(spec, "127.0.0.1", 1);  // nothing listens on port 1
  CHECK_FALSE(run.ok());
  CHECK(run.status() == Status::ConnectionLost);
}
