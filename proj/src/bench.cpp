#include "evstream/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <thread>

#include "evstream/client.hpp"
#include "evstream/clock.hpp"
#include "evstream/rng.hpp"
#include "evstream/wire.hpp"

namespace evstream {

namespace {

constexpr size_t kMaxBatchFrames = 128;
constexpr size_t kMaxBatchBytes = 128 * 1024;
constexpr int kSubscriberIdleMs = 5000;
constexpr uint64_t kHardTailNs = 120'000'000'000ull;  // generous cap for saturated runs

std::string publisher_key(uint32_t p) { return "bench:p" + std::to_string(p); }

struct PublisherLog {
  std::vector<uint64_t> indices;
  std::vector<uint64_t> actual_send_ns;  // parallel to indices
  uint64_t replies_ok = 0;
  std::string error;
};

struct SubscriberSighting {
  uint64_t seq = 0;
  uint64_t publish_ns = 0;
  uint64_t recv_ns = 0;
  uint64_t global_index = 0;
};

struct SubscriberLog {
  std::vector<SubscriberSighting> sightings;
  uint64_t order_violations = 0;
  uint64_t duplicates = 0;
  uint64_t foreign = 0;
  bool timed_out = false;
  std::string error;
};

}  // namespace

Result<void> WorkloadSpec::validate() const {
  if (!(target_rate > 0) || !(duration_s > 0)) return Status::InvalidSpec;
  if (publishers < 1 || subscribers < 1) return Status::InvalidSpec;
  if (!allow_any_size && (message_size_bytes < 64 || message_size_bytes > 512))
    return Status::InvalidSpec;
  if (message_size_bytes > kMaxValueBytes) return Status::InvalidSpec;
  if (!channel_name_valid(channel)) return Status::InvalidSpec;
  return {};
}

std::vector<uint64_t> schedule_ns(double target_rate, double duration_s) {
  const auto count =
      static_cast<uint64_t>(std::ceil(target_rate * duration_s - 1e-9));
  std::vector<uint64_t> out;
  out.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    out.push_back(static_cast<uint64_t>(std::llround(static_cast<double>(i) * 1e9 / target_rate)));
  }
  return out;
}

std::vector<uint64_t> publisher_indices(uint64_t total_sends, uint32_t publishers, uint32_t p) {
  std::vector<uint64_t> out;
  for (uint64_t i = p; i < total_sends; i += publishers) out.push_back(i);
  return out;
}

Result<std::vector<int64_t>> percentiles(std::span<const int64_t> samples,
                                         std::span<const double> quantiles) {
  if (samples.empty()) return Status::EmptyInput;
  std::vector<int64_t> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<int64_t> out;
  out.reserve(quantiles.size());
  for (double q : quantiles) {
    const double clamped = std::clamp(q, 0.0, 100.0);
    auto rank = static_cast<size_t>(
        std::ceil(clamped / 100.0 * static_cast<double>(sorted.size())));
    if (rank == 0) rank = 1;
    out.push_back(sorted[rank - 1]);
  }
  return out;
}

namespace {

void run_publisher(const WorkloadSpec& spec, Client& client, uint32_t p,
                   const std::vector<uint64_t>& schedule, uint64_t t0, PublisherLog& log) {
  PayloadGenerator gen(mix_seed(spec.seed, p));
  const std::string key = publisher_key(p);
  const auto indices = publisher_indices(schedule.size(), spec.publishers, p);
  log.indices = indices;
  log.actual_send_ns.assign(indices.size(), 0);

  std::vector<uint8_t> batch;
  std::vector<size_t> batch_slots;  // positions in `indices`
  batch.reserve(kMaxBatchBytes + 2048);

  auto drain_replies = [&](int timeout_ms) -> bool {
    for (;;) {
      auto polled = client.poll_frame(timeout_ms);
      if (!polled.ok()) {
        log.error = status_name(polled.status());
        return false;
      }
      if (!polled.value().has_frame) return true;
      const auto& f = polled.value().frame;
      if (f.type == static_cast<uint8_t>(wire::FrameType::Reply) && !f.body.empty() &&
          f.body[0] == static_cast<uint8_t>(Status::Ok)) {
        ++log.replies_ok;
      } else if (f.type == static_cast<uint8_t>(wire::FrameType::Reply)) {
        log.error = "server rejected a SET";
        return false;
      }
      if (timeout_ms > 0 && log.replies_ok == indices.size()) return true;
    }
  };

  auto flush_batch = [&]() -> bool {
    if (batch_slots.empty()) return true;
    const uint64_t now = monotonic_ns();
    if (auto s = client.send_raw(batch); !s.ok()) {
      log.error = status_name(s.status());
      return false;
    }
    for (size_t slot : batch_slots) log.actual_send_ns[slot] = now - t0;
    batch.clear();
    batch_slots.clear();
    return drain_replies(0);
  };

  std::vector<uint8_t> value(spec.message_size_bytes);
  for (size_t k = 0; k < indices.size(); ++k) {
    const uint64_t deadline = t0 + schedule[indices[k]];
    if (monotonic_ns() < deadline) {
      if (!flush_batch()) return;
      sleep_until_ns(deadline);
    }
    // A late send is issued immediately; its intended time is unchanged.
    gen.fill(value);
    const size_t body_len = 2 + key.size() + value.size();
    batch.push_back(wire::kMagic0);
    batch.push_back(wire::kMagic1);
    batch.push_back(wire::kProtoVersion);
    batch.push_back(static_cast<uint8_t>(wire::FrameType::Set));
    wire::put_u32(batch, static_cast<uint32_t>(body_len));
    wire::put_u16(batch, static_cast<uint16_t>(key.size()));
    batch.insert(batch.end(), key.begin(), key.end());
    batch.insert(batch.end(), value.begin(), value.end());
    batch_slots.push_back(k);
    if (batch_slots.size() >= kMaxBatchFrames || batch.size() >= kMaxBatchBytes) {
      if (!flush_batch()) return;
    }
  }
  if (!flush_batch()) return;

  // Collect the remaining replies so the run ends with a verified pipeline.
  const uint64_t hard_deadline =
      t0 + static_cast<uint64_t>(spec.duration_s * 1e9) + kHardTailNs;
  while (log.replies_ok < indices.size() && log.error.empty()) {
    if (monotonic_ns() > hard_deadline) {
      log.error = "timed out waiting for SET replies";
      return;
    }
    if (!drain_replies(100)) return;
  }
}

void run_subscriber(const WorkloadSpec& spec, Client& client, uint64_t base_seq,
                    uint64_t total_sends, uint64_t t0, SubscriberLog& log) {
  std::vector<bool> seen(total_sends + 1, false);
  std::vector<uint64_t> per_pub_count(spec.publishers, 0);
  uint64_t received = 0;
  uint64_t last_seq = 0;
  const uint64_t hard_deadline =
      t0 + static_cast<uint64_t>(spec.duration_s * 1e9) + kHardTailNs;
  const std::string key_prefix = "bench:p";

  while (received < total_sends) {
    if (monotonic_ns() > hard_deadline) {
      log.timed_out = true;
      return;
    }
    auto polled = client.poll_frame(kSubscriberIdleMs);
    if (!polled.ok()) {
      log.error = status_name(polled.status());
      return;
    }
    if (!polled.value().has_frame) {
      log.timed_out = true;  // idle too long
      return;
    }
    const auto& f = polled.value().frame;
    if (f.type == static_cast<uint8_t>(wire::FrameType::Reply)) {
      // Unsolicited reply after the SUB ack is an overflow notice.
      log.error = "disconnected (overflow)";
      return;
    }
    if (f.type != static_cast<uint8_t>(wire::FrameType::Evt)) continue;
    auto ev = wire::parse_evt_body(wire::ByteView(f.body.data(), f.body.size()));
    if (!ev.ok() || ev.value().channel != spec.channel) {
      ++log.foreign;
      continue;
    }

    const auto& payload = ev.value().payload;
    const size_t sep = payload.find('\0');
    uint32_t pub = 0;
    bool parsed = sep != std::string_view::npos && sep > key_prefix.size() &&
                  payload.substr(0, key_prefix.size()) == key_prefix;
    if (parsed) {
      pub = 0;
      for (size_t i = key_prefix.size(); i < sep; ++i) {
        const char ch = payload[i];
        if (ch < '0' || ch > '9') {
          parsed = false;
          break;
        }
        pub = pub * 10 + static_cast<uint32_t>(ch - '0');
      }
    }
    if (!parsed || pub >= spec.publishers) {
      ++log.foreign;
      continue;
    }

    const uint64_t rel = ev.value().seq - base_seq;
    if (rel < 1 || rel > total_sends) {
      ++log.foreign;
      continue;
    }
    if (ev.value().seq <= last_seq) ++log.order_violations;
    last_seq = ev.value().seq;
    if (seen[rel]) {
      ++log.duplicates;
      continue;
    }
    seen[rel] = true;
    ++received;

    SubscriberSighting s;
    s.seq = ev.value().seq;
    s.publish_ns = ev.value().publish_ts_ns - t0;
    s.recv_ns = client.last_read_ts_ns() - t0;
    const uint64_t j = per_pub_count[pub]++;
    s.global_index = pub + j * spec.publishers;
    log.sightings.push_back(s);
  }
}

}  // namespace

Result<RunResult> run_workload(const WorkloadSpec& spec, const std::string& host, uint16_t port) {
  if (auto v = spec.validate(); !v.ok()) return v.status();

  const auto schedule = schedule_ns(spec.target_rate, spec.duration_s);
  const uint64_t total = schedule.size();

  RunResult result;
  result.scheduled = total;

  // Control connection: install the write-triggered callback for this run.
  auto control = Client::connect(host, port);
  if (!control.ok()) return Status::ConnectionLost;
  const OpMask write_mask = op_bit(OpKind::Create) | op_bit(OpKind::Update);
  auto reg_body = wire::encode_regcb_body(write_mask, spec.channel, "bench:*");
  auto reg_reply = control.value()->request(wire::FrameType::RegCb,
                                            wire::ByteView(reg_body.data(), reg_body.size()));
  if (!reg_reply.ok()) return Status::ConnectionLost;
  auto reg_view = wire::parse_reply(
      wire::ByteView(reg_reply.value().body.data(), reg_reply.value().body.size()));
  if (!reg_view.ok() || reg_view.value().status != Status::Ok) return Status::ConnectionLost;
  auto reg_id = wire::parse_reply_u64_payload(reg_view.value().payload);
  if (!reg_id.ok()) return Status::ConnectionLost;

  // Subscribers connect and ack before the first send.
  std::vector<std::unique_ptr<Client>> sub_clients;
  std::vector<uint64_t> base_seqs;
  for (uint32_t s = 0; s < spec.subscribers; ++s) {
    auto c = Client::connect(host, port);
    if (!c.ok()) return Status::ConnectionLost;
    auto ack = c.value()->request(wire::FrameType::Sub, wire::as_bytes(spec.channel));
    if (!ack.ok()) return Status::ConnectionLost;
    auto view =
        wire::parse_reply(wire::ByteView(ack.value().body.data(), ack.value().body.size()));
    if (!view.ok() || view.value().status != Status::Ok) return Status::ConnectionLost;
    auto starts = wire::parse_reply_sub_payload(view.value().payload);
    if (!starts.ok()) return Status::ConnectionLost;
    uint64_t base = 0;
    for (const auto& cs : starts.value()) {
      if (cs.channel == spec.channel) base = cs.next_seq - 1;
    }
    sub_clients.push_back(c.take());
    base_seqs.push_back(base);
  }

  std::vector<std::unique_ptr<Client>> pub_clients;
  for (uint32_t p = 0; p < spec.publishers; ++p) {
    auto c = Client::connect(host, port);
    if (!c.ok()) return Status::ConnectionLost;
    pub_clients.push_back(c.take());
  }

  std::vector<PublisherLog> pub_logs(spec.publishers);
  std::vector<SubscriberLog> sub_logs(spec.subscribers);

  std::promise<uint64_t> t0_promise;
  std::shared_future<uint64_t> t0_future = t0_promise.get_future().share();

  std::vector<std::thread> threads;
  threads.reserve(spec.publishers + spec.subscribers);
  for (uint32_t s = 0; s < spec.subscribers; ++s) {
    threads.emplace_back([&, s] {
      const uint64_t t0 = t0_future.get();
      run_subscriber(spec, *sub_clients[s], base_seqs[s], total, t0, sub_logs[s]);
    });
  }
  for (uint32_t p = 0; p < spec.publishers; ++p) {
    threads.emplace_back([&, p] {
      const uint64_t t0 = t0_future.get();
      run_publisher(spec, *pub_clients[p], p, schedule, t0, pub_logs[p]);
    });
  }

  t0_promise.set_value(monotonic_ns() + 20'000'000);  // small settle before first send
  for (auto& t : threads) t.join();

  // Release the callback so a shared server is left clean.
  auto unreg_body = wire::encode_unregcb_body(reg_id.value());
  (void)control.value()->request(wire::FrameType::UnregCb,
                                 wire::ByteView(unreg_body.data(), unreg_body.size()));

  // Join publisher and subscriber logs into one record per event.
  std::vector<uint64_t> intended_by_index(total), actual_by_index(total, 0);
  for (uint64_t i = 0; i < total; ++i) intended_by_index[i] = schedule[i];
  for (uint32_t p = 0; p < spec.publishers; ++p) {
    const auto& log = pub_logs[p];
    for (size_t k = 0; k < log.indices.size(); ++k) {
      actual_by_index[log.indices[k]] = log.actual_send_ns[k];
    }
    if (!log.error.empty()) {
      result.partial = true;
      if (result.error.empty()) result.error = "publisher " + std::to_string(p) + ": " + log.error;
    }
  }

  std::map<uint64_t, LatencyRecord> by_seq;
  uint64_t last_recv_ns = 0;
  for (uint32_t s = 0; s < spec.subscribers; ++s) {
    const auto& log = sub_logs[s];
    result.order_violations += log.order_violations;
    result.duplicate_deliveries += log.duplicates;
    result.per_subscriber_received.push_back(log.sightings.size());
    if (!log.error.empty() || log.timed_out) {
      result.partial = true;
      if (result.error.empty()) {
        result.error = "subscriber " + std::to_string(s) + ": " +
                       (log.error.empty() ? "timed out" : log.error);
      }
    }
    for (const auto& sighting : log.sightings) {
      auto& rec = by_seq[sighting.seq];
      if (rec.receive_count == 0) {
        rec.seq = sighting.seq;
        rec.publish_ns = sighting.publish_ns;
        rec.intended_send_ns = intended_by_index[sighting.global_index];
        rec.actual_send_ns = actual_by_index[sighting.global_index];
      }
      rec.recv_max_ns = std::max(rec.recv_max_ns, sighting.recv_ns);
      last_recv_ns = std::max(last_recv_ns, sighting.recv_ns);
      ++rec.receive_count;
    }
  }

  result.records.reserve(by_seq.size());
  for (auto& [seq, rec] : by_seq) {
    rec.latency_ns = static_cast<int64_t>(rec.recv_max_ns) - static_cast<int64_t>(rec.publish_ns);
    rec.corrected_latency_ns =
        static_cast<int64_t>(rec.recv_max_ns) - static_cast<int64_t>(rec.intended_send_ns);
    if (rec.receive_count == spec.subscribers) ++result.delivered;
    result.records.push_back(rec);
  }

  result.makespan_s = static_cast<double>(last_recv_ns) / 1e9;
  const double denom = std::max(spec.duration_s, result.makespan_s);
  result.achieved_rate = denom > 0 ? static_cast<double>(result.delivered) / denom : 0.0;
  return result;
}

const char* const kLatencyCsvHeader =
    "seq,intended_send_ns,actual_send_ns,publish_ns,recv_max_ns,latency_ns,corrected_latency_ns";

Result<void> write_latency_csv(const std::string& path, std::span<const LatencyRecord> records) {
  std::ofstream out(path);
  if (!out) return Status::IoError;
  out << kLatencyCsvHeader << '\n';
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%llu,%llu,%llu,%llu,%llu,%lld,%lld\n",
                  static_cast<unsigned long long>(r.seq),
                  static_cast<unsigned long long>(r.intended_send_ns),
                  static_cast<unsigned long long>(r.actual_send_ns),
                  static_cast<unsigned long long>(r.publish_ns),
                  static_cast<unsigned long long>(r.recv_max_ns),
                  static_cast<long long>(r.latency_ns),
                  static_cast<long long>(r.corrected_latency_ns));
    out << buf;
  }
  return out.good() ? Result<void>{} : Status::IoError;
}

Result<std::vector<LatencyRecord>> read_latency_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) return Status::IoError;
  std::string line;
  if (!std::getline(in, line)) return Status::IoError;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kLatencyCsvHeader) return Status::IoError;

  std::vector<LatencyRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    LatencyRecord r;
    unsigned long long seq, intended, actual, publish, recv;
    long long lat, corr;
    if (std::sscanf(line.c_str(), "%llu,%llu,%llu,%llu,%llu,%lld,%lld", &seq, &intended, &actual,
                    &publish, &recv, &lat, &corr) != 7) {
      return Status::IoError;
    }
    r.seq = seq;
    r.intended_send_ns = intended;
    r.actual_send_ns = actual;
    r.publish_ns = publish;
    r.recv_max_ns = recv;
    r.latency_ns = lat;
    r.corrected_latency_ns = corr;
    out.push_back(r);
  }
  return out;
}

}  // namespace evstream
