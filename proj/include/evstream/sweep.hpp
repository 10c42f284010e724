#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evstream/energy.hpp"
#include "evstream/protection.hpp"
#include "evstream/status.hpp"

namespace evstream {

// A benchmark sweep: the grid product profiles x sizes x rates, iterated
// profile-major in deterministic order. Each cell gets a fresh in-process
// server with that profile (or the external endpoint when `connect` is
// set), one latency CSV, and one energy row. A manifest ties it together.
struct SweepConfig {
  std::vector<std::string> profile_names = {"native"};
  std::optional<uint64_t> per_call_ns;  // overrides for non-native profiles
  std::optional<uint64_t> per_byte_ns;
  std::optional<uint64_t> epc_bytes;
  std::optional<uint64_t> page_penalty_ns;

  std::vector<double> rates = {1000, 2000, 5000, 10000, 20000, 50000, 100000};
  std::vector<uint32_t> sizes = {64, 128, 256, 512};
  double duration_s = 10;
  uint32_t publishers = 1;
  uint32_t subscribers = 1;
  uint64_t seed = 1;
  std::string channel = "bench";
  bool allow_any_size = false;

  std::string out_dir;

  // Power source: an external meter trace or the synthetic model.
  std::optional<std::string> power_trace_path;
  SyntheticPowerModel synthetic{50.0, 150.0, 50000.0};
  double sample_hz = 10;
  std::optional<double> baseline_w;

  // External server instead of per-cell in-process servers.
  std::optional<std::string> connect_host;
  uint16_t connect_port = 0;
};

struct SweepOutcome {
  uint32_t cells_total = 0;
  uint32_t cells_failed = 0;
};

Result<SweepOutcome> run_bench_sweep(const SweepConfig& config);

// Reads a sweep directory (manifest + per-cell files) and emits report.csv
// plus one plot_<profile>.csv per profile. Pure function of the inputs.
Result<void> build_report(const std::string& dir);

extern const char* const kEnergyCsvHeader;

}  // namespace evstream
