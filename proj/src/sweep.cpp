#include "evstream/sweep.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "evstream/bench.hpp"
#include "evstream/clock.hpp"
#include "evstream/rng.hpp"
#include "evstream/server.hpp"

namespace evstream {

namespace fs = std::filesystem;
using nlohmann::json;

const char* const kEnergyCsvHeader =
    "rate,size_bytes,profile,achieved_rate,joules_total,joules_per_message,p50_ns,p99_ns";

namespace {

std::string fmt_double(double v, const char* spec = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string cell_csv_name(const std::string& profile, uint32_t size, double rate) {
  return "lat_" + profile + "_s" + std::to_string(size) + "_r" + fmt_double(rate) + ".csv";
}

Result<ProtectionProfile> resolve_profile(const SweepConfig& config, const std::string& name) {
  auto p = ProtectionProfile::by_name(name);
  if (!p.ok()) return p.status();
  ProtectionProfile profile = p.value();
  if (profile.mode != ProtectionMode::Native) {
    if (config.per_call_ns) profile.per_call_ns = *config.per_call_ns;
    if (config.per_byte_ns) profile.per_byte_ns = *config.per_byte_ns;
    if (config.epc_bytes) profile.epc_capacity_bytes = *config.epc_bytes;
    if (config.page_penalty_ns) profile.page_fault_penalty_ns = *config.page_penalty_ns;
  }
  if (auto v = profile.validate(); !v.ok()) return v.status();
  return profile;
}

json profile_json(const ProtectionProfile& p) {
  return json{{"mode", mode_name(p.mode)},
              {"per_call_ns", p.per_call_ns},
              {"per_byte_ns", p.per_byte_ns},
              {"epc_capacity_bytes", p.epc_capacity_bytes},
              {"page_size_bytes", p.page_size_bytes},
              {"page_fault_penalty_ns", p.page_fault_penalty_ns}};
}

struct EnergyRow {
  double rate = 0;
  uint32_t size = 0;
  std::string profile;
  double achieved_rate = 0;
  double joules_total = 0;
  double joules_per_message = 0;
  int64_t p50_ns = 0;
  int64_t p99_ns = 0;
};

std::string format_energy_row(const EnergyRow& r) {
  std::string out;
  out += fmt_double(r.rate);
  out += ',';
  out += std::to_string(r.size);
  out += ',';
  out += r.profile;
  out += ',';
  out += fmt_double(r.achieved_rate, "%.6f");
  out += ',';
  out += fmt_double(r.joules_total, "%.9g");
  out += ',';
  out += fmt_double(r.joules_per_message, "%.9g");
  out += ',';
  out += std::to_string(r.p50_ns);
  out += ',';
  out += std::to_string(r.p99_ns);
  return out;
}

// Energy + percentile rows for every ok cell; shared by the sweep (which
// writes energy.csv as it finishes) and by build_report.
Result<std::vector<EnergyRow>> compute_energy_rows(const json& manifest, const fs::path& dir) {
  std::vector<EnergyRow> rows;

  std::optional<std::vector<PowerSample>> trace;
  const auto& power = manifest.at("power");
  if (power.at("source") == "trace") {
    auto t = read_power_trace_csv(power.at("path").get<std::string>());
    if (!t.ok()) return t.status();
    trace = t.take();
  }
  SyntheticPowerModel model;
  if (power.at("source") == "synthetic") {
    model.p_idle_w = power.at("p_idle_w").get<double>();
    model.p_max_w = power.at("p_max_w").get<double>();
    model.capacity_msgs_per_s = power.at("capacity_msgs_per_s").get<double>();
  }
  std::optional<double> baseline_w;
  if (manifest.contains("baseline_w") && !manifest.at("baseline_w").is_null()) {
    baseline_w = manifest.at("baseline_w").get<double>();
  }
  const double duration_s = manifest.at("duration_s").get<double>();
  const double sample_hz = manifest.at("sample_hz").get<double>();

  for (const auto& cell : manifest.at("cells")) {
    if (cell.at("status") != "ok") continue;

    EnergyRow row;
    row.rate = cell.at("rate").get<double>();
    row.size = cell.at("size_bytes").get<uint32_t>();
    row.profile = cell.at("profile").get<std::string>();
    row.achieved_rate = cell.at("achieved_rate").get<double>();
    const auto delivered = cell.at("delivered").get<uint64_t>();

    std::vector<PowerSample> samples;
    if (trace) {
      samples = slice_trace(*trace, cell.at("window_t0_s").get<double>(),
                            cell.at("window_t1_s").get<double>());
      if (samples.size() < 2) return Status::TooFewSamples;
    } else {
      auto synth = synthesize_trace(model, row.achieved_rate, duration_s, sample_hz);
      if (!synth.ok()) return synth.status();
      samples = synth.take();
    }
    auto report = energy_per_message(samples, delivered, baseline_w);
    if (!report.ok()) return report.status();
    row.joules_total = report.value().joules_total;
    row.joules_per_message = report.value().valid ? report.value().joules_per_message : 0.0;

    auto records = read_latency_csv((dir / cell.at("latency_csv").get<std::string>()).string());
    if (!records.ok()) return records.status();
    std::vector<int64_t> lat;
    lat.reserve(records.value().size());
    for (const auto& r : records.value()) lat.push_back(r.latency_ns);
    const double quantiles[] = {50.0, 99.0};
    auto pct = percentiles(lat, quantiles);
    if (!pct.ok()) return pct.status();
    row.p50_ns = pct.value()[0];
    row.p99_ns = pct.value()[1];

    rows.push_back(std::move(row));
  }
  return rows;
}

Result<void> write_energy_csv(const fs::path& path, const std::vector<EnergyRow>& rows) {
  std::ofstream out(path);
  if (!out) return Status::IoError;
  out << kEnergyCsvHeader << '\n';
  for (const auto& r : rows) out << format_energy_row(r) << '\n';
  return out.good() ? Result<void>{} : Status::IoError;
}

}  // namespace

Result<SweepOutcome> run_bench_sweep(const SweepConfig& config) {
  if (config.profile_names.empty() || config.rates.empty() || config.sizes.empty())
    return Status::InvalidSpec;
  if (config.out_dir.empty()) return Status::InvalidSpec;
  if (!config.power_trace_path) {
    if (auto v = config.synthetic.validate(); !v.ok()) return v.status();
  }

  fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  {
    std::ofstream probe(dir / ".write_probe");
    if (!probe) return Status::IoError;
  }
  fs::remove(dir / ".write_probe", ec);

  json manifest;
  manifest["seed"] = config.seed;
  manifest["duration_s"] = config.duration_s;
  manifest["publishers"] = config.publishers;
  manifest["subscribers"] = config.subscribers;
  manifest["channel"] = config.channel;
  manifest["sample_hz"] = config.sample_hz;
  manifest["versions"] = json{{"evstream", "0.1.0"}, {"proto", 1}};
  if (config.power_trace_path) {
    manifest["power"] = json{{"source", "trace"}, {"path", *config.power_trace_path}};
  } else {
    manifest["power"] = json{{"source", "synthetic"},
                             {"p_idle_w", config.synthetic.p_idle_w},
                             {"p_max_w", config.synthetic.p_max_w},
                             {"capacity_msgs_per_s", config.synthetic.capacity_msgs_per_s}};
  }
  if (config.baseline_w) {
    manifest["baseline_w"] = *config.baseline_w;
  } else {
    manifest["baseline_w"] = nullptr;
  }

  json grid;
  grid["rates"] = config.rates;
  grid["sizes"] = config.sizes;
  grid["profiles"] = json::array();
  for (const auto& name : config.profile_names) {
    auto profile = resolve_profile(config, name);
    if (!profile.ok()) return profile.status();
    grid["profiles"].push_back(profile_json(profile.value()));
  }
  manifest["grid"] = grid;

  SweepOutcome outcome;
  const uint64_t sweep_t0 = monotonic_ns();
  json cells = json::array();

  for (const auto& name : config.profile_names) {
    const ProtectionProfile profile = resolve_profile(config, name).value();
    for (uint32_t size : config.sizes) {
      for (double rate : config.rates) {
        ++outcome.cells_total;
        json cell;
        cell["profile"] = name;
        cell["size_bytes"] = size;
        cell["rate"] = rate;

        WorkloadSpec spec;
        spec.target_rate = rate;
        spec.message_size_bytes = size;
        spec.duration_s = config.duration_s;
        spec.publishers = config.publishers;
        spec.subscribers = config.subscribers;
        spec.channel = config.channel;
        spec.seed = mix_seed(config.seed, (static_cast<uint64_t>(size) << 32) ^
                                              static_cast<uint64_t>(rate));
        spec.allow_any_size = config.allow_any_size;

        std::unique_ptr<Server> server;
        std::string host;
        uint16_t port = 0;
        bool endpoint_ok = true;
        if (config.connect_host) {
          host = *config.connect_host;
          port = config.connect_port;
        } else {
          ServerConfig sc;
          sc.profile = profile;
          auto started = Server::start(sc);
          if (!started.ok()) {
            endpoint_ok = false;
            cell["status"] = "failed";
            cell["error"] = status_name(started.status());
          } else {
            server = started.take();
            host = server->host();
            port = server->port();
          }
        }

        if (endpoint_ok) {
          const uint64_t cell_t0 = monotonic_ns();
          auto run = run_workload(spec, host, port);
          const uint64_t cell_t1 = monotonic_ns();
          if (!run.ok()) {
            cell["status"] = "failed";
            cell["error"] = status_name(run.status());
            ++outcome.cells_failed;
          } else if (run.value().partial) {
            cell["status"] = "failed";
            cell["error"] = run.value().error.empty() ? "partial data" : run.value().error;
            ++outcome.cells_failed;
          } else {
            const auto csv = cell_csv_name(name, size, rate);
            auto w = write_latency_csv((dir / csv).string(), run.value().records);
            if (!w.ok()) {
              cell["status"] = "failed";
              cell["error"] = status_name(w.status());
              ++outcome.cells_failed;
            } else {
              cell["status"] = "ok";
              cell["latency_csv"] = csv;
              cell["scheduled"] = run.value().scheduled;
              cell["delivered"] = run.value().delivered;
              cell["achieved_rate"] = run.value().achieved_rate;
              cell["makespan_s"] = run.value().makespan_s;
              cell["window_t0_s"] = static_cast<double>(cell_t0 - sweep_t0) / 1e9;
              cell["window_t1_s"] = static_cast<double>(cell_t1 - sweep_t0) / 1e9;
            }
          }
        } else {
          ++outcome.cells_failed;
        }
        cells.push_back(std::move(cell));
        server.reset();  // fresh server per cell
      }
    }
  }
  manifest["cells"] = std::move(cells);

  {
    std::ofstream out(dir / "manifest.json");
    if (!out) return Status::IoError;
    out << manifest.dump(2) << '\n';
  }

  auto rows = compute_energy_rows(manifest, dir);
  if (rows.ok()) {
    if (auto w = write_energy_csv(dir / "energy.csv", rows.value()); !w.ok()) return w.status();
  } else if (outcome.cells_failed == 0) {
    return rows.status();
  }
  return outcome;
}

Result<void> build_report(const std::string& dir_in) {
  fs::path dir(dir_in);
  std::ifstream in(dir / "manifest.json");
  if (!in) return Status::MissingInputs;
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception&) {
    return Status::MissingInputs;
  }

  auto rows = compute_energy_rows(manifest, dir);
  if (!rows.ok()) return rows.status();

  if (auto w = write_energy_csv(dir / "report.csv", rows.value()); !w.ok()) return w.status();

  // One plot-data file per profile: x = achieved throughput, y = energy per
  // message, one series per message size.
  for (const auto& profile : manifest.at("grid").at("profiles")) {
    const std::string name = profile.at("mode").get<std::string>();
    std::ofstream out(dir / ("plot_" + name + ".csv"));
    if (!out) return Status::IoError;
    out << "size_bytes,achieved_rate,joules_per_message\n";
    for (const auto& r : rows.value()) {
      if (r.profile != name) continue;
      out << std::to_string(r.size) << ',' << fmt_double(r.achieved_rate, "%.6f") << ','
          << fmt_double(r.joules_per_message, "%.9g") << '\n';
    }
    if (!out.good()) return Status::IoError;
  }
  return {};
}

}  // namespace evstream
