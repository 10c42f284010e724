#include <csignal>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evstream/protection.hpp"
#include "evstream/server.hpp"
#include "evstream/sweep.hpp"

namespace {

volatile std::sig_atomic_t g_terminate = 0;

void on_signal(int) { g_terminate = 1; }

bool parse_listen(const std::string& listen, std::string& host, uint16_t& port) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 >= listen.size()) return false;
  host = listen.substr(0, colon);
  const long p = std::strtol(listen.c_str() + colon + 1, nullptr, 10);
  if (p < 0 || p > 65535) return false;
  port = static_cast<uint16_t>(p);
  return true;
}

struct ProfileFlags {
  std::string profile = "native";
  int64_t per_call_ns = -1;
  int64_t per_byte_ns = -1;
  int64_t epc_bytes = -1;
  int64_t page_penalty_ns = -1;
};

void add_profile_flags(CLI::App* app, ProfileFlags& flags) {
  app->add_option("--profile", flags.profile,
                  "protection profile: native, enclave_like, encrypted_vm_like "
                  "(bench accepts a comma list)");
  app->add_option("--per-call-ns", flags.per_call_ns, "override per-request overhead (ns)");
  app->add_option("--per-byte-ns", flags.per_byte_ns, "override per-payload-byte overhead (ns)");
  app->add_option("--epc-bytes", flags.epc_bytes,
                  "override protected-memory capacity (bytes, multiple of page size)");
  app->add_option("--page-penalty-ns", flags.page_penalty_ns,
                  "override per-page penalty beyond capacity (ns)");
}

int run_serve(const std::string& listen, const ProfileFlags& flags) {
  std::string host;
  uint16_t port = 0;
  if (!parse_listen(listen, host, port)) {
    std::fprintf(stderr, "invalid --listen address: %s\n", listen.c_str());
    return 1;
  }

  auto profile = evstream::ProtectionProfile::by_name(flags.profile);
  if (!profile.ok()) {
    std::fprintf(stderr, "unknown profile: %s\n", flags.profile.c_str());
    return 1;
  }
  evstream::ProtectionProfile p = profile.value();
  if (p.mode != evstream::ProtectionMode::Native) {
    if (flags.per_call_ns >= 0) p.per_call_ns = static_cast<uint64_t>(flags.per_call_ns);
    if (flags.per_byte_ns >= 0) p.per_byte_ns = static_cast<uint64_t>(flags.per_byte_ns);
    if (flags.epc_bytes >= 0) p.epc_capacity_bytes = static_cast<uint64_t>(flags.epc_bytes);
    if (flags.page_penalty_ns >= 0)
      p.page_fault_penalty_ns = static_cast<uint64_t>(flags.page_penalty_ns);
  }
  if (auto v = p.validate(); !v.ok()) {
    std::fprintf(stderr, "invalid profile parameters: %s\n", evstream::status_name(v.status()));
    return 1;
  }

  evstream::ServerConfig config;
  config.host = host;
  config.port = port;
  config.profile = p;
  auto server = evstream::Server::start(config);
  if (!server.ok()) {
    std::fprintf(stderr, "bind failed on %s\n", listen.c_str());
    return 1;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::printf("evstream serving on %s:%u (profile %s)\n", host.c_str(),
              server.value()->port(), evstream::mode_name(p.mode));
  std::fflush(stdout);

  while (!g_terminate) {
    timespec ts{0, 50'000'000};
    nanosleep(&ts, nullptr);
  }
  server.value()->stop();  // drains connections before returning
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"event-based streaming store with a pub/sub benchmark harness"};
  app.require_subcommand(1);

  // serve
  auto* serve = app.add_subcommand("serve", "run the server");
  std::string listen = "127.0.0.1:7470";
  serve->add_option("--listen", listen, "host:port to bind");
  ProfileFlags serve_flags;
  add_profile_flags(serve, serve_flags);

  // bench
  auto* bench = app.add_subcommand("bench", "run a workload sweep");
  evstream::SweepConfig sweep;
  std::string profiles_csv = "native";
  std::vector<double> rates;
  std::vector<uint32_t> sizes;
  ProfileFlags bench_flags;
  std::string connect;
  std::vector<double> synth_params;
  std::string power_trace;
  double baseline_w = -1;
  bench->add_option("--rates", rates, "target rates, messages/second")->delimiter(',');
  bench->add_option("--sizes", sizes, "message sizes in bytes")->delimiter(',');
  bench->add_option("--duration", sweep.duration_s, "seconds per cell");
  bench->add_option("--publishers", sweep.publishers, "publisher connections");
  bench->add_option("--subscribers", sweep.subscribers, "subscriber connections");
  bench->add_option("--seed", sweep.seed, "payload seed");
  bench->add_option("--channel", sweep.channel, "event channel name");
  bench->add_option("--out", sweep.out_dir, "output directory")
      ->envname("EVSTREAM_OUT")
      ->required();
  bench->add_option("--connect", connect, "use an external server (host:port)");
  bench->add_option("--power-trace", power_trace, "power trace CSV replayed for energy");
  bench->add_option("--synthetic-power", synth_params,
                    "synthetic power model: p_idle,p_max,capacity")
      ->delimiter(',')
      ->expected(3);
  bench->add_option("--sample-hz", sweep.sample_hz, "synthetic trace sample rate");
  bench->add_option("--baseline-w", baseline_w, "idle baseline watts to subtract");
  bench->add_flag("--allow-any-size", sweep.allow_any_size,
                  "lift the default 64..512 byte size bounds");
  add_profile_flags(bench, bench_flags);
  bench_flags.profile = "native";

  // report
  auto* report = app.add_subcommand("report", "aggregate bench outputs");
  std::string report_dir;
  report->add_option("--out", report_dir, "bench output directory")
      ->envname("EVSTREAM_OUT")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (serve->parsed()) return run_serve(listen, serve_flags);

  if (bench->parsed()) {
    if (!rates.empty()) sweep.rates = rates;
    if (!sizes.empty()) sweep.sizes = sizes;
    sweep.profile_names.clear();
    std::string token;
    for (char c : bench_flags.profile + ",") {
      if (c == ',') {
        if (!token.empty()) sweep.profile_names.push_back(token);
        token.clear();
      } else {
        token += c;
      }
    }
    if (bench_flags.per_call_ns >= 0)
      sweep.per_call_ns = static_cast<uint64_t>(bench_flags.per_call_ns);
    if (bench_flags.per_byte_ns >= 0)
      sweep.per_byte_ns = static_cast<uint64_t>(bench_flags.per_byte_ns);
    if (bench_flags.epc_bytes >= 0) sweep.epc_bytes = static_cast<uint64_t>(bench_flags.epc_bytes);
    if (bench_flags.page_penalty_ns >= 0)
      sweep.page_penalty_ns = static_cast<uint64_t>(bench_flags.page_penalty_ns);
    if (!connect.empty()) {
      std::string host;
      uint16_t port = 0;
      if (!parse_listen(connect, host, port)) {
        std::fprintf(stderr, "invalid --connect address: %s\n", connect.c_str());
        return 1;
      }
      sweep.connect_host = host;
      sweep.connect_port = port;
    }
    if (!power_trace.empty()) sweep.power_trace_path = power_trace;
    if (!synth_params.empty()) {
      sweep.synthetic = {synth_params[0], synth_params[1], synth_params[2]};
    }
    if (baseline_w >= 0) sweep.baseline_w = baseline_w;

    auto outcome = evstream::run_bench_sweep(sweep);
    if (!outcome.ok()) {
      std::fprintf(stderr, "bench failed: %s\n", evstream::status_name(outcome.status()));
      return 1;
    }
    std::printf("bench: %u cells, %u failed; outputs in %s\n", outcome.value().cells_total,
                outcome.value().cells_failed, sweep.out_dir.c_str());
    return outcome.value().cells_failed == 0 ? 0 : 1;
  }

  if (report->parsed()) {
    auto r = evstream::build_report(report_dir);
    if (!r.ok()) {
      std::fprintf(stderr, "report failed: %s\n", evstream::status_name(r.status()));
      return 1;
    }
    std::printf("report written to %s\n", report_dir.c_str());
    return 0;
  }
  return 1;
}
