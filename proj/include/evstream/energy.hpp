#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "evstream/status.hpp"

namespace evstream {

struct PowerSample {
  double t_s = 0;      // seconds since run start
  double power_w = 0;  // whole-system watts
};

// Linear power model: idle floor rising linearly with utilization until the
// machine saturates at capacity.
struct SyntheticPowerModel {
  double p_idle_w = 0;
  double p_max_w = 0;
  double capacity_msgs_per_s = 0;

  Result<void> validate() const;
};

struct EnergyReport {
  double joules_total = 0;
  double joules_baseline = 0;
  uint64_t messages_delivered = 0;
  double joules_per_message = 0;
  bool valid = false;  // false when messages_delivered == 0 (flagged, not fatal)
};

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

// Trapezoidal rule over [first, last] sample times. Exact for the
// piecewise-linear traces both power sources produce.
Result<double> integrate(std::span<const PowerSample> samples);

// Constant power P = p_idle + (p_max - p_idle) * min(rate / capacity, 1),
// sampled at sample_hz over [0, duration_s] (endpoint included).
Result<std::vector<PowerSample>> synthesize_trace(const SyntheticPowerModel& model,
                                                  double achieved_rate, double duration_s,
                                                  double sample_hz);

// baseline energy = baseline_w * (last t - first t) when provided.
Result<EnergyReport> energy_per_message(std::span<const PowerSample> samples,
                                        uint64_t messages_delivered,
                                        std::optional<double> baseline_w);

// Ordinary least squares over (rate, watts) points.
Result<LinearFit> fit_linear(std::span<const std::pair<double, double>> points);

// Window [t0, t1] of a trace, linearly interpolating the edge samples.
std::vector<PowerSample> slice_trace(std::span<const PowerSample> samples, double t0, double t1);

// Power trace CSV: header "t_s,power_w", one sample per line, strictly
// increasing t_s.
Result<std::vector<PowerSample>> read_power_trace_csv(const std::string& path);
Result<void> write_power_trace_csv(const std::string& path, std::span<const PowerSample> samples);

}  // namespace evstream
