#include "evstream/energy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace evstream {

Result<void> SyntheticPowerModel::validate() const {
  if (!(std::isfinite(p_idle_w) && std::isfinite(p_max_w) && std::isfinite(capacity_msgs_per_s)))
    return Status::InvalidModel;
  if (!(p_idle_w > 0 && p_max_w >= p_idle_w && capacity_msgs_per_s > 0))
    return Status::InvalidModel;
  return {};
}

Result<double> integrate(std::span<const PowerSample> samples) {
  if (samples.size() < 2) return Status::TooFewSamples;
  double joules = 0;
  for (size_t i = 1; i < samples.size(); ++i) {
    const auto& a = samples[i - 1];
    const auto& b = samples[i];
    if (!(b.t_s > a.t_s)) return Status::NonMonotonicTime;
    if (!(std::isfinite(a.power_w) && std::isfinite(b.power_w)) || a.power_w < 0 ||
        b.power_w < 0) {
      return Status::InvalidModel;
    }
    joules += 0.5 * (a.power_w + b.power_w) * (b.t_s - a.t_s);
  }
  return joules;
}

Result<std::vector<PowerSample>> synthesize_trace(const SyntheticPowerModel& model,
                                                  double achieved_rate, double duration_s,
                                                  double sample_hz) {
  if (auto v = model.validate(); !v.ok()) return v.status();
  if (!(sample_hz > 0) || !(duration_s > 0) || achieved_rate < 0) return Status::InvalidModel;

  const double utilization = std::min(achieved_rate / model.capacity_msgs_per_s, 1.0);
  const double watts = model.p_idle_w + (model.p_max_w - model.p_idle_w) * utilization;

  std::vector<PowerSample> out;
  for (uint64_t k = 0;; ++k) {
    const double t = static_cast<double>(k) / sample_hz;
    if (t >= duration_s) break;
    out.push_back({t, watts});
  }
  out.push_back({duration_s, watts});
  return out;
}

Result<EnergyReport> energy_per_message(std::span<const PowerSample> samples,
                                        uint64_t messages_delivered,
                                        std::optional<double> baseline_w) {
  auto joules = integrate(samples);
  if (!joules.ok()) return joules.status();

  EnergyReport report;
  report.joules_total = joules.value();
  if (baseline_w) {
    const double span = samples.back().t_s - samples.front().t_s;
    report.joules_baseline = *baseline_w * span;
  }
  report.messages_delivered = messages_delivered;
  if (messages_delivered > 0) {
    report.joules_per_message =
        (report.joules_total - report.joules_baseline) / static_cast<double>(messages_delivered);
    report.valid = true;
  }
  return report;
}

Result<LinearFit> fit_linear(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) return Status::DegenerateInput;

  double sx = 0, sy = 0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n, my = sy / n;

  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0) return Status::DegenerateInput;  // all rates identical

  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0) {
    fit.r2 = 1.0;  // flat data, exactly reproduced by the flat line
  } else {
    double ss_res = 0;
    for (const auto& [x, y] : points) {
      const double e = y - (fit.intercept + fit.slope * x);
      ss_res += e * e;
    }
    fit.r2 = 1.0 - ss_res / syy;
  }
  return fit;
}

std::vector<PowerSample> slice_trace(std::span<const PowerSample> samples, double t0, double t1) {
  std::vector<PowerSample> out;
  if (samples.size() < 2 || !(t1 > t0)) return out;
  t0 = std::max(t0, samples.front().t_s);
  t1 = std::min(t1, samples.back().t_s);
  if (!(t1 > t0)) return out;

  auto power_at = [&](double t) {
    auto it = std::lower_bound(samples.begin(), samples.end(), t,
                               [](const PowerSample& s, double v) { return s.t_s < v; });
    if (it == samples.begin()) return it->power_w;
    if (it == samples.end()) return samples.back().power_w;
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double f = (t - a.t_s) / (b.t_s - a.t_s);
    return a.power_w + f * (b.power_w - a.power_w);
  };

  out.push_back({t0, power_at(t0)});
  for (const auto& s : samples) {
    if (s.t_s > t0 && s.t_s < t1) out.push_back(s);
  }
  out.push_back({t1, power_at(t1)});
  return out;
}

Result<std::vector<PowerSample>> read_power_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) return Status::IoError;
  std::string line;
  if (!std::getline(in, line)) return Status::IoError;
  // tolerate a trailing \r from CRLF files
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t_s,power_w") return Status::IoError;

  std::vector<PowerSample> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    PowerSample s;
    char extra;
    if (std::sscanf(line.c_str(), "%lf,%lf %c", &s.t_s, &s.power_w, &extra) != 2)
      return Status::IoError;
    if (!out.empty() && !(s.t_s > out.back().t_s)) return Status::NonMonotonicTime;
    if (!std::isfinite(s.power_w) || s.power_w < 0) return Status::InvalidModel;
    out.push_back(s);
  }
  if (out.size() < 2) return Status::TooFewSamples;
  return out;
}

Result<void> write_power_trace_csv(const std::string& path,
                                   std::span<const PowerSample> samples) {
  std::ofstream out(path);
  if (!out) return Status::IoError;
  out << "t_s,power_w\n";
  char buf[80];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g\n", s.t_s, s.power_w);
    out << buf;
  }
  return out.good() ? Result<void>{} : Status::IoError;
}

}  // namespace evstream
