#include "evstream/clock.hpp"

#include <ctime>

namespace evstream {

uint64_t monotonic_ns() {
  timespec ts{};
  clock_gettime(CLOCK_MONOTONIC, &ts);
  return static_cast<uint64_t>(ts.tv_sec) * 1000000000ull + static_cast<uint64_t>(ts.tv_nsec);
}

void sleep_until_ns(uint64_t deadline_ns) {
  timespec ts{};
  ts.tv_sec = static_cast<time_t>(deadline_ns / 1000000000ull);
  ts.tv_nsec = static_cast<long>(deadline_ns % 1000000000ull);
  while (clock_nanosleep(CLOCK_MONOTONIC, TIMER_ABSTIME, &ts, nullptr) != 0) {
  }
}

void delay_precise_ns(uint64_t delay_ns) {
  if (delay_ns == 0) return;
  const uint64_t deadline = monotonic_ns() + delay_ns;
  // nanosleep wakes tens of microseconds late; only use it when there is
  // enough slack to absorb that, then spin out the rest.
  constexpr uint64_t kSpinTailNs = 400000;
  if (delay_ns > kSpinTailNs) {
    sleep_until_ns(deadline - kSpinTailNs);
  }
  while (monotonic_ns() < deadline) {
  }
}

}  // namespace evstream
