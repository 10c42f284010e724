#pragma once

#include <cstdint>

namespace evstream {

// All timestamps in the system come from CLOCK_MONOTONIC on one host, so
// publisher, server and subscriber clocks are directly comparable.
uint64_t monotonic_ns();

// Sleep until an absolute monotonic deadline. Granularity is whatever the
// kernel gives us (tens of microseconds); callers that need precision use
// delay_precise_ns instead.
void sleep_until_ns(uint64_t deadline_ns);

// Delay with sub-microsecond accuracy: sleeps for the bulk of long delays
// and spins out the tail on the monotonic clock. Used for the protection
// overhead, where plain nanosleep granularity would swamp the modeled cost.
void delay_precise_ns(uint64_t delay_ns);

}  // namespace evstream
