#pragma once

#include <cstdint>
#include <string_view>

#include "evstream/status.hpp"

namespace evstream {

enum class ProtectionMode : uint8_t {
  Native = 0,
  EnclaveLike = 1,
  EncryptedVmLike = 2,
};

const char* mode_name(ProtectionMode mode);

// Parameterized emulation of hardware memory-protection cost, so protected
// and native configurations can be compared on one machine. per_call_ns is
// the fixed entry/exit tax per request, per_byte_ns models the memory
// encryption engine, and the paging penalty kicks in once the resident
// protected footprint exceeds the capacity of the protected region.
struct ProtectionProfile {
  ProtectionMode mode = ProtectionMode::Native;
  uint64_t per_call_ns = 0;
  uint64_t per_byte_ns = 0;
  uint64_t epc_capacity_bytes = kDefaultEpcCapacityBytes;
  uint64_t page_size_bytes = 4096;
  uint64_t page_fault_penalty_ns = 0;

  // Configuration default for the boot-time-limited protected region; an
  // order-of-magnitude stand-in, not a measured value.
  static constexpr uint64_t kDefaultEpcCapacityBytes = 96ull << 20;

  static ProtectionProfile native();
  // Shipped cost defaults are calibration placeholders; override per run.
  static ProtectionProfile enclave_like();
  static ProtectionProfile encrypted_vm_like();
  static Result<ProtectionProfile> by_name(std::string_view name);

  Result<void> validate() const;
};

// Pure: per_call + per_byte * request_bytes, plus
// page_fault_penalty * ceil(request_bytes / page_size) iff the resident
// protected footprint exceeds capacity. Native is always 0.
uint64_t overhead_ns(const ProtectionProfile& profile, uint64_t request_bytes,
                     uint64_t resident_protected_bytes);

}  // namespace evstream
