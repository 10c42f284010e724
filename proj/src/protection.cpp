#include "evstream/protection.hpp"

namespace evstream {

const char* mode_name(ProtectionMode mode) {
  switch (mode) {
    case ProtectionMode::Native: return "native";
    case ProtectionMode::EnclaveLike: return "enclave_like";
    case ProtectionMode::EncryptedVmLike: return "encrypted_vm_like";
  }
  return "unknown";
}

ProtectionProfile ProtectionProfile::native() {
  ProtectionProfile p;
  p.mode = ProtectionMode::Native;
  return p;
}

ProtectionProfile ProtectionProfile::enclave_like() {
  ProtectionProfile p;
  p.mode = ProtectionMode::EnclaveLike;
  p.per_call_ns = 2500;
  p.per_byte_ns = 25;
  p.epc_capacity_bytes = kDefaultEpcCapacityBytes;
  p.page_size_bytes = 4096;
  p.page_fault_penalty_ns = 25000;
  return p;
}

ProtectionProfile ProtectionProfile::encrypted_vm_like() {
  ProtectionProfile p;
  p.mode = ProtectionMode::EncryptedVmLike;
  p.per_call_ns = 1200;
  p.per_byte_ns = 8;
  // No boot-time-limited page cache analogue on this side: capacity is
  // effectively unbounded and paging never triggers.
  p.epc_capacity_bytes = (1ull << 46);
  p.page_size_bytes = 4096;
  p.page_fault_penalty_ns = 0;
  return p;
}

Result<ProtectionProfile> ProtectionProfile::by_name(std::string_view name) {
  if (name == "native") return native();
  if (name == "enclave_like") return enclave_like();
  if (name == "encrypted_vm_like") return encrypted_vm_like();
  return Status::InvalidProfile;
}

Result<void> ProtectionProfile::validate() const {
  if (page_size_bytes == 0) return Status::InvalidProfile;
  if (epc_capacity_bytes % page_size_bytes != 0) return Status::InvalidProfile;
  if (mode == ProtectionMode::Native &&
      (per_call_ns != 0 || per_byte_ns != 0 || page_fault_penalty_ns != 0)) {
    return Status::InvalidProfile;
  }
  return {};
}

uint64_t overhead_ns(const ProtectionProfile& profile, uint64_t request_bytes,
                     uint64_t resident_protected_bytes) {
  if (profile.mode == ProtectionMode::Native) return 0;
  uint64_t total = profile.per_call_ns + profile.per_byte_ns * request_bytes;
  if (resident_protected_bytes > profile.epc_capacity_bytes && request_bytes > 0) {
    uint64_t pages = (request_bytes + profile.page_size_bytes - 1) / profile.page_size_bytes;
    total += profile.page_fault_penalty_ns * pages;
  }
  return total;
}

}  // namespace evstream
