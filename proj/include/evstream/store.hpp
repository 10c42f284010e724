#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "evstream/status.hpp"
#include "evstream/types.hpp"

namespace evstream {

struct SetResult {
  uint64_t version = 0;
  OpKind op = OpKind::Create;
};

// In-memory key-value store. Classifies every mutation as Create/Update/
// Delete by key presence immediately before the command, and hands each
// successful command to the mutation hook exactly once (reads included).
//
// Not internally synchronized: the owner runs all commands on one
// serialized command sequence (the server's single command loop).
class Store {
 public:
  using MutationHook = std::function<void(OpKind, std::string_view key, std::string_view value)>;

  void set_hook(MutationHook hook) { hook_ = std::move(hook); }

  // First write of a key is Create with version 1; later writes are Update
  // and bump the per-entry version. Deleting an entry discards its version
  // history: a re-created key starts at version 1 again.
  Result<SetResult> set(std::string_view key, std::string_view value);

  // Dispatches Read for present keys.
  Result<std::string> get(std::string_view key);

  // Dispatches Delete for present keys; absent keys fail without dispatch.
  Result<OpKind> del(std::string_view key);

  size_t entry_count() const { return map_.size(); }

  // Sum of key + value bytes across live entries; this is the resident
  // protected footprint the protection model compares against capacity.
  uint64_t footprint_bytes() const { return footprint_; }

  std::optional<uint64_t> version_of(std::string_view key) const;

 private:
  struct Entry {
    std::string value;
    uint64_t version = 0;
  };

  struct StringHash {
    using is_transparent = void;
    size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };

  std::unordered_map<std::string, Entry, StringHash, std::equal_to<>> map_;
  uint64_t footprint_ = 0;
  MutationHook hook_;
};

}  // namespace evstream
