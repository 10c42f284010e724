#include "evstream/store.hpp"

namespace evstream {

Result<SetResult> Store::set(std::string_view key, std::string_view value) {
  if (key.empty()) return Status::EmptyKey;
  if (key.size() > kMaxKeyBytes) return Status::KeyTooLong;
  if (value.size() > kMaxValueBytes) return Status::ValueTooLarge;

  auto it = map_.find(key);
  SetResult res;
  if (it == map_.end()) {
    map_.emplace(std::string(key), Entry{std::string(value), 1});
    footprint_ += key.size() + value.size();
    res = {1, OpKind::Create};
  } else {
    footprint_ -= it->second.value.size();
    footprint_ += value.size();
    it->second.value.assign(value);
    it->second.version += 1;
    res = {it->second.version, OpKind::Update};
  }
  if (hook_) hook_(res.op, key, value);
  return res;
}

Result<std::string> Store::get(std::string_view key) {
  auto it = map_.find(key);
  if (it == map_.end()) return Status::NotFound;
  std::string value = it->second.value;
  if (hook_) hook_(OpKind::Read, key, value);
  return value;
}

Result<OpKind> Store::del(std::string_view key) {
  auto it = map_.find(key);
  if (it == map_.end()) return Status::NotFound;
  std::string removed = std::move(it->second.value);
  footprint_ -= key.size() + removed.size();
  map_.erase(it);
  if (hook_) hook_(OpKind::Delete, key, removed);
  return OpKind::Delete;
}

std::optional<uint64_t> Store::version_of(std::string_view key) const {
  auto it = map_.find(key);
  if (it == map_.end()) return std::nullopt;
  return it->second.version;
}

}  // namespace evstream
