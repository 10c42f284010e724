#pragma once

#include <cstdint>
#include <utility>
#include <variant>

namespace evstream {

// One status vocabulary end to end: module results, wire reply codes and
// CLI exit paths all speak these values. Numeric values are part of the
// wire protocol (REPLY status byte) and must not be reordered.
enum class Status : uint8_t {
  Ok = 0,
  EmptyKey = 1,
  KeyTooLong = 2,
  ValueTooLarge = 3,
  NotFound = 4,
  InvalidGlob = 5,
  EmptyOpMask = 6,
  InvalidChannelName = 7,
  UnknownId = 8,
  UnknownSubscription = 9,
  Overflow = 10,
  BadFrame = 11,
  BadMagic = 12,
  UnsupportedVersion = 13,
  BodyTooLarge = 14,
  UnknownFrameType = 15,
  TooFewSamples = 16,
  NonMonotonicTime = 17,
  InvalidModel = 18,
  DegenerateInput = 19,
  ZeroMessages = 20,
  InvalidSpec = 21,
  ConnectionLost = 22,
  BindFailure = 23,
  InvalidProfile = 24,
  EmptyInput = 25,
  MissingInputs = 26,
  IoError = 27,
};

const char* status_name(Status s);

// Minimal value-or-status result. Kept deliberately small; the code base
// has no use for error payloads beyond the status code.
template <typename T>
class Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(Status s) : v_(s) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  Status status() const { return ok() ? Status::Ok : std::get<Status>(v_); }

  T& value() { return std::get<T>(v_); }
  const T& value() const { return std::get<T>(v_); }
  T&& take() { return std::move(std::get<T>(v_)); }

 private:
  std::variant<T, Status> v_;
};

template <>
class Result<void> {
 public:
  Result() : s_(Status::Ok) {}
  Result(Status s) : s_(s) {}

  bool ok() const { return s_ == Status::Ok; }
  explicit operator bool() const { return ok(); }
  Status status() const { return s_; }

 private:
  Status s_;
};

}  // namespace evstream
