#include "evstream/status.hpp"

#include "evstream/types.hpp"

namespace evstream {

const char* status_name(Status s) {
  switch (s) {
    case Status::Ok: return "Ok";
    case Status::EmptyKey: return "EmptyKey";
    case Status::KeyTooLong: return "KeyTooLong";
    case Status::ValueTooLarge: return "ValueTooLarge";
    case Status::NotFound: return "NotFound";
    case Status::InvalidGlob: return "InvalidGlob";
    case Status::EmptyOpMask: return "EmptyOpMask";
    case Status::InvalidChannelName: return "InvalidChannelName";
    case Status::UnknownId: return "UnknownId";
    case Status::UnknownSubscription: return "UnknownSubscription";
    case Status::Overflow: return "Overflow";
    case Status::BadFrame: return "BadFrame";
    case Status::BadMagic: return "BadMagic";
    case Status::UnsupportedVersion: return "UnsupportedVersion";
    case Status::BodyTooLarge: return "BodyTooLarge";
    case Status::UnknownFrameType: return "UnknownFrameType";
    case Status::TooFewSamples: return "TooFewSamples";
    case Status::NonMonotonicTime: return "NonMonotonicTime";
    case Status::InvalidModel: return "InvalidModel";
    case Status::DegenerateInput: return "DegenerateInput";
    case Status::ZeroMessages: return "ZeroMessages";
    case Status::InvalidSpec: return "InvalidSpec";
    case Status::ConnectionLost: return "ConnectionLost";
    case Status::BindFailure: return "BindFailure";
    case Status::InvalidProfile: return "InvalidProfile";
    case Status::EmptyInput: return "EmptyInput";
    case Status::MissingInputs: return "MissingInputs";
    case Status::IoError: return "IoError";
  }
  return "Unknown";
}

const char* op_name(OpKind op) {
  switch (op) {
    case OpKind::Create: return "Create";
    case OpKind::Read: return "Read";
    case OpKind::Update: return "Update";
    case OpKind::Delete: return "Delete";
  }
  return "Unknown";
}

}  // namespace evstream
