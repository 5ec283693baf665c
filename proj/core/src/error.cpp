#include "rvdse/error.hpp"

#include <cstdio>

namespace rvdse {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IllegalInstruction: return "IllegalInstruction";
    case ErrorKind::MemoryOutOfBounds: return "MemoryOutOfBounds";
    case ErrorKind::MisalignedAccess: return "MisalignedAccess";
    case ErrorKind::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ImmediateOutOfRange: return "ImmediateOutOfRange";
    case ErrorKind::UndefinedLabel: return "UndefinedLabel";
    case ErrorKind::DuplicateLabel: return "DuplicateLabel";
    case ErrorKind::MalformedToken: return "MalformedToken";
    case ErrorKind::AddressOverflow: return "AddressOverflow";
    case ErrorKind::MissingHartMain: return "MissingHartMain";
    case ErrorKind::InvalidStackLayout: return "InvalidStackLayout";
    case ErrorKind::MisalignedAddress: return "MisalignedAddress";
    case ErrorKind::ProtocolViolation: return "ProtocolViolation";
    case ErrorKind::AddressUnmapped: return "AddressUnmapped";
    case ErrorKind::UnreachableDestination: return "UnreachableDestination";
    case ErrorKind::InvalidTopology: return "InvalidTopology";
    case ErrorKind::ProgramImageTooLarge: return "ProgramImageTooLarge";
    case ErrorKind::CycleLimitExceeded: return "CycleLimitExceeded";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, std::string detail) : kind_(kind), detail_(std::move(detail)) {
  rebuild();
}

void Error::rebuild() {
  what_ = error_kind_name(kind_);
  char buf[64];
  if (hart_) {
    std::snprintf(buf, sizeof buf, " [hart %d]", *hart_);
    what_ += buf;
  }
  if (cycle_) {
    std::snprintf(buf, sizeof buf, " [cycle %llu]", static_cast<unsigned long long>(*cycle_));
    what_ += buf;
  }
  if (pc_) {
    std::snprintf(buf, sizeof buf, " [pc 0x%08x]", *pc_);
    what_ += buf;
  }
  if (line_) {
    std::snprintf(buf, sizeof buf, " [line %d]", *line_);
    what_ += buf;
  }
  what_ += ": ";
  what_ += detail_;
}

Error& Error::at_pc(std::uint32_t value) {
  pc_ = value;
  rebuild();
  return *this;
}

Error& Error::at_cycle(std::uint64_t value) {
  cycle_ = value;
  rebuild();
  return *this;
}

Error& Error::at_line(int value) {
  line_ = value;
  rebuild();
  return *this;
}

Error& Error::at_hart(int value) {
  hart_ = value;
  rebuild();
  return *this;
}

}  // namespace rvdse
