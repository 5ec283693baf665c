#pragma once

#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <string_view>

namespace rvdse {

enum class ErrorKind {
  IllegalInstruction,
  MemoryOutOfBounds,
  MisalignedAccess,
  StepLimitExceeded,
  ParseError,
  ImmediateOutOfRange,
  UndefinedLabel,
  DuplicateLabel,
  MalformedToken,
  AddressOverflow,
  MissingHartMain,
  InvalidStackLayout,
  MisalignedAddress,
  ProtocolViolation,
  AddressUnmapped,
  UnreachableDestination,
  InvalidTopology,
  ProgramImageTooLarge,
  CycleLimitExceeded,
  InvalidConfig,
};

std::string_view error_kind_name(ErrorKind kind);

// Single exception type for the whole library. Context fields are filled in
// as the error propagates outward (decoder -> core -> system).
class Error : public std::exception {
 public:
  Error(ErrorKind kind, std::string detail);

  ErrorKind kind() const { return kind_; }
  const std::string& detail() const { return detail_; }
  const char* what() const noexcept override { return what_.c_str(); }

  const std::optional<std::uint32_t>& pc() const { return pc_; }
  const std::optional<std::uint64_t>& cycle() const { return cycle_; }
  const std::optional<int>& line() const { return line_; }
  const std::optional<int>& hart() const { return hart_; }

  Error& at_pc(std::uint32_t value);
  Error& at_cycle(std::uint64_t value);
  Error& at_line(int value);
  Error& at_hart(int value);

 private:
  void rebuild();

  ErrorKind kind_;
  std::string detail_;
  std::string what_;
  std::optional<std::uint32_t> pc_;
  std::optional<std::uint64_t> cycle_;
  std::optional<int> line_;
  std::optional<int> hart_;
};

}  // namespace rvdse
