#pragma once

#include <cstdint>
#include <deque>
#include <optional>

#include "rvdse/error.hpp"

namespace rvdse::mem {
class MainMemory;
}

namespace rvdse::cpu {

enum class MemOp : std::uint8_t { Read, Write, Flush, Invalidate };

struct MemRequest {
  MemOp op = MemOp::Read;
  std::uint32_t addr = 0;  // byte address, word aligned
  std::uint32_t data = 0;  // lane-aligned write data
  std::uint8_t mask = 0xf;
};

struct MemResponse {
  std::uint32_t addr = 0;
  std::uint32_t data = 0;
  std::optional<ErrorKind> error;  // e.g. MemoryOutOfBounds; raised only if the instruction retires
};

// Valid/ready request-response contract between a core and whatever sits
// below it. A request may be issued in cycle `now` only when ready(); every
// request (writes included) produces exactly one response, in issue order,
// available from take_response(t) for t >= the cycle it completes.
class MemPort {
 public:
  virtual ~MemPort() = default;
  virtual bool ready() const = 0;
  virtual void issue(const MemRequest& req, std::uint64_t now) = 0;
  virtual std::optional<MemResponse> take_response(std::uint64_t now) = 0;
  virtual bool idle() const = 0;  // nothing in flight
};

// Direct port onto a MainMemory with a fixed latency. The functional effect
// happens at issue. Up to two requests may be in flight when latency <= 1
// (back-to-back pipelined access), one otherwise.
class FlatPort : public MemPort {
 public:
  FlatPort(mem::MainMemory& memory, unsigned latency);

  bool ready() const override;
  void issue(const MemRequest& req, std::uint64_t now) override;
  std::optional<MemResponse> take_response(std::uint64_t now) override;
  bool idle() const override { return pending_.empty(); }

  unsigned latency() const { return latency_; }
  std::uint64_t accesses() const { return accesses_; }

 private:
  struct Pending {
    MemResponse resp;
    std::uint64_t ready_at;
  };
  mem::MainMemory& memory_;
  unsigned latency_;
  std::deque<Pending> pending_;
  std::uint64_t accesses_ = 0;
};

// Serves the read-only hart-id word and forwards everything else.
class HartIdPort : public MemPort {
 public:
  HartIdPort(MemPort& inner, std::uint32_t hart_id, unsigned latency);

  bool ready() const override;
  void issue(const MemRequest& req, std::uint64_t now) override;
  std::optional<MemResponse> take_response(std::uint64_t now) override;
  bool idle() const override { return order_.empty() && inner_.idle(); }

 private:
  struct Slot {
    bool local;
    MemResponse resp;
    std::uint64_t ready_at;
  };
  MemPort& inner_;
  std::uint32_t hart_id_;
  unsigned latency_;
  std::deque<Slot> order_;
};

}  // namespace rvdse::cpu
