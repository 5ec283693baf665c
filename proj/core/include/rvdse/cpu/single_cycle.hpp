#pragma once

#include "rvdse/cpu/core.hpp"

namespace rvdse::cpu {

// One instruction at a time: fetch, execute, optional data access, retire.
// The next fetch is issued in the cycle the current instruction retires, so
// with zero-latency memory every cycle retires one instruction, and with
// synchronous memory each data access costs one extra (NOP) cycle.
class SingleCycleCore : public Core {
 public:
  SingleCycleCore(unsigned hart, std::uint32_t entry_pc, MemPort& iport, MemPort& dport);
  void tick(std::uint64_t now) override;

 private:
  enum class Phase { NeedFetch, WaitFetch, NeedData, WaitData };

  void execute_fetched(std::uint32_t word, std::uint64_t now);
  bool try_issue_data(std::uint64_t now);
  void finish(std::uint32_t value, std::uint64_t now);

  MemPort& iport_;
  MemPort& dport_;
  Phase phase_ = Phase::NeedFetch;
  std::uint32_t pc_;
  isa::DecodedInstruction cur_;
  isa::ExecResult ex_;
  isa::StoreLanes lanes_;
  bool retired_this_cycle_ = false;
};

}  // namespace rvdse::cpu
