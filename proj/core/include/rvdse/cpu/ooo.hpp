#pragma once

#include <array>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "rvdse/cpu/core.hpp"

namespace rvdse::cpu {

enum class EntryStatus { Queued, Issued, Done };

struct OooEntry {
  std::uint64_t seq = 0;          // program order
  std::uint64_t inserted_at = 0;  // cycle the entry entered the queue
  std::uint32_t pc = 0;
  isa::DecodedInstruction d;
  bool unsupported = false;
  std::optional<ErrorKind> fault;
  std::string fault_detail;
  EntryStatus status = EntryStatus::Queued;
  int alu = -1;
  std::uint64_t done_at = 0;
  isa::ExecResult ex;
  std::uint32_t value = 0;
  bool mem_issued = false;
  isa::StoreLanes lanes;

  // Memory ops, EBREAK and faulting/unsupported entries never use an ALU;
  // they are handled when they reach the head of the window.
  bool commit_only() const;
  std::uint64_t age(std::uint64_t now) const { return now - inserted_at; }
};

struct AluState {
  unsigned latency = 1;
  std::uint64_t busy_until = 0;  // non-pipelined ALUs only
};

struct OooState {
  std::deque<OooEntry> window;  // oldest first: queued and issued entries
  std::vector<AluState> alus;
  bool pipelined = true;
  unsigned queue_length = 8;
  unsigned commit_capacity = 8;
  // In-flight writers per destination register.
  std::array<unsigned, 32> rd_table{};
  std::uint64_t now = 0;

  unsigned queued() const;
  unsigned issued() const;  // issued or done, not yet committed
  // No older in-flight entry writes one of the entry's sources.
  bool sources_ready(std::size_t index) const;
};

struct IssueDecision {
  std::size_t entry;
  unsigned alu;
};

// Oldest queued entry with no hazard and a free ALU; at most one per call.
// The oldest entry in the window may always issue, so a full commit buffer
// cannot deadlock.
std::optional<IssueDecision> ooo_schedule(const OooState& st);

struct CommitResult {
  OooEntry entry;       // removed from the window
  bool faulted = false; // entry.fault must be raised
};

// Retires the head when it is done. A memory op at the head issues its
// access when the port is ready and retires when the response arrives.
// Returns nothing when the head is not ready to leave.
std::optional<CommitResult> ooo_commit(OooState& st, MemPort& dport, const std::array<std::uint32_t, 32>& regs,
                                       std::uint64_t now);

class OooCore : public Core {
 public:
  OooCore(unsigned hart, std::uint32_t entry_pc, MemPort& iport, MemPort& dport, const OooParams& params);
  void tick(std::uint64_t now) override;

  const OooState& state() const { return st_; }

 private:
  MemPort& iport_;
  MemPort& dport_;
  OooState st_;
  std::uint64_t next_seq_ = 0;

  // front end
  std::uint32_t fetch_pc_;
  bool fetch_outstanding_ = false;
  std::uint32_t outstanding_pc_ = 0;
  bool fetch_blocked_ = false;  // after a control/halting instruction
  std::optional<std::uint64_t> unblock_at_;
  struct Fetched {
    std::uint32_t pc;
    std::uint32_t word;
    std::optional<ErrorKind> error;
  };
  std::optional<Fetched> fetched_;
  std::optional<OooEntry> decoded_;
};

}  // namespace rvdse::cpu
