#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "rvdse/isa/instruction.hpp"
#include "rvdse/isa/trace.hpp"

namespace rvdse::isa {

struct ArchState {
  std::array<std::uint32_t, 32> regs{};
  std::uint32_t pc = 0;
  std::vector<std::uint32_t> mem;  // word addressed, little-endian lanes
  std::uint32_t hart_id = 0;
  bool halted = false;
  HaltReason halt_reason = HaltReason::None;

  ArchState() = default;
  explicit ArchState(std::size_t memory_words) : mem(memory_words, 0) {}

  std::uint64_t hash() const;
};

// Executes exactly one instruction. Returns nothing when the instruction is
// Unsupported (the state is halted with a diagnostic reason instead).
// Halting: EBREAK, or an instruction that leaves pc and registers unchanged
// (the wrapper's terminal self-loop).
std::optional<RetirementRecord> step(ArchState& state);

// True when a retired instruction leaves the architectural state unchanged:
// it transfers control to itself and rewrites rd with the value it held.
bool is_terminal_loop(const RetirementRecord& r, std::uint32_t next_pc,
                      std::uint32_t previous_rd_value);

struct GoldenRun {
  RetirementTrace trace;
  ArchState final_state;
};

struct GoldenOptions {
  std::size_t memory_words = 1u << 16;
  std::uint32_t hart_id = 0;
  std::uint64_t max_steps = 50'000'000;
};

// Runs until halt. Throws StepLimitExceeded, or the failing step's error
// annotated with pc.
GoldenRun run_golden(const std::map<std::uint32_t, std::uint32_t>& image_words,
                     std::uint32_t entry_pc, const GoldenOptions& options = {});

}  // namespace rvdse::isa
