#pragma once

#include <cstdint>

#include "rvdse/isa/instruction.hpp"

// Pure RV32I datapath functions shared by the golden model and every timing
// model. Timing models differ only in *when* these run and where operands
// come from.
namespace rvdse::isa {

// Read-only word returning the hart index. Sits above any configured memory.
inline constexpr std::uint32_t kHartIdAddress = 0xFFFFFFF0u;

struct ExecResult {
  std::uint32_t value = 0;     // rd value (ALU result, link address)
  std::uint32_t next_pc = 0;
  std::uint32_t mem_addr = 0;  // effective byte address for loads/stores
  bool taken = false;          // control transfer away from pc + 4
};

ExecResult execute(const DecodedInstruction& d, std::uint32_t pc, std::uint32_t rs1,
                   std::uint32_t rs2);

bool branch_taken(Mnemonic m, std::uint32_t a, std::uint32_t b);

// Throws MisalignedAccess when the access does not sit inside one naturally
// aligned unit.
void check_alignment(const DecodedInstruction& d, std::uint32_t addr);

// Selects and extends the lanes of `word` (the containing aligned word).
std::uint32_t load_extract(const DecodedInstruction& d, std::uint32_t addr, std::uint32_t word);

struct StoreLanes {
  std::uint32_t data = 0;  // value shifted into its byte lanes
  std::uint8_t mask = 0;   // byte enables, bit i = byte i of the word
};
StoreLanes store_lanes(const DecodedInstruction& d, std::uint32_t addr, std::uint32_t value);

inline std::uint32_t merge_lanes(std::uint32_t old_word, StoreLanes s) {
  std::uint32_t m = 0;
  for (unsigned i = 0; i < 4; ++i) {
    if (s.mask & (1u << i)) m |= 0xffu << (8 * i);
  }
  return (old_word & ~m) | (s.data & m);
}

}  // namespace rvdse::isa
