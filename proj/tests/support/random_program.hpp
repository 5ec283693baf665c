#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "rvdse/isa/instruction.hpp"

namespace rvdse::testing {

// Random straight-line-ish code: register setup, ALU ops, loads and stores
// through x31 into a sandbox, and forward branches. Ends in a self-loop.
inline std::vector<std::uint32_t> random_program(std::mt19937& rng, int length) {
  using isa::make;
  using M = isa::Mnemonic;
  std::vector<std::uint32_t> code;
  auto reg = [&] { return 1 + rng() % 30; };
  for (unsigned r = 1; r < 31; ++r) {
    code.push_back(make(M::LUI, r, 0, 0, static_cast<std::int32_t>(rng() & 0xfffff000u)).raw);
    code.push_back(make(M::ADDI, r, r, 0, static_cast<std::int32_t>(rng() % 4096) - 2048).raw);
  }
  code.push_back(make(M::LUI, 31, 0, 0, 0x1000).raw);  // sandbox at 0x1000
  static constexpr M kR[] = {M::ADD, M::SUB, M::SLL, M::SLT, M::SLTU, M::XOR, M::SRL, M::SRA, M::OR, M::AND};
  static constexpr M kI[] = {M::ADDI, M::SLTI, M::SLTIU, M::XORI, M::ORI, M::ANDI};
  static constexpr M kSh[] = {M::SLLI, M::SRLI, M::SRAI};
  static constexpr M kB[] = {M::BEQ, M::BNE, M::BLT, M::BGE, M::BLTU, M::BGEU};
  for (int i = 0; i < length; ++i) {
    const unsigned k = rng() % 100;
    const int left = length - i;
    if (k < 35) {
      code.push_back(make(kR[rng() % 10], rng() % 31, reg(), reg(), 0).raw);
    } else if (k < 55) {
      code.push_back(make(kI[rng() % 6], rng() % 31, reg(), 0, static_cast<std::int32_t>(rng() % 4096) - 2048).raw);
    } else if (k < 62) {
      code.push_back(make(kSh[rng() % 3], rng() % 31, reg(), 0, static_cast<std::int32_t>(rng() % 32)).raw);
    } else if (k < 66) {
      code.push_back(make(rng() & 1 ? M::LUI : M::AUIPC, reg(), 0, 0, static_cast<std::int32_t>(rng() & 0xfffff000u)).raw);
    } else if (k < 78) {
      static constexpr M kS[] = {M::SB, M::SH, M::SW};
      const unsigned w = rng() % 3;
      const std::int32_t off = static_cast<std::int32_t>((rng() % 256) & ~((1u << w) - 1));
      code.push_back(make(kS[w], 0, 31, reg(), off).raw);
    } else if (k < 90) {
      static constexpr M kL[] = {M::LB, M::LBU, M::LH, M::LHU, M::LW};
      const unsigned c = rng() % 5;
      const unsigned w = c < 2 ? 0 : c < 4 ? 1 : 2;
      const std::int32_t off = static_cast<std::int32_t>((rng() % 256) & ~((1u << w) - 1));
      code.push_back(make(kL[c], reg(), 31, 0, off).raw);
    } else if (left > 2) {
      const int skip = 1 + static_cast<int>(rng() % std::min(left - 1, 6));
      code.push_back(make(kB[rng() % 6], 0, reg(), reg(), 4 * (skip + 1)).raw);
    } else {
      code.push_back(isa::kNop);
    }
  }
  code.push_back(make(M::JAL, 0, 0, 0, 0).raw);
  return code;
}


}  // namespace rvdse::testing
