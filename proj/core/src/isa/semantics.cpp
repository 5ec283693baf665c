#include "rvdse/isa/semantics.hpp"

#include <cstdio>

#include "rvdse/error.hpp"

namespace rvdse::isa {

bool branch_taken(Mnemonic m, std::uint32_t a, std::uint32_t b) {
  const auto sa = static_cast<std::int32_t>(a);
  const auto sb = static_cast<std::int32_t>(b);
  switch (m) {
    case Mnemonic::BEQ: return a == b;
    case Mnemonic::BNE: return a != b;
    case Mnemonic::BLT: return sa < sb;
    case Mnemonic::BGE: return sa >= sb;
    case Mnemonic::BLTU: return a < b;
    case Mnemonic::BGEU: return a >= b;
    default: return false;
  }
}

ExecResult execute(const DecodedInstruction& d, std::uint32_t pc, std::uint32_t a,
                   std::uint32_t b) {
  ExecResult r;
  r.next_pc = pc + 4;
  const auto imm = static_cast<std::uint32_t>(d.imm);
  const auto sa = static_cast<std::int32_t>(a);
  switch (d.mnemonic) {
    case Mnemonic::LUI: r.value = imm; break;
    case Mnemonic::AUIPC: r.value = pc + imm; break;
    case Mnemonic::JAL:
      r.value = pc + 4;
      r.next_pc = pc + imm;
      r.taken = true;
      break;
    case Mnemonic::JALR:
      r.value = pc + 4;
      r.next_pc = (a + imm) & ~1u;
      r.taken = true;
      break;
    case Mnemonic::BEQ: case Mnemonic::BNE: case Mnemonic::BLT:
    case Mnemonic::BGE: case Mnemonic::BLTU: case Mnemonic::BGEU:
      if (branch_taken(d.mnemonic, a, b)) {
        r.next_pc = pc + imm;
        r.taken = true;
      }
      break;
    case Mnemonic::LB: case Mnemonic::LH: case Mnemonic::LW:
    case Mnemonic::LBU: case Mnemonic::LHU:
    case Mnemonic::SB: case Mnemonic::SH: case Mnemonic::SW:
      r.mem_addr = a + imm;
      break;
    case Mnemonic::ADDI: r.value = a + imm; break;
    case Mnemonic::SLTI: r.value = sa < d.imm ? 1 : 0; break;
    case Mnemonic::SLTIU: r.value = a < imm ? 1 : 0; break;
    case Mnemonic::XORI: r.value = a ^ imm; break;
    case Mnemonic::ORI: r.value = a | imm; break;
    case Mnemonic::ANDI: r.value = a & imm; break;
    case Mnemonic::SLLI: r.value = a << (imm & 31); break;
    case Mnemonic::SRLI: r.value = a >> (imm & 31); break;
    case Mnemonic::SRAI: r.value = static_cast<std::uint32_t>(sa >> (imm & 31)); break;
    case Mnemonic::ADD: r.value = a + b; break;
    case Mnemonic::SUB: r.value = a - b; break;
    case Mnemonic::SLL: r.value = a << (b & 31); break;
    case Mnemonic::SLT: r.value = sa < static_cast<std::int32_t>(b) ? 1 : 0; break;
    case Mnemonic::SLTU: r.value = a < b ? 1 : 0; break;
    case Mnemonic::XOR: r.value = a ^ b; break;
    case Mnemonic::SRL: r.value = a >> (b & 31); break;
    case Mnemonic::SRA: r.value = static_cast<std::uint32_t>(sa >> (b & 31)); break;
    case Mnemonic::OR: r.value = a | b; break;
    case Mnemonic::AND: r.value = a & b; break;
    case Mnemonic::EBREAK: case Mnemonic::Unsupported: break;
  }
  return r;
}

void check_alignment(const DecodedInstruction& d, std::uint32_t addr) {
  const unsigned bytes = d.access_bytes();
  if (bytes > 1 && (addr & (bytes - 1)) != 0) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%u-byte access at 0x%08x", bytes, addr);
    throw Error(ErrorKind::MisalignedAccess, buf);
  }
}

std::uint32_t load_extract(const DecodedInstruction& d, std::uint32_t addr, std::uint32_t word) {
  const unsigned shift = (addr & 3) * 8;
  const std::uint32_t v = word >> shift;
  switch (d.mnemonic) {
    case Mnemonic::LB: return static_cast<std::uint32_t>(static_cast<std::int8_t>(v & 0xff));
    case Mnemonic::LBU: return v & 0xff;
    case Mnemonic::LH: return static_cast<std::uint32_t>(static_cast<std::int16_t>(v & 0xffff));
    case Mnemonic::LHU: return v & 0xffff;
    default: return word;
  }
}

StoreLanes store_lanes(const DecodedInstruction& d, std::uint32_t addr, std::uint32_t value) {
  const unsigned lane = addr & 3;
  switch (d.mnemonic) {
    case Mnemonic::SB:
      return {(value & 0xff) << (8 * lane), static_cast<std::uint8_t>(1u << lane)};
    case Mnemonic::SH:
      return {(value & 0xffff) << (8 * lane), static_cast<std::uint8_t>(3u << lane)};
    default:
      return {value, 0xf};
  }
}

}  // namespace rvdse::isa
