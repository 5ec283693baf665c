#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rvdse::isa {

enum class Mnemonic : std::uint8_t {
  LUI, AUIPC, JAL, JALR,
  BEQ, BNE, BLT, BGE, BLTU, BGEU,
  LB, LH, LW, LBU, LHU,
  SB, SH, SW,
  ADDI, SLTI, SLTIU, XORI, ORI, ANDI, SLLI, SRLI, SRAI,
  ADD, SUB, SLL, SLT, SLTU, XOR, SRL, SRA, OR, AND,
  EBREAK,
  // FENCE, FENCE.I, ECALL and the CSR forms. Decodes, never executes.
  Unsupported,
};

enum class Format : std::uint8_t { R, I, S, B, U, J };

struct DecodedInstruction {
  Mnemonic mnemonic = Mnemonic::ADDI;
  Format format = Format::I;
  std::uint8_t rd = 0;
  std::uint8_t rs1 = 0;
  std::uint8_t rs2 = 0;
  std::int32_t imm = 0;
  std::uint32_t raw = 0x00000013;

  bool operator==(const DecodedInstruction&) const = default;

  bool is_load() const;
  bool is_store() const;
  bool is_memory() const { return is_load() || is_store(); }
  bool is_branch() const;
  bool is_jump() const { return mnemonic == Mnemonic::JAL || mnemonic == Mnemonic::JALR; }
  bool is_control() const { return is_branch() || is_jump(); }
  bool writes_rd() const;
  bool reads_rs1() const;
  bool reads_rs2() const;
  // Access width in bytes for loads/stores, 0 otherwise.
  unsigned access_bytes() const;
};

// Throws Error(IllegalInstruction) for encodings outside RV32I.
DecodedInstruction decode(std::uint32_t word);
std::optional<DecodedInstruction> try_decode(std::uint32_t word);

// Builds the 32-bit encoding from the fields. Unsupported returns raw.
std::uint32_t encode(const DecodedInstruction& inst);

// Builds a DecodedInstruction (raw filled in) from fields. Immediates are
// checked against the format's range; throws ImmediateOutOfRange.
DecodedInstruction make(Mnemonic m, unsigned rd, unsigned rs1, unsigned rs2, std::int32_t imm);

Format format_of(Mnemonic m);
std::string_view mnemonic_name(Mnemonic m);
std::optional<Mnemonic> mnemonic_from_name(std::string_view lower_name);

// "addi x1, x0, 5", "lw x5, 8(x2)", "beq x1, x2, -16". Round-trips through
// the assembler.
std::string disassemble(const DecodedInstruction& inst);

inline constexpr std::uint32_t kNop = 0x00000013;
inline constexpr std::uint32_t kEbreak = 0x00100073;

}  // namespace rvdse::isa
