#include "rvdse/isa/instruction.hpp"

#include <array>
#include <cstdio>

#include "rvdse/error.hpp"

namespace rvdse::isa {

namespace {

constexpr std::uint32_t kOpLui = 0x37;
constexpr std::uint32_t kOpAuipc = 0x17;
constexpr std::uint32_t kOpJal = 0x6f;
constexpr std::uint32_t kOpJalr = 0x67;
constexpr std::uint32_t kOpBranch = 0x63;
constexpr std::uint32_t kOpLoad = 0x03;
constexpr std::uint32_t kOpStore = 0x23;
constexpr std::uint32_t kOpImm = 0x13;
constexpr std::uint32_t kOpReg = 0x33;
constexpr std::uint32_t kOpFence = 0x0f;
constexpr std::uint32_t kOpSystem = 0x73;

constexpr std::int32_t sext(std::uint32_t value, unsigned bits) {
  const std::uint32_t m = 1u << (bits - 1);
  value &= (bits == 32) ? 0xffffffffu : ((1u << bits) - 1);
  return static_cast<std::int32_t>((value ^ m) - m);
}

std::int32_t imm_i(std::uint32_t w) { return sext(w >> 20, 12); }
std::int32_t imm_s(std::uint32_t w) { return sext(((w >> 25) << 5) | ((w >> 7) & 0x1f), 12); }
std::int32_t imm_b(std::uint32_t w) {
  const std::uint32_t v = (((w >> 31) & 1) << 12) | (((w >> 7) & 1) << 11) |
                          (((w >> 25) & 0x3f) << 5) | (((w >> 8) & 0xf) << 1);
  return sext(v, 13);
}
std::int32_t imm_u(std::uint32_t w) { return static_cast<std::int32_t>(w & 0xfffff000u); }
std::int32_t imm_j(std::uint32_t w) {
  const std::uint32_t v = (((w >> 31) & 1) << 20) | (((w >> 12) & 0xff) << 12) |
                          (((w >> 20) & 1) << 11) | (((w >> 21) & 0x3ff) << 1);
  return sext(v, 21);
}

struct MnemonicInfo {
  Mnemonic m;
  std::string_view name;
  Format format;
  std::uint32_t opcode;
  std::uint32_t funct3;
  std::uint32_t funct7;
};

constexpr std::array<MnemonicInfo, 39> kTable{{
    {Mnemonic::LUI, "lui", Format::U, kOpLui, 0, 0},
    {Mnemonic::AUIPC, "auipc", Format::U, kOpAuipc, 0, 0},
    {Mnemonic::JAL, "jal", Format::J, kOpJal, 0, 0},
    {Mnemonic::JALR, "jalr", Format::I, kOpJalr, 0, 0},
    {Mnemonic::BEQ, "beq", Format::B, kOpBranch, 0, 0},
    {Mnemonic::BNE, "bne", Format::B, kOpBranch, 1, 0},
    {Mnemonic::BLT, "blt", Format::B, kOpBranch, 4, 0},
    {Mnemonic::BGE, "bge", Format::B, kOpBranch, 5, 0},
    {Mnemonic::BLTU, "bltu", Format::B, kOpBranch, 6, 0},
    {Mnemonic::BGEU, "bgeu", Format::B, kOpBranch, 7, 0},
    {Mnemonic::LB, "lb", Format::I, kOpLoad, 0, 0},
    {Mnemonic::LH, "lh", Format::I, kOpLoad, 1, 0},
    {Mnemonic::LW, "lw", Format::I, kOpLoad, 2, 0},
    {Mnemonic::LBU, "lbu", Format::I, kOpLoad, 4, 0},
    {Mnemonic::LHU, "lhu", Format::I, kOpLoad, 5, 0},
    {Mnemonic::SB, "sb", Format::S, kOpStore, 0, 0},
    {Mnemonic::SH, "sh", Format::S, kOpStore, 1, 0},
    {Mnemonic::SW, "sw", Format::S, kOpStore, 2, 0},
    {Mnemonic::ADDI, "addi", Format::I, kOpImm, 0, 0},
    {Mnemonic::SLTI, "slti", Format::I, kOpImm, 2, 0},
    {Mnemonic::SLTIU, "sltiu", Format::I, kOpImm, 3, 0},
    {Mnemonic::XORI, "xori", Format::I, kOpImm, 4, 0},
    {Mnemonic::ORI, "ori", Format::I, kOpImm, 6, 0},
    {Mnemonic::ANDI, "andi", Format::I, kOpImm, 7, 0},
    {Mnemonic::SLLI, "slli", Format::I, kOpImm, 1, 0x00},
    {Mnemonic::SRLI, "srli", Format::I, kOpImm, 5, 0x00},
    {Mnemonic::SRAI, "srai", Format::I, kOpImm, 5, 0x20},
    {Mnemonic::ADD, "add", Format::R, kOpReg, 0, 0x00},
    {Mnemonic::SUB, "sub", Format::R, kOpReg, 0, 0x20},
    {Mnemonic::SLL, "sll", Format::R, kOpReg, 1, 0x00},
    {Mnemonic::SLT, "slt", Format::R, kOpReg, 2, 0x00},
    {Mnemonic::SLTU, "sltu", Format::R, kOpReg, 3, 0x00},
    {Mnemonic::XOR, "xor", Format::R, kOpReg, 4, 0x00},
    {Mnemonic::SRL, "srl", Format::R, kOpReg, 5, 0x00},
    {Mnemonic::SRA, "sra", Format::R, kOpReg, 5, 0x20},
    {Mnemonic::OR, "or", Format::R, kOpReg, 6, 0x00},
    {Mnemonic::AND, "and", Format::R, kOpReg, 7, 0x00},
    {Mnemonic::EBREAK, "ebreak", Format::I, kOpSystem, 0, 0},
    {Mnemonic::Unsupported, "unsupported", Format::I, kOpSystem, 0, 0},
}};

const MnemonicInfo& info(Mnemonic m) { return kTable[static_cast<std::size_t>(m)]; }

bool is_shift_imm(Mnemonic m) {
  return m == Mnemonic::SLLI || m == Mnemonic::SRLI || m == Mnemonic::SRAI;
}

Error illegal(std::uint32_t word) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "encoding 0x%08x is not RV32I", word);
  return Error(ErrorKind::IllegalInstruction, buf);
}

DecodedInstruction fill(Mnemonic m, std::uint32_t w) {
  DecodedInstruction d;
  d.mnemonic = m;
  d.format = info(m).format;
  d.raw = w;
  const auto rd = static_cast<std::uint8_t>((w >> 7) & 0x1f);
  const auto rs1 = static_cast<std::uint8_t>((w >> 15) & 0x1f);
  const auto rs2 = static_cast<std::uint8_t>((w >> 20) & 0x1f);
  switch (d.format) {
    case Format::R: d.rd = rd; d.rs1 = rs1; d.rs2 = rs2; break;
    case Format::I:
      d.rd = rd;
      d.rs1 = rs1;
      d.imm = is_shift_imm(m) ? static_cast<std::int32_t>(rs2) : imm_i(w);
      break;
    case Format::S: d.rs1 = rs1; d.rs2 = rs2; d.imm = imm_s(w); break;
    case Format::B: d.rs1 = rs1; d.rs2 = rs2; d.imm = imm_b(w); break;
    case Format::U: d.rd = rd; d.imm = imm_u(w); break;
    case Format::J: d.rd = rd; d.imm = imm_j(w); break;
  }
  return d;
}

DecodedInstruction unsupported(std::uint32_t w) {
  DecodedInstruction d;
  d.mnemonic = Mnemonic::Unsupported;
  d.format = Format::I;
  d.raw = w;
  return d;
}

}  // namespace

bool DecodedInstruction::is_load() const {
  switch (mnemonic) {
    case Mnemonic::LB: case Mnemonic::LH: case Mnemonic::LW:
    case Mnemonic::LBU: case Mnemonic::LHU:
      return true;
    default:
      return false;
  }
}

bool DecodedInstruction::is_store() const {
  return mnemonic == Mnemonic::SB || mnemonic == Mnemonic::SH || mnemonic == Mnemonic::SW;
}

bool DecodedInstruction::is_branch() const { return format == Format::B; }

bool DecodedInstruction::writes_rd() const {
  if (rd == 0) return false;
  switch (format) {
    case Format::S: case Format::B: return false;
    default: return mnemonic != Mnemonic::EBREAK && mnemonic != Mnemonic::Unsupported;
  }
}

bool DecodedInstruction::reads_rs1() const {
  switch (format) {
    case Format::U: case Format::J: return false;
    default: return mnemonic != Mnemonic::EBREAK && mnemonic != Mnemonic::Unsupported;
  }
}

bool DecodedInstruction::reads_rs2() const {
  return format == Format::R || format == Format::S || format == Format::B;
}

unsigned DecodedInstruction::access_bytes() const {
  switch (mnemonic) {
    case Mnemonic::LB: case Mnemonic::LBU: case Mnemonic::SB: return 1;
    case Mnemonic::LH: case Mnemonic::LHU: case Mnemonic::SH: return 2;
    case Mnemonic::LW: case Mnemonic::SW: return 4;
    default: return 0;
  }
}

std::optional<DecodedInstruction> try_decode(std::uint32_t w) {
  if ((w & 3) != 3) return std::nullopt;
  const std::uint32_t opcode = w & 0x7f;
  const std::uint32_t f3 = (w >> 12) & 7;
  const std::uint32_t f7 = w >> 25;
  switch (opcode) {
    case kOpLui: return fill(Mnemonic::LUI, w);
    case kOpAuipc: return fill(Mnemonic::AUIPC, w);
    case kOpJal: return fill(Mnemonic::JAL, w);
    case kOpJalr:
      if (f3 != 0) return std::nullopt;
      return fill(Mnemonic::JALR, w);
    case kOpBranch: {
      static constexpr std::array<std::optional<Mnemonic>, 8> kBranch{
          Mnemonic::BEQ, Mnemonic::BNE, std::nullopt, std::nullopt,
          Mnemonic::BLT, Mnemonic::BGE, Mnemonic::BLTU, Mnemonic::BGEU};
      if (!kBranch[f3]) return std::nullopt;
      return fill(*kBranch[f3], w);
    }
    case kOpLoad: {
      static constexpr std::array<std::optional<Mnemonic>, 8> kLoad{
          Mnemonic::LB, Mnemonic::LH, Mnemonic::LW, std::nullopt,
          Mnemonic::LBU, Mnemonic::LHU, std::nullopt, std::nullopt};
      if (!kLoad[f3]) return std::nullopt;
      return fill(*kLoad[f3], w);
    }
    case kOpStore:
      if (f3 > 2) return std::nullopt;
      return fill(f3 == 0 ? Mnemonic::SB : f3 == 1 ? Mnemonic::SH : Mnemonic::SW, w);
    case kOpImm:
      switch (f3) {
        case 0: return fill(Mnemonic::ADDI, w);
        case 2: return fill(Mnemonic::SLTI, w);
        case 3: return fill(Mnemonic::SLTIU, w);
        case 4: return fill(Mnemonic::XORI, w);
        case 6: return fill(Mnemonic::ORI, w);
        case 7: return fill(Mnemonic::ANDI, w);
        case 1:
          if (f7 != 0) return std::nullopt;
          return fill(Mnemonic::SLLI, w);
        case 5:
          if (f7 == 0x00) return fill(Mnemonic::SRLI, w);
          if (f7 == 0x20) return fill(Mnemonic::SRAI, w);
          return std::nullopt;
      }
      return std::nullopt;
    case kOpReg:
      for (const auto& e : kTable) {
        if (e.opcode == kOpReg && e.funct3 == f3 && e.funct7 == f7) return fill(e.m, w);
      }
      return std::nullopt;
    case kOpFence:
      if (f3 == 0 || f3 == 1) return unsupported(w);
      return std::nullopt;
    case kOpSystem:
      if (w == kEbreak) return fill(Mnemonic::EBREAK, w);
      if (w == 0x00000073) return unsupported(w);  // ecall
      if (f3 == 4) return std::nullopt;
      if (f3 != 0) return unsupported(w);  // csrrw/csrrs/csrrc/csrrwi/csrrsi/csrrci
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

DecodedInstruction decode(std::uint32_t word) {
  if (auto d = try_decode(word)) return *d;
  throw illegal(word);
}

std::uint32_t encode(const DecodedInstruction& d) {
  if (d.mnemonic == Mnemonic::Unsupported) return d.raw;
  if (d.mnemonic == Mnemonic::EBREAK) return kEbreak;
  const auto& e = info(d.mnemonic);
  const std::uint32_t rd = d.rd & 0x1fu;
  const std::uint32_t rs1 = d.rs1 & 0x1fu;
  const std::uint32_t rs2 = d.rs2 & 0x1fu;
  const auto imm = static_cast<std::uint32_t>(d.imm);
  switch (e.format) {
    case Format::R:
      return (e.funct7 << 25) | (rs2 << 20) | (rs1 << 15) | (e.funct3 << 12) | (rd << 7) | e.opcode;
    case Format::I:
      if (is_shift_imm(d.mnemonic)) {
        return (e.funct7 << 25) | ((imm & 0x1f) << 20) | (rs1 << 15) | (e.funct3 << 12) |
               (rd << 7) | e.opcode;
      }
      return ((imm & 0xfff) << 20) | (rs1 << 15) | (e.funct3 << 12) | (rd << 7) | e.opcode;
    case Format::S:
      return (((imm >> 5) & 0x7f) << 25) | (rs2 << 20) | (rs1 << 15) | (e.funct3 << 12) |
             ((imm & 0x1f) << 7) | e.opcode;
    case Format::B:
      return (((imm >> 12) & 1) << 31) | (((imm >> 5) & 0x3f) << 25) | (rs2 << 20) |
             (rs1 << 15) | (e.funct3 << 12) | (((imm >> 1) & 0xf) << 8) |
             (((imm >> 11) & 1) << 7) | e.opcode;
    case Format::U:
      return (imm & 0xfffff000u) | (rd << 7) | e.opcode;
    case Format::J:
      return (((imm >> 20) & 1) << 31) | (((imm >> 1) & 0x3ff) << 21) |
             (((imm >> 11) & 1) << 20) | (((imm >> 12) & 0xff) << 12) | (rd << 7) | e.opcode;
  }
  return d.raw;
}

DecodedInstruction make(Mnemonic m, unsigned rd, unsigned rs1, unsigned rs2, std::int32_t imm) {
  auto out_of_range = [&](const char* what) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s immediate %d out of range for %s", what, imm,
                  std::string(mnemonic_name(m)).c_str());
    return Error(ErrorKind::ImmediateOutOfRange, buf);
  };
  if (rd > 31 || rs1 > 31 || rs2 > 31) {
    throw Error(ErrorKind::ParseError, "register index out of range");
  }
  DecodedInstruction d;
  d.mnemonic = m;
  d.format = format_of(m);
  switch (d.format) {
    case Format::R: d.rd = rd; d.rs1 = rs1; d.rs2 = rs2; break;
    case Format::I:
      if (is_shift_imm(m)) {
        if (imm < 0 || imm > 31) throw out_of_range("shift");
      } else if (imm < -2048 || imm > 2047) {
        throw out_of_range("12-bit");
      }
      d.rd = rd;
      d.rs1 = rs1;
      d.imm = imm;
      break;
    case Format::S:
      if (imm < -2048 || imm > 2047) throw out_of_range("12-bit");
      d.rs1 = rs1;
      d.rs2 = rs2;
      d.imm = imm;
      break;
    case Format::B:
      if (imm < -4096 || imm > 4094 || (imm & 1)) throw out_of_range("branch");
      d.rs1 = rs1;
      d.rs2 = rs2;
      d.imm = imm;
      break;
    case Format::U:
      if (imm & 0xfff) throw out_of_range("upper");
      d.rd = rd;
      d.imm = imm;
      break;
    case Format::J:
      if (imm < -(1 << 20) || imm > (1 << 20) - 2 || (imm & 1)) throw out_of_range("jump");
      d.rd = rd;
      d.imm = imm;
      break;
  }
  if (m == Mnemonic::EBREAK) d = DecodedInstruction{Mnemonic::EBREAK, Format::I, 0, 0, 0, 0, kEbreak};
  d.raw = encode(d);
  return d;
}

Format format_of(Mnemonic m) { return info(m).format; }

std::string_view mnemonic_name(Mnemonic m) { return info(m).name; }

std::optional<Mnemonic> mnemonic_from_name(std::string_view name) {
  for (const auto& e : kTable) {
    if (e.name == name && e.m != Mnemonic::Unsupported) return e.m;
  }
  return std::nullopt;
}

std::string disassemble(const DecodedInstruction& d) {
  char buf[64];
  const char* n = mnemonic_name(d.mnemonic).data();
  switch (d.mnemonic) {
    case Mnemonic::EBREAK: return "ebreak";
    case Mnemonic::Unsupported:
      std::snprintf(buf, sizeof buf, ".word 0x%08x", d.raw);
      return buf;
    default: break;
  }
  if (d.is_load() || d.mnemonic == Mnemonic::JALR) {
    std::snprintf(buf, sizeof buf, "%s x%d, %d(x%d)", n, d.rd, d.imm, d.rs1);
    return buf;
  }
  switch (d.format) {
    case Format::R: std::snprintf(buf, sizeof buf, "%s x%d, x%d, x%d", n, d.rd, d.rs1, d.rs2); break;
    case Format::I: std::snprintf(buf, sizeof buf, "%s x%d, x%d, %d", n, d.rd, d.rs1, d.imm); break;
    case Format::S: std::snprintf(buf, sizeof buf, "%s x%d, %d(x%d)", n, d.rs2, d.imm, d.rs1); break;
    case Format::B: std::snprintf(buf, sizeof buf, "%s x%d, x%d, %d", n, d.rs1, d.rs2, d.imm); break;
    case Format::U:
      std::snprintf(buf, sizeof buf, "%s x%d, 0x%x", n, d.rd, static_cast<std::uint32_t>(d.imm) >> 12);
      break;
    case Format::J: std::snprintf(buf, sizeof buf, "%s x%d, %d", n, d.rd, d.imm); break;
  }
  return buf;
}

}  // namespace rvdse::isa
