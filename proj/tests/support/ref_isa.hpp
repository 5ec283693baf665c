#pragma once

// Reference RV32I tables for the tests. Written from the base ISA opcode
// map (mask/match pairs) and kept apart from the library's decoder.

#include <array>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace rvdse::testing {

enum class RefFmt { R, I, IShift, Load, S, B, U, J, Sys, Fence };

struct RefOp {
  const char* name;
  std::uint32_t mask;
  std::uint32_t match;
  RefFmt fmt;
};

inline const std::vector<RefOp>& ref_ops() {
  static const std::vector<RefOp> ops = {
      {"lui", 0x7f, 0x37, RefFmt::U},
      {"auipc", 0x7f, 0x17, RefFmt::U},
      {"jal", 0x7f, 0x6f, RefFmt::J},
      {"jalr", 0x707f, 0x67, RefFmt::Load},
      {"beq", 0x707f, 0x63, RefFmt::B},
      {"bne", 0x707f, 0x1063, RefFmt::B},
      {"blt", 0x707f, 0x4063, RefFmt::B},
      {"bge", 0x707f, 0x5063, RefFmt::B},
      {"bltu", 0x707f, 0x6063, RefFmt::B},
      {"bgeu", 0x707f, 0x7063, RefFmt::B},
      {"lb", 0x707f, 0x03, RefFmt::Load},
      {"lh", 0x707f, 0x1003, RefFmt::Load},
      {"lw", 0x707f, 0x2003, RefFmt::Load},
      {"lbu", 0x707f, 0x4003, RefFmt::Load},
      {"lhu", 0x707f, 0x5003, RefFmt::Load},
      {"sb", 0x707f, 0x23, RefFmt::S},
      {"sh", 0x707f, 0x1023, RefFmt::S},
      {"sw", 0x707f, 0x2023, RefFmt::S},
      {"addi", 0x707f, 0x13, RefFmt::I},
      {"slti", 0x707f, 0x2013, RefFmt::I},
      {"sltiu", 0x707f, 0x3013, RefFmt::I},
      {"xori", 0x707f, 0x4013, RefFmt::I},
      {"ori", 0x707f, 0x6013, RefFmt::I},
      {"andi", 0x707f, 0x7013, RefFmt::I},
      {"slli", 0xfe00707f, 0x1013, RefFmt::IShift},
      {"srli", 0xfe00707f, 0x5013, RefFmt::IShift},
      {"srai", 0xfe00707f, 0x40005013, RefFmt::IShift},
      {"add", 0xfe00707f, 0x33, RefFmt::R},
      {"sub", 0xfe00707f, 0x40000033, RefFmt::R},
      {"sll", 0xfe00707f, 0x1033, RefFmt::R},
      {"slt", 0xfe00707f, 0x2033, RefFmt::R},
      {"sltu", 0xfe00707f, 0x3033, RefFmt::R},
      {"xor", 0xfe00707f, 0x4033, RefFmt::R},
      {"srl", 0xfe00707f, 0x5033, RefFmt::R},
      {"sra", 0xfe00707f, 0x40005033, RefFmt::R},
      {"or", 0xfe00707f, 0x6033, RefFmt::R},
      {"and", 0xfe00707f, 0x7033, RefFmt::R},
      {"ebreak", 0xffffffff, 0x00100073, RefFmt::Sys},
      // recognised but not executed
      {"ecall", 0xffffffff, 0x00000073, RefFmt::Fence},
      {"fence", 0x707f, 0x0f, RefFmt::Fence},
      {"fence.i", 0x707f, 0x100f, RefFmt::Fence},
      {"csrrw", 0x707f, 0x1073, RefFmt::Fence},
      {"csrrs", 0x707f, 0x2073, RefFmt::Fence},
      {"csrrc", 0x707f, 0x3073, RefFmt::Fence},
      {"csrrwi", 0x707f, 0x5073, RefFmt::Fence},
      {"csrrsi", 0x707f, 0x6073, RefFmt::Fence},
      {"csrrci", 0x707f, 0x7073, RefFmt::Fence},
  };
  return ops;
}

inline std::int32_t sx(std::uint32_t v, unsigned bits) {
  const std::uint32_t m = 1u << (bits - 1);
  return static_cast<std::int32_t>((v ^ m) - m);
}

struct RefInst {
  const RefOp* op = nullptr;
  unsigned rd = 0, rs1 = 0, rs2 = 0;
  std::int32_t imm = 0;
};

inline std::optional<RefInst> ref_decode(std::uint32_t w) {
  for (const auto& op : ref_ops()) {
    if ((w & op.mask) != op.match) continue;
    RefInst r;
    r.op = &op;
    r.rd = (w >> 7) & 31;
    r.rs1 = (w >> 15) & 31;
    r.rs2 = (w >> 20) & 31;
    switch (op.fmt) {
      case RefFmt::I: case RefFmt::Load: r.imm = sx(w >> 20, 12); break;
      case RefFmt::IShift: r.imm = static_cast<std::int32_t>(r.rs2); break;
      case RefFmt::S: r.imm = sx(((w >> 25) << 5) | ((w >> 7) & 31), 12); break;
      case RefFmt::B:
        r.imm = sx((((w >> 31) & 1) << 12) | (((w >> 7) & 1) << 11) | (((w >> 25) & 63) << 5) |
                       (((w >> 8) & 15) << 1),
                   13);
        break;
      case RefFmt::U: r.imm = static_cast<std::int32_t>(w & 0xfffff000u); break;
      case RefFmt::J:
        r.imm = sx((((w >> 31) & 1) << 20) | (((w >> 12) & 255) << 12) | (((w >> 20) & 1) << 11) |
                       (((w >> 21) & 1023) << 1),
                   21);
        break;
      default: break;
    }
    return r;
  }
  return std::nullopt;
}

// Text in the library's disassembly syntax.
inline std::optional<std::string> ref_disassemble(std::uint32_t w) {
  const auto r = ref_decode(w);
  if (!r) return std::nullopt;
  char b[64];
  const char* n = r->op->name;
  switch (r->op->fmt) {
    case RefFmt::R: std::snprintf(b, sizeof b, "%s x%u, x%u, x%u", n, r->rd, r->rs1, r->rs2); break;
    case RefFmt::I: case RefFmt::IShift: std::snprintf(b, sizeof b, "%s x%u, x%u, %d", n, r->rd, r->rs1, r->imm); break;
    case RefFmt::Load: std::snprintf(b, sizeof b, "%s x%u, %d(x%u)", n, r->rd, r->imm, r->rs1); break;
    case RefFmt::S: std::snprintf(b, sizeof b, "%s x%u, %d(x%u)", n, r->rs2, r->imm, r->rs1); break;
    case RefFmt::B: std::snprintf(b, sizeof b, "%s x%u, x%u, %d", n, r->rs1, r->rs2, r->imm); break;
    case RefFmt::U: std::snprintf(b, sizeof b, "%s x%u, 0x%x", n, r->rd, static_cast<std::uint32_t>(r->imm) >> 12); break;
    case RefFmt::J: std::snprintf(b, sizeof b, "%s x%u, %d", n, r->rd, r->imm); break;
    case RefFmt::Sys: std::snprintf(b, sizeof b, "%s", n); break;
    case RefFmt::Fence: std::snprintf(b, sizeof b, ".word 0x%08x", w); break;
  }
  return std::string(b);
}

// Brute-force interpreter: string compare on the mnemonic, byte-addressed
// little-endian memory. Stops on ebreak, an unrecognised word, a jump to
// itself, or `max_steps`.
struct RefMachine {
  std::array<std::uint32_t, 32> x{};
  std::uint32_t pc = 0;
  std::vector<std::uint8_t> mem;
  std::uint64_t steps = 0;

  explicit RefMachine(std::size_t bytes) : mem(bytes, 0) {}

  std::uint32_t ld(std::uint32_t a, unsigned n) const {
    std::uint32_t v = 0;
    for (unsigned i = 0; i < n; ++i) v |= static_cast<std::uint32_t>(mem.at(a + i)) << (8 * i);
    return v;
  }
  void st(std::uint32_t a, unsigned n, std::uint32_t v) {
    for (unsigned i = 0; i < n; ++i) mem.at(a + i) = static_cast<std::uint8_t>(v >> (8 * i));
  }

  void run(std::uint64_t max_steps) {
    while (steps < max_steps) {
      const auto r = ref_decode(ld(pc, 4));
      if (!r || r->op->fmt == RefFmt::Sys || r->op->fmt == RefFmt::Fence) return;
      const std::string n = r->op->name;
      const std::uint32_t a = x[r->rs1], b = x[r->rs2];
      const auto ui = static_cast<std::uint32_t>(r->imm);
      std::uint32_t next = pc + 4;
      std::optional<std::uint32_t> out;
      if (n == "lui") out = ui;
      else if (n == "auipc") out = pc + ui;
      else if (n == "jal") { out = pc + 4; next = pc + ui; }
      else if (n == "jalr") { out = pc + 4; next = (a + ui) & ~1u; }
      else if (n == "beq") { if (a == b) next = pc + ui; }
      else if (n == "bne") { if (a != b) next = pc + ui; }
      else if (n == "blt") { if (static_cast<std::int32_t>(a) < static_cast<std::int32_t>(b)) next = pc + ui; }
      else if (n == "bge") { if (static_cast<std::int32_t>(a) >= static_cast<std::int32_t>(b)) next = pc + ui; }
      else if (n == "bltu") { if (a < b) next = pc + ui; }
      else if (n == "bgeu") { if (a >= b) next = pc + ui; }
      else if (n == "lb") out = static_cast<std::uint32_t>(sx(ld(a + ui, 1), 8));
      else if (n == "lh") out = static_cast<std::uint32_t>(sx(ld(a + ui, 2), 16));
      else if (n == "lw") out = ld(a + ui, 4);
      else if (n == "lbu") out = ld(a + ui, 1);
      else if (n == "lhu") out = ld(a + ui, 2);
      else if (n == "sb") st(a + ui, 1, b);
      else if (n == "sh") st(a + ui, 2, b);
      else if (n == "sw") st(a + ui, 4, b);
      else if (n == "addi") out = a + ui;
      else if (n == "slti") out = static_cast<std::int32_t>(a) < r->imm;
      else if (n == "sltiu") out = a < ui;
      else if (n == "xori") out = a ^ ui;
      else if (n == "ori") out = a | ui;
      else if (n == "andi") out = a & ui;
      else if (n == "slli") out = a << r->imm;
      else if (n == "srli") out = a >> r->imm;
      else if (n == "srai") out = static_cast<std::uint32_t>(static_cast<std::int32_t>(a) >> r->imm);
      else if (n == "add") out = a + b;
      else if (n == "sub") out = a - b;
      else if (n == "sll") out = a << (b & 31);
      else if (n == "slt") out = static_cast<std::int32_t>(a) < static_cast<std::int32_t>(b);
      else if (n == "sltu") out = a < b;
      else if (n == "xor") out = a ^ b;
      else if (n == "srl") out = a >> (b & 31);
      else if (n == "sra") out = static_cast<std::uint32_t>(static_cast<std::int32_t>(a) >> (b & 31));
      else if (n == "or") out = a | b;
      else if (n == "and") out = a & b;
      if (out && r->rd) x[r->rd] = *out;
      ++steps;
      if (next == pc) return;
      pc = next;
    }
  }
};

}  // namespace rvdse::testing
