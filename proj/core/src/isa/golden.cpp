#include "rvdse/isa/golden.hpp"

#include <cstdio>

#include "rvdse/error.hpp"
#include "rvdse/isa/semantics.hpp"

namespace rvdse::isa {

namespace {

Error out_of_bounds(std::uint32_t addr, std::size_t words) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "byte address 0x%08x beyond %zu-word memory", addr, words);
  return Error(ErrorKind::MemoryOutOfBounds, buf);
}

std::uint32_t read_word(const ArchState& s, std::uint32_t addr) {
  if ((addr & ~3u) == kHartIdAddress) return s.hart_id;
  const std::size_t index = addr >> 2;
  if (index >= s.mem.size()) throw out_of_bounds(addr, s.mem.size());
  return s.mem[index];
}

}  // namespace

std::uint64_t ArchState::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  mix(pc);
  for (auto r : regs) mix(r);
  for (auto w : mem) mix(w);
  return h;
}

bool is_terminal_loop(const RetirementRecord& r, std::uint32_t next_pc,
                      std::uint32_t previous_rd_value) {
  return next_pc == r.pc && !r.store && (r.rd == 0 || r.value == previous_rd_value);
}

std::optional<RetirementRecord> step(ArchState& s) {
  if (s.halted) return std::nullopt;
  if (s.pc & 3) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "fetch from 0x%08x", s.pc);
    throw Error(ErrorKind::MisalignedAccess, buf).at_pc(s.pc);
  }
  try {
    const std::uint32_t word = read_word(s, s.pc);
    const DecodedInstruction d = decode(word);
    if (d.mnemonic == Mnemonic::Unsupported) {
      s.halted = true;
      s.halt_reason = HaltReason::Unsupported;
      return std::nullopt;
    }
    RetirementRecord rec;
    rec.pc = s.pc;
    rec.instr = word;
    const ExecResult ex = execute(d, s.pc, s.regs[d.rs1], s.regs[d.rs2]);
    std::uint32_t value = ex.value;
    if (d.is_load()) {
      check_alignment(d, ex.mem_addr);
      value = load_extract(d, ex.mem_addr, read_word(s, ex.mem_addr));
    } else if (d.is_store()) {
      check_alignment(d, ex.mem_addr);
      const std::size_t index = ex.mem_addr >> 2;
      if (index >= s.mem.size()) throw out_of_bounds(ex.mem_addr, s.mem.size());
      const StoreLanes lanes = store_lanes(d, ex.mem_addr, s.regs[d.rs2]);
      s.mem[index] = merge_lanes(s.mem[index], lanes);
      rec.store = true;
      rec.mem_addr = ex.mem_addr & ~3u;
      rec.mem_data = lanes.data;
      rec.mem_mask = lanes.mask;
    }
    if ((ex.next_pc & 3) != 0) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "control transfer to 0x%08x", ex.next_pc);
      throw Error(ErrorKind::MisalignedAccess, buf);
    }
    std::uint32_t previous = 0;
    if (d.writes_rd()) {
      previous = s.regs[d.rd];
      s.regs[d.rd] = value;
      rec.rd = d.rd;
      rec.value = value;
    }
    const bool self_loop = is_terminal_loop(rec, ex.next_pc, previous);
    s.pc = ex.next_pc;
    if (d.mnemonic == Mnemonic::EBREAK) {
      s.halted = true;
      s.halt_reason = HaltReason::Ebreak;
    } else if (self_loop) {
      s.halted = true;
      s.halt_reason = HaltReason::SelfLoop;
    }
    return rec;
  } catch (Error& e) {
    if (!e.pc()) e.at_pc(s.pc);
    throw;
  }
}

GoldenRun run_golden(const std::map<std::uint32_t, std::uint32_t>& image_words,
                     std::uint32_t entry_pc, const GoldenOptions& options) {
  GoldenRun run;
  run.final_state = ArchState(options.memory_words);
  ArchState& s = run.final_state;
  for (const auto& [addr, word] : image_words) {
    if (addr >= s.mem.size()) {
      throw Error(ErrorKind::MemoryOutOfBounds, "image does not fit configured memory");
    }
    s.mem[addr] = word;
  }
  s.pc = entry_pc;
  s.hart_id = options.hart_id;
  for (std::uint64_t n = 0; n < options.max_steps; ++n) {
    if (auto rec = step(s)) run.trace.push_back(*rec);
    if (s.halted) return run;
  }
  throw Error(ErrorKind::StepLimitExceeded,
              std::to_string(options.max_steps) + " steps without halting")
      .at_pc(s.pc);
}

}  // namespace rvdse::isa
