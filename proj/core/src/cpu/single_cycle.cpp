#include "rvdse/cpu/single_cycle.hpp"

#include <cstdio>

namespace rvdse::cpu {

SingleCycleCore::SingleCycleCore(unsigned hart, std::uint32_t entry_pc, MemPort& iport, MemPort& dport)
    : Core(hart, entry_pc), iport_(iport), dport_(dport), pc_(entry_pc) {}

void SingleCycleCore::tick(std::uint64_t now) {
  if (halted_) return;
  ++stats_.cycles;
  retired_this_cycle_ = false;

  if (phase_ == Phase::NeedData && !try_issue_data(now)) {
    ++stats_.stall_memory;
    return;
  }
  if (phase_ == Phase::WaitData) {
    auto r = dport_.take_response(now);
    if (!r) {
      ++stats_.inserted_nops;
      return;
    }
    if (r->error) raise(*r->error, "data access failed", pc_, now);
    finish(cur_.is_load() ? isa::load_extract(cur_, ex_.mem_addr, r->data) : 0, now);
    if (halted_) return;
  }
  if (phase_ == Phase::NeedFetch) {
    if (pc_ & 3) raise(ErrorKind::MisalignedAccess, "misaligned fetch", pc_, now);
    if (!iport_.ready()) {
      if (!retired_this_cycle_) ++stats_.stall_memory;
      return;
    }
    iport_.issue({MemOp::Read, pc_, 0, 0xf}, now);
    phase_ = Phase::WaitFetch;
    if (retired_this_cycle_) return;  // one instruction per cycle
  }
  if (phase_ == Phase::WaitFetch) {
    auto r = iport_.take_response(now);
    if (!r) {
      ++stats_.stall_memory;
      return;
    }
    if (r->error) raise(*r->error, "instruction fetch failed", pc_, now);
    execute_fetched(r->data, now);
  }
}

void SingleCycleCore::execute_fetched(std::uint32_t word, std::uint64_t now) {
  auto d = isa::try_decode(word);
  if (!d) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "word 0x%08x", word);
    raise(ErrorKind::IllegalInstruction, buf, pc_, now);
  }
  if (d->mnemonic == isa::Mnemonic::Unsupported) {
    halt_unsupported();
    return;
  }
  cur_ = *d;
  ex_ = isa::execute(cur_, pc_, regs_[cur_.rs1], regs_[cur_.rs2]);
  if (cur_.is_memory()) {
    try {
      isa::check_alignment(cur_, ex_.mem_addr);
    } catch (Error& e) {
      raise(e.kind(), e.detail(), pc_, now);
    }
    phase_ = Phase::NeedData;
    if (!try_issue_data(now)) {
      ++stats_.stall_memory;
      return;
    }
    auto r = dport_.take_response(now);
    if (!r) {
      ++stats_.inserted_nops;
      return;
    }
    if (r->error) raise(*r->error, "data access failed", pc_, now);
    finish(cur_.is_load() ? isa::load_extract(cur_, ex_.mem_addr, r->data) : 0, now);
    return;
  }
  finish(ex_.value, now);
  if (!halted_ && phase_ == Phase::NeedFetch && iport_.ready()) {
    if (pc_ & 3) raise(ErrorKind::MisalignedAccess, "misaligned fetch", pc_, now);
    iport_.issue({MemOp::Read, pc_, 0, 0xf}, now);
    phase_ = Phase::WaitFetch;
  }
}

bool SingleCycleCore::try_issue_data(std::uint64_t now) {
  if (!dport_.ready()) return false;
  MemRequest req{MemOp::Read, ex_.mem_addr & ~3u, 0, 0xf};
  if (cur_.is_store()) {
    lanes_ = isa::store_lanes(cur_, ex_.mem_addr, regs_[cur_.rs2]);
    req = {MemOp::Write, ex_.mem_addr & ~3u, lanes_.data, lanes_.mask};
  }
  dport_.issue(req, now);
  phase_ = Phase::WaitData;
  return true;
}

void SingleCycleCore::finish(std::uint32_t value, std::uint64_t now) {
  if (ex_.next_pc & 3) raise(ErrorKind::MisalignedAccess, "control transfer to misaligned target", pc_, now);
  const auto rec = make_record(pc_, cur_, value, cur_.is_store() ? &lanes_ : nullptr, ex_.mem_addr);
  if (ex_.taken) ++stats_.taken_branches;
  retire(rec, cur_, ex_.next_pc, now);
  pc_ = ex_.next_pc;
  phase_ = Phase::NeedFetch;
  retired_this_cycle_ = true;
}

}  // namespace rvdse::cpu
