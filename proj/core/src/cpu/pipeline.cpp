#include "rvdse/cpu/pipeline.hpp"

#include <cstdio>

namespace rvdse::cpu {

StageLayout stage_layout(CoreVariant v) {
  if (v == CoreVariant::Bypass7) return {0, 1, 2, 3, 4, 5, 6, 7, {"F1", "F2", "D", "E", "M1", "M2", "W"}};
  return {0, 1, 1, 2, 3, 4, 4, 5, {"IF", "ID", "EX", "MEM", "WB"}};
}

HazardAction detect_hazard(const PipelineState& st, CoreVariant variant) {
  const StageLayout L = stage_layout(variant);
  HazardAction a;
  const StageSlot& e = st.stages[L.execute];
  if (e.valid && e.executed && e.ex.taken && !e.fault) {
    a.kind = HazardKind::Flush;
    return a;
  }
  const StageSlot& d = st.stages[L.decode];
  if (!d.valid || !d.decoded || d.unsupported || d.fault) return a;
  const bool bypass = variant != CoreVariant::Stall5;

  auto check = [&](unsigned operand, unsigned reg) {
    if (reg == 0) return;
    // Youngest older producer first. Writeback is excluded: it writes the
    // register file before decode reads it in the same cycle.
    for (unsigned s = L.execute; s < L.writeback; ++s) {
      const StageSlot& p = st.stages[s];
      if (!p.valid || !p.decoded || !p.d.writes_rd() || p.d.rd != reg) continue;
      const unsigned next = s + 1;  // where the producer sits when we execute
      unsigned need = 0;
      if (!bypass) {
        need = L.writeback - s;
      } else if (p.d.is_load()) {
        need = L.writeback - next;
      }
      if (need > 0) {
        if (need > a.stall_cycles) {
          a.stall_cycles = need;
          a.load_use = p.d.is_load();
        }
      } else {
        a.paths.push_back({operand, next});
      }
      return;
    }
  };
  if (d.d.reads_rs1()) check(1, d.d.rs1);
  if (d.d.reads_rs2()) check(2, d.d.rs2);

  if (a.stall_cycles > 0) {
    a.kind = HazardKind::Stall;
    a.paths.clear();
  } else if (!a.paths.empty()) {
    a.kind = HazardKind::Forward;
  }
  return a;
}

PipelineCore::PipelineCore(CoreVariant variant, unsigned hart, std::uint32_t entry_pc, MemPort& iport,
                           MemPort& dport)
    : Core(hart, entry_pc),
      variant_(variant),
      layout_(stage_layout(variant)),
      iport_(iport),
      dport_(dport),
      fetch_pc_(entry_pc) {
  state_.stages.resize(layout_.depth);
}

void PipelineCore::squash(StageSlot& s) {
  if (s.valid && s.fetch_issued && !s.word) ++discard_;
  s = StageSlot{};
}

void PipelineCore::deliver_fetches(std::uint64_t now) {
  for (;;) {
    StageSlot* target = nullptr;
    if (discard_ == 0) {
      for (int i = static_cast<int>(layout_.fetch_recv); i >= static_cast<int>(layout_.fetch); --i) {
        auto& s = state_.stages[i];
        if (s.valid && s.fetch_issued && !s.word) {
          target = &s;
          break;
        }
      }
      if (!target) return;
    }
    auto r = iport_.take_response(now);
    if (!r) return;
    if (discard_ > 0) {
      --discard_;
      ++stats_.discarded_fetches;
      continue;
    }
    target->word = r->data;
    if (r->error) {
      target->fault = r->error;
      target->fault_detail = "instruction fetch failed";
    }
  }
}

bool PipelineCore::take_data(StageSlot& s, std::uint64_t now) {
  auto r = dport_.take_response(now);
  if (!r) return false;
  s.mem_done = true;
  if (r->error) {
    s.fault = r->error;
    s.fault_detail = "data access failed";
    return true;
  }
  if (s.d.is_load()) {
    s.value = isa::load_extract(s.d, s.ex.mem_addr, r->data);
    s.value_ready = true;
  }
  return true;
}

bool PipelineCore::do_execute(StageSlot& s) {
  if (s.fault || s.unsupported || !s.decoded) {
    s.executed = true;
    return true;
  }
  std::uint32_t a = s.op1;
  std::uint32_t b = s.op2;
  if (variant_ != CoreVariant::Stall5) {
    // The producer may have retired while a memory stall held this
    // instruction between decode and execute; the register file then has it.
    a = regs_[s.d.rs1];
    b = regs_[s.d.rs2];
    auto forward = [&](unsigned reg, std::uint32_t& v) {
      if (reg == 0) return true;
      for (unsigned i = layout_.execute + 1; i <= layout_.writeback; ++i) {
        const StageSlot& p = state_.stages[i];
        if (!p.valid || !p.decoded || !p.d.writes_rd() || p.d.rd != reg) continue;
        if (!p.value_ready || (p.d.is_load() && i != layout_.writeback)) return false;
        v = p.value;
        return true;
      }
      return true;
    };
    if (s.d.reads_rs1() && !forward(s.d.rs1, a)) return false;
    if (s.d.reads_rs2() && !forward(s.d.rs2, b)) return false;
  }
  s.ex = isa::execute(s.d, s.pc, a, b);
  s.executed = true;
  if (s.d.is_memory()) {
    try {
      isa::check_alignment(s.d, s.ex.mem_addr);
    } catch (const Error& e) {
      s.fault = e.kind();
      s.fault_detail = e.detail();
      return true;
    }
    if (s.d.is_store()) s.lanes = isa::store_lanes(s.d, s.ex.mem_addr, b);
  } else if (s.d.writes_rd()) {
    s.value = s.ex.value;
    s.value_ready = true;
  }
  if (s.ex.next_pc & 3) {
    s.fault = ErrorKind::MisalignedAccess;
    s.fault_detail = "control transfer to misaligned target";
    s.ex.taken = false;
  }
  return true;
}

bool PipelineCore::do_writeback(StageSlot& s, std::uint64_t now) {
  if (s.decoded && s.d.is_memory() && !s.fault && layout_.mem_recv == layout_.writeback && !s.mem_done) {
    if (!take_data(s, now)) return false;
  }
  if (s.fault) raise(*s.fault, s.fault_detail, s.pc, now);
  if (s.unsupported) {
    halt_unsupported();
    return true;
  }
  const auto rec = make_record(s.pc, s.d, s.value, s.d.is_store() ? &s.lanes : nullptr, s.ex.mem_addr);
  retire(rec, s.d, s.ex.next_pc, now);
  return true;
}

bool PipelineCore::work(unsigned i, std::uint64_t now, StallCause& cause) {
  StageSlot& s = state_.stages[i];
  const StageLayout& L = layout_;

  if (i == L.writeback) {
    if (!s.valid) return true;
    if (!do_writeback(s, now)) {
      cause = StallCause::Memory;
      return false;
    }
    return true;
  }
  if (i == L.mem_recv) {
    if (s.valid && s.decoded && s.d.is_memory() && !s.fault && !s.mem_done && !take_data(s, now)) {
      cause = StallCause::Memory;
      return false;
    }
    return true;
  }
  if (i == L.mem) {
    if (s.valid && s.decoded && s.d.is_memory() && !s.fault && !s.mem_issued) {
      if (!dport_.ready()) {
        cause = StallCause::Memory;
        return false;
      }
      MemRequest req{MemOp::Read, s.ex.mem_addr & ~3u, 0, 0xf};
      if (s.d.is_store()) req = {MemOp::Write, s.ex.mem_addr & ~3u, s.lanes.data, s.lanes.mask};
      dport_.issue(req, now);
      s.mem_issued = true;
    }
    return true;
  }
  if (i == L.execute) {
    if (s.valid && !s.executed) {
      if (!do_execute(s)) {
        cause = StallCause::LoadUse;
        return false;
      }
      if (s.ex.taken && !s.fault) {
        redirect_ = s.ex.next_pc;
        ++stats_.taken_branches;
      }
    }
    return true;
  }
  if (i == L.fetch) {
    if (fetch_stopped_) return true;
    if (!s.valid) {
      s.valid = true;
      s.pc = fetch_pc_;
      fetch_pc_ += 4;
    }
    if (!s.fetch_issued) {
      if (s.pc & 3) {
        s.fetch_issued = true;
        s.word = 0;
        s.fault = ErrorKind::MisalignedAccess;
        s.fault_detail = "misaligned fetch";
        return true;
      }
      if (!iport_.ready()) {
        cause = StallCause::Memory;
        return false;
      }
      iport_.issue({MemOp::Read, s.pc, 0, 0xf}, now);
      s.fetch_issued = true;
      deliver_fetches(now);
    }
    return true;
  }
  // fetch_recv and/or decode
  if (!s.valid) return true;
  if (i == L.fetch_recv && !s.word) {
    cause = StallCause::Memory;
    return false;
  }
  if (i != L.decode) return true;
  if (!s.decoded && !s.fault) {
    auto d = isa::try_decode(*s.word);
    if (!d) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "word 0x%08x", *s.word);
      s.fault = ErrorKind::IllegalInstruction;
      s.fault_detail = buf;
    } else {
      s.d = *d;
      s.decoded = true;
      s.unsupported = d->mnemonic == isa::Mnemonic::Unsupported;
    }
  }
  const HazardAction h = detect_hazard(state_, variant_);
  if (h.kind == HazardKind::Flush) return true;
  if (h.kind == HazardKind::Stall) {
    cause = h.load_use ? StallCause::LoadUse : StallCause::Raw;
    return false;
  }
  if (s.decoded) {
    s.op1 = regs_[s.d.rs1];
    s.op2 = regs_[s.d.rs2];
    // Nothing after a halting instruction may reach memory.
    if (s.unsupported || s.d.mnemonic == isa::Mnemonic::EBREAK) {
      for (unsigned k = L.fetch; k < L.decode; ++k) squash(state_.stages[k]);
      fetch_stopped_ = true;
    }
  }
  return true;
}

void PipelineCore::tick(std::uint64_t now) {
  if (halted_) return;
  ++stats_.cycles;
  deliver_fetches(now);

  const unsigned n = layout_.depth;
  std::vector<bool> advance(n, false);
  bool frozen = false;
  StallCause cause = StallCause::None;
  for (int i = static_cast<int>(n) - 1; i >= 0; --i) {
    if (frozen) break;
    StallCause c = StallCause::None;
    const bool done = work(static_cast<unsigned>(i), now, c);
    if (halted_) return;
    const StageSlot& s = state_.stages[i];
    if (!s.valid) continue;
    if (!done) {
      frozen = true;
      cause = c;
    } else {
      advance[i] = true;
    }
  }

  switch (cause) {
    case StallCause::Memory: ++stats_.stall_memory; break;
    case StallCause::LoadUse: ++stats_.stall_load_use; break;
    case StallCause::Raw: ++stats_.stall_raw; break;
    case StallCause::None: break;
  }

  if (redirect_) {
    for (unsigned k = layout_.fetch; k <= layout_.decode; ++k) {
      if (state_.stages[k].valid) ++stats_.stall_branch;
      squash(state_.stages[k]);
      advance[k] = false;
    }
    fetch_pc_ = *redirect_;
    redirect_.reset();
  }

  auto& st = state_.stages;
  if (advance[n - 1]) st[n - 1] = StageSlot{};
  for (int i = static_cast<int>(n) - 2; i >= 0; --i) {
    if (!advance[i]) continue;
    st[i + 1] = std::move(st[i]);
    st[i] = StageSlot{};
  }
}

}  // namespace rvdse::cpu
