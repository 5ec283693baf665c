#include "rvdse/cpu/ooo.hpp"

#include <cstdio>

namespace rvdse::cpu {

bool OooEntry::commit_only() const {
  return fault.has_value() || unsupported || d.is_memory() || d.mnemonic == isa::Mnemonic::EBREAK;
}

unsigned OooState::queued() const {
  unsigned n = 0;
  for (const auto& e : window) n += e.status == EntryStatus::Queued;
  return n;
}

unsigned OooState::issued() const { return static_cast<unsigned>(window.size()) - queued(); }

bool OooState::sources_ready(std::size_t index) const {
  const auto& e = window[index];
  for (std::size_t j = 0; j < index; ++j) {
    const auto& p = window[j];
    if (p.fault || !p.d.writes_rd()) continue;
    if (e.d.reads_rs1() && e.d.rs1 != 0 && p.d.rd == e.d.rs1) return false;
    if (e.d.reads_rs2() && e.d.rs2 != 0 && p.d.rd == e.d.rs2) return false;
  }
  return true;
}

std::optional<IssueDecision> ooo_schedule(const OooState& st) {
  std::optional<unsigned> alu;
  for (unsigned a = 0; a < st.alus.size(); ++a) {
    if (st.pipelined || st.alus[a].busy_until <= st.now) {
      alu = a;
      break;
    }
  }
  if (!alu) return std::nullopt;
  const bool buffer_full = st.issued() >= st.commit_capacity;
  for (std::size_t i = 0; i < st.window.size(); ++i) {
    const auto& e = st.window[i];
    if (e.status != EntryStatus::Queued || e.commit_only()) continue;
    if (buffer_full && i != 0) return std::nullopt;
    if (st.sources_ready(i)) return IssueDecision{i, *alu};
  }
  return std::nullopt;
}

std::optional<CommitResult> ooo_commit(OooState& st, MemPort& dport, const std::array<std::uint32_t, 32>& regs,
                                       std::uint64_t now) {
  if (st.window.empty()) return std::nullopt;
  OooEntry& h = st.window.front();
  auto pop = [&]() {
    CommitResult r{std::move(st.window.front()), false};
    st.window.pop_front();
    if (r.entry.d.writes_rd() && !r.entry.fault && !r.entry.unsupported) --st.rd_table[r.entry.d.rd];
    r.faulted = r.entry.fault.has_value();
    return r;
  };
  if (h.fault || h.unsupported || h.d.mnemonic == isa::Mnemonic::EBREAK) {
    if (h.d.mnemonic == isa::Mnemonic::EBREAK) h.ex = isa::execute(h.d, h.pc, 0, 0);
    return pop();
  }
  if (h.d.is_memory()) {
    if (!h.mem_issued) {
      h.ex = isa::execute(h.d, h.pc, regs[h.d.rs1], regs[h.d.rs2]);
      try {
        isa::check_alignment(h.d, h.ex.mem_addr);
      } catch (const Error& e) {
        h.fault = e.kind();
        h.fault_detail = e.detail();
        return pop();
      }
      if (!dport.ready()) return std::nullopt;
      MemRequest req{MemOp::Read, h.ex.mem_addr & ~3u, 0, 0xf};
      if (h.d.is_store()) {
        h.lanes = isa::store_lanes(h.d, h.ex.mem_addr, regs[h.d.rs2]);
        req = {MemOp::Write, h.ex.mem_addr & ~3u, h.lanes.data, h.lanes.mask};
      }
      dport.issue(req, now);
      h.mem_issued = true;
    }
    auto r = dport.take_response(now);
    if (!r) return std::nullopt;
    if (r->error) {
      h.fault = r->error;
      h.fault_detail = "data access failed";
    } else if (h.d.is_load()) {
      h.value = isa::load_extract(h.d, h.ex.mem_addr, r->data);
    }
    return pop();
  }
  if (h.status != EntryStatus::Done) return std::nullopt;
  return pop();
}

OooCore::OooCore(unsigned hart, std::uint32_t entry_pc, MemPort& iport, MemPort& dport, const OooParams& params)
    : Core(hart, entry_pc), iport_(iport), dport_(dport), fetch_pc_(entry_pc) {
  st_.queue_length = params.queue_length;
  st_.commit_capacity = params.commit_capacity;
  st_.pipelined = params.pipelined_alus;
  for (unsigned lat : params.alu_latency) st_.alus.push_back({lat < 1 ? 1u : lat, 0});
  if (st_.alus.empty()) st_.alus.push_back({1, 0});
}

void OooCore::tick(std::uint64_t now) {
  if (halted_) return;
  ++stats_.cycles;
  st_.now = now;
  bool retired_now = false;
  bool head_waits_memory = false;

  // commit
  if (!st_.window.empty() && st_.window.front().d.is_memory() && !st_.window.front().fault) head_waits_memory = true;
  if (auto c = ooo_commit(st_, dport_, regs_, now)) {
    const OooEntry& e = c->entry;
    if (c->faulted) raise(*e.fault, e.fault_detail, e.pc, now);
    if (e.unsupported) {
      halt_unsupported();
      return;
    }
    const auto rec = make_record(e.pc, e.d, e.value, e.d.is_store() ? &e.lanes : nullptr, e.ex.mem_addr);
    retire(rec, e.d, e.ex.next_pc, now);
    retired_now = true;
    head_waits_memory = false;
    if (halted_) return;
    if (e.d.is_control()) {
      if (e.ex.taken) ++stats_.taken_branches;
      fetch_pc_ = e.ex.next_pc;
      unblock_at_ = now + 1;
    }
  }

  // complete
  for (auto& e : st_.window) {
    if (e.status == EntryStatus::Issued && e.done_at <= now) e.status = EntryStatus::Done;
  }

  // schedule
  bool issued = false;
  if (auto dec = ooo_schedule(st_)) {
    OooEntry& e = st_.window[dec->entry];
    AluState& alu = st_.alus[dec->alu];
    e.ex = isa::execute(e.d, e.pc, regs_[e.d.rs1], regs_[e.d.rs2]);
    e.value = e.ex.value;
    if (e.ex.next_pc & 3) {
      e.fault = ErrorKind::MisalignedAccess;
      e.fault_detail = "control transfer to misaligned target";
    }
    e.status = EntryStatus::Issued;
    e.alu = static_cast<int>(dec->alu);
    e.done_at = now + alu.latency;
    if (!st_.pipelined) alu.busy_until = now + alu.latency;
    issued = true;
  }
  const bool hazard_blocked = !issued && st_.queued() > 0 && !head_waits_memory;

  // insert
  if (decoded_ && st_.queued() < st_.queue_length) {
    decoded_->inserted_at = now;
    decoded_->seq = next_seq_++;
    if (decoded_->d.writes_rd() && !decoded_->fault && !decoded_->unsupported) ++st_.rd_table[decoded_->d.rd];
    st_.window.push_back(std::move(*decoded_));
    decoded_.reset();
  }

  // decode
  if (!decoded_ && fetched_) {
    OooEntry e;
    e.pc = fetched_->pc;
    if (fetched_->error) {
      e.fault = fetched_->error;
      e.fault_detail = "instruction fetch failed";
    } else if (auto d = isa::try_decode(fetched_->word)) {
      e.d = *d;
      e.unsupported = d->mnemonic == isa::Mnemonic::Unsupported;
    } else {
      char buf[48];
      std::snprintf(buf, sizeof buf, "word 0x%08x", fetched_->word);
      e.fault = ErrorKind::IllegalInstruction;
      e.fault_detail = buf;
    }
    decoded_ = std::move(e);
    fetched_.reset();
  }

  // fetch
  if (fetch_blocked_ && unblock_at_ && *unblock_at_ <= now) {
    fetch_blocked_ = false;
    unblock_at_.reset();
  }
  auto poll = [&]() {
    if (!fetch_outstanding_ || fetched_) return;
    auto r = iport_.take_response(now);
    if (!r) return;
    fetch_outstanding_ = false;
    fetched_ = Fetched{outstanding_pc_, r->data, r->error};
    const auto d = isa::try_decode(r->data);
    if (r->error || !d || d->is_control() || d->mnemonic == isa::Mnemonic::Unsupported ||
        d->mnemonic == isa::Mnemonic::EBREAK) {
      fetch_blocked_ = true;
    }
  };
  poll();
  bool fetch_waiting = fetch_outstanding_;
  if (!fetch_outstanding_ && !fetch_blocked_ && iport_.ready()) {
    if (fetch_pc_ & 3) raise(ErrorKind::MisalignedAccess, "misaligned fetch", fetch_pc_, now);
    iport_.issue({MemOp::Read, fetch_pc_, 0, 0xf}, now);
    fetch_outstanding_ = true;
    outstanding_pc_ = fetch_pc_;
    fetch_pc_ += 4;
    poll();
  }

  if (!retired_now) {
    if (head_waits_memory) {
      ++stats_.stall_memory;
    } else if (hazard_blocked) {
      ++stats_.stall_raw;
    } else if (st_.window.empty() && !decoded_ && !fetched_) {
      if (fetch_blocked_) {
        ++stats_.stall_branch;
      } else if (fetch_waiting) {
        ++stats_.stall_memory;
      }
    }
  }
}

}  // namespace rvdse::cpu
