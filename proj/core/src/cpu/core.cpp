#include "rvdse/cpu/core.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

#include "rvdse/cpu/ooo.hpp"
#include "rvdse/isa/golden.hpp"
#include "rvdse/cpu/pipeline.hpp"
#include "rvdse/cpu/single_cycle.hpp"

namespace rvdse::cpu {

const char* variant_name(CoreVariant v) {
  switch (v) {
    case CoreVariant::SingleCycle: return "single-cycle";
    case CoreVariant::Stall5: return "5-stall";
    case CoreVariant::Bypass5: return "5-bypass";
    case CoreVariant::Bypass7: return "7-bypass";
    case CoreVariant::Ooo: return "ooo";
  }
  return "single-cycle";
}

CoreVariant variant_from_name(const std::string& name) {
  for (auto v : kAllVariants) {
    if (name == variant_name(v)) return v;
  }
  throw Error(ErrorKind::InvalidConfig, "unknown core variant '" + name + "'");
}

void to_json(nlohmann::json& j, const CoreStats& s) {
  j = {{"cycles", s.cycles},
       {"retired", s.retired},
       {"cpi", s.cpi()},
       {"ipc", s.cycles ? static_cast<double>(s.retired) / static_cast<double>(s.cycles) : 0.0},
       {"stalls",
        {{"raw_hazard", s.stall_raw},
         {"load_use", s.stall_load_use},
         {"branch", s.stall_branch},
         {"memory_wait", s.stall_memory}}},
       {"inserted_nops", s.inserted_nops},
       {"loads", s.loads},
       {"stores", s.stores},
       {"taken_branches", s.taken_branches},
       {"discarded_fetches", s.discarded_fetches}};
}

isa::RetirementRecord make_record(std::uint32_t pc, const isa::DecodedInstruction& d, std::uint32_t value,
                                  const isa::StoreLanes* store, std::uint32_t store_addr) {
  isa::RetirementRecord r;
  r.pc = pc;
  r.instr = d.raw;
  if (d.writes_rd()) {
    r.rd = d.rd;
    r.value = value;
  }
  if (store) {
    r.store = true;
    r.mem_addr = store_addr & ~3u;
    r.mem_data = store->data;
    r.mem_mask = store->mask;
  }
  return r;
}

void Core::retire(const isa::RetirementRecord& rec, const isa::DecodedInstruction& d, std::uint32_t next_pc,
                  std::uint64_t now) {
  std::uint32_t previous = 0;
  if (d.writes_rd()) {
    previous = regs_[d.rd];
    regs_[d.rd] = rec.value;
  }
  ++stats_.retired;
  if (d.is_load()) ++stats_.loads;
  if (d.is_store()) ++stats_.stores;
  if (record_trace_) trace_.push_back(rec);
  if (retire_hook_) retire_hook_(hart_, now, rec);
  if (d.mnemonic == isa::Mnemonic::EBREAK) {
    halted_ = true;
    halt_reason_ = isa::HaltReason::Ebreak;
  } else if (isa::is_terminal_loop(rec, next_pc, previous)) {
    halted_ = true;
    halt_reason_ = isa::HaltReason::SelfLoop;
  }
}

void Core::halt_unsupported() {
  halted_ = true;
  halt_reason_ = isa::HaltReason::Unsupported;
}

void Core::raise(ErrorKind kind, const std::string& detail, std::uint32_t pc, std::uint64_t now) const {
  throw Error(kind, detail).at_pc(pc).at_cycle(now).at_hart(static_cast<int>(hart_));
}

std::unique_ptr<Core> make_core(CoreVariant variant, unsigned hart, std::uint32_t entry_pc, MemPort& iport,
                                MemPort& dport, const OooParams& ooo) {
  switch (variant) {
    case CoreVariant::SingleCycle:
      return std::make_unique<SingleCycleCore>(hart, entry_pc, iport, dport);
    case CoreVariant::Stall5:
    case CoreVariant::Bypass5:
    case CoreVariant::Bypass7:
      return std::make_unique<PipelineCore>(variant, hart, entry_pc, iport, dport);
    case CoreVariant::Ooo:
      return std::make_unique<OooCore>(hart, entry_pc, iport, dport, ooo);
  }
  return nullptr;
}

}  // namespace rvdse::cpu
