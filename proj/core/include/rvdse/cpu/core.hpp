#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rvdse/cpu/mem_port.hpp"
#include "rvdse/isa/instruction.hpp"
#include "rvdse/isa/semantics.hpp"
#include "rvdse/isa/trace.hpp"

namespace rvdse::cpu {

enum class CoreVariant { SingleCycle, Stall5, Bypass5, Bypass7, Ooo };

const char* variant_name(CoreVariant v);
CoreVariant variant_from_name(const std::string& name);  // throws InvalidConfig
inline constexpr std::array<CoreVariant, 5> kAllVariants = {
    CoreVariant::SingleCycle, CoreVariant::Stall5, CoreVariant::Bypass5, CoreVariant::Bypass7,
    CoreVariant::Ooo};

struct CoreStats {
  std::uint64_t cycles = 0;
  std::uint64_t retired = 0;
  std::uint64_t stall_raw = 0;       // data hazard (not load-use)
  std::uint64_t stall_load_use = 0;
  std::uint64_t stall_branch = 0;    // bubbles behind taken branches/jumps
  std::uint64_t stall_memory = 0;    // waiting on an instruction or data port
  std::uint64_t inserted_nops = 0;   // single-cycle: cycles spent on data accesses
  std::uint64_t loads = 0;
  std::uint64_t stores = 0;
  std::uint64_t taken_branches = 0;
  std::uint64_t discarded_fetches = 0;

  double cpi() const { return retired ? static_cast<double>(cycles) / static_cast<double>(retired) : 0.0; }
  bool operator==(const CoreStats&) const = default;
};

void to_json(nlohmann::json& j, const CoreStats& s);

struct OooParams {
  unsigned queue_length = 8;
  std::vector<unsigned> alu_latency = {1};  // one entry per ALU
  bool pipelined_alus = true;
  unsigned commit_capacity = 8;
};

// A single hart. The harness calls tick() once per global cycle until
// halted(). Errors raised by a retiring instruction carry hart, cycle and pc.
class Core {
 public:
  Core(unsigned hart, std::uint32_t entry_pc) : hart_(hart), entry_pc_(entry_pc) {}
  virtual ~Core() = default;

  virtual void tick(std::uint64_t now) = 0;

  unsigned hart() const { return hart_; }
  bool halted() const { return halted_; }
  isa::HaltReason halt_reason() const { return halt_reason_; }
  const CoreStats& stats() const { return stats_; }
  const isa::RetirementTrace& trace() const { return trace_; }
  const std::array<std::uint32_t, 32>& regs() const { return regs_; }

  void set_record_trace(bool on) { record_trace_ = on; }
  // Called after every retirement with the global cycle.
  void set_retire_hook(std::function<void(unsigned hart, std::uint64_t cycle, const isa::RetirementRecord&)> f) {
    retire_hook_ = std::move(f);
  }

 protected:
  // Bookkeeping shared by every variant: register write, trace, halt
  // detection (EBREAK or terminal self-loop), statistics.
  void retire(const isa::RetirementRecord& rec, const isa::DecodedInstruction& d, std::uint32_t next_pc,
              std::uint64_t now);
  void halt_unsupported();
  [[noreturn]] void raise(ErrorKind kind, const std::string& detail, std::uint32_t pc, std::uint64_t now) const;

  unsigned hart_;
  std::uint32_t entry_pc_;
  std::array<std::uint32_t, 32> regs_{};
  bool halted_ = false;
  isa::HaltReason halt_reason_ = isa::HaltReason::None;
  CoreStats stats_;
  isa::RetirementTrace trace_;
  bool record_trace_ = true;
  std::function<void(unsigned, std::uint64_t, const isa::RetirementRecord&)> retire_hook_;
};

// Record for a retiring instruction; `value` is the rd value (ignored when
// the instruction does not write rd).
isa::RetirementRecord make_record(std::uint32_t pc, const isa::DecodedInstruction& d, std::uint32_t value,
                                  const isa::StoreLanes* store, std::uint32_t store_addr);

std::unique_ptr<Core> make_core(CoreVariant variant, unsigned hart, std::uint32_t entry_pc, MemPort& iport,
                                MemPort& dport, const OooParams& ooo = {});

}  // namespace rvdse::cpu
