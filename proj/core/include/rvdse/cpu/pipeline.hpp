#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rvdse/cpu/core.hpp"

namespace rvdse::cpu {

// Stage indices for the in-order variants.
//   5-stage: IF ID EX MEM WB          (fetch word needed in ID, data in WB)
//   7-stage: F1 F2 D E M1 M2 W        (fetch word needed in F2, data in M2)
struct StageLayout {
  unsigned fetch;       // issues the instruction fetch
  unsigned fetch_recv;  // needs the fetched word
  unsigned decode;
  unsigned execute;     // ALU, branch resolution, forwarding muxes
  unsigned mem;         // issues the data access
  unsigned mem_recv;    // needs the load data / store ack
  unsigned writeback;
  unsigned depth;
  std::vector<std::string> names;
};

StageLayout stage_layout(CoreVariant v);

// One pipeline latch. Invalid slots are bubbles.
struct StageSlot {
  bool valid = false;
  std::uint32_t pc = 0;
  bool fetch_issued = false;
  std::optional<std::uint32_t> word;
  bool decoded = false;
  isa::DecodedInstruction d;
  bool unsupported = false;
  std::optional<ErrorKind> fault;  // raised if the slot reaches writeback
  std::string fault_detail;
  std::uint32_t op1 = 0;
  std::uint32_t op2 = 0;
  bool executed = false;
  isa::ExecResult ex;
  isa::StoreLanes lanes;
  std::uint32_t value = 0;  // rd value once known
  bool value_ready = false;
  bool mem_issued = false;
  bool mem_done = false;
};

struct PipelineState {
  std::vector<StageSlot> stages;
};

enum class HazardKind { Proceed, Stall, Forward, Flush };

struct ForwardPath {
  unsigned operand;     // 1 = rs1, 2 = rs2
  unsigned from_stage;  // stage the value will come from when the decode
                        // instruction executes
};

struct HazardAction {
  HazardKind kind = HazardKind::Proceed;
  unsigned stall_cycles = 0;
  bool load_use = false;  // the blocking producer is a load
  std::vector<ForwardPath> paths;
};

// Decides what the instruction in the decode latch does this cycle, assuming
// every stage downstream of decode advances. Flush when the execute stage
// holds a resolved taken branch/jump. The stall-only variant never forwards
// and relies on a write-first register file; bypass variants forward ALU
// results from any later stage but load data only from writeback.
HazardAction detect_hazard(const PipelineState& state, CoreVariant variant);

class PipelineCore : public Core {
 public:
  PipelineCore(CoreVariant variant, unsigned hart, std::uint32_t entry_pc, MemPort& iport, MemPort& dport);
  void tick(std::uint64_t now) override;

  const PipelineState& state() const { return state_; }
  const StageLayout& layout() const { return layout_; }

 private:
  enum class StallCause { None, Memory, LoadUse, Raw };

  void deliver_fetches(std::uint64_t now);
  bool work(unsigned stage, std::uint64_t now, StallCause& cause);
  bool do_writeback(StageSlot& s, std::uint64_t now);
  bool take_data(StageSlot& s, std::uint64_t now);
  bool do_execute(StageSlot& s);
  void squash(StageSlot& s);

  CoreVariant variant_;
  StageLayout layout_;
  PipelineState state_;
  MemPort& iport_;
  MemPort& dport_;
  std::uint32_t fetch_pc_;
  bool fetch_stopped_ = false;
  unsigned discard_ = 0;  // squashed fetches whose responses are still due
  std::optional<std::uint32_t> redirect_;
};

}  // namespace rvdse::cpu
