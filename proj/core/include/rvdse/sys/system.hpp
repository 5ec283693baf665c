#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rvdse/asm/assembler.hpp"
#include "rvdse/cpu/core.hpp"
#include "rvdse/mem/hierarchy.hpp"
#include "rvdse/mem/main_memory.hpp"
#include "rvdse/noc/memory_backend.hpp"
#include "rvdse/noc/network.hpp"
#include "rvdse/sys/config.hpp"

namespace rvdse::sys {

struct LoadedProgram {
  std::string name;
  assembler::MemoryImage image;
  std::map<std::string, std::uint32_t> labels;
  std::string result_label;  // empty when unknown
  bool per_hart_results = false;
};

// Bundled benchmark, .vmh image or .s source (wrapped with cfg.kernel).
// `path` overrides cfg.program. Throws InvalidConfig / assembler errors.
LoadedProgram load_program(const SystemConfig& cfg, const std::string& path = {});

enum class RunStatus { Halted, CycleLimit, Error };
const char* run_status_name(RunStatus s);

// One simulated system. Per cycle, in this order: memory backend (remote
// memory controllers, then NoC routers), cache hierarchy (bus completions,
// then grants), cores. Everything a component publishes in cycle t is seen
// by the others from cycle t+1, so the order of the cores among themselves
// does not matter.
class System {
 public:
  System(const SystemConfig& cfg, const LoadedProgram& program);
  ~System();
  System(const System&) = delete;
  System& operator=(const System&) = delete;

  void step();
  // Runs until every hart halts or the cycle limit. Component errors stop
  // the run and are reported, annotated with cycle and hart.
  RunStatus run(std::optional<std::uint64_t> max_cycles = std::nullopt);

  bool halted() const;
  std::uint64_t cycle() const { return now_; }
  unsigned harts() const { return static_cast<unsigned>(cores_.size()); }
  cpu::Core& core(unsigned i) { return *cores_[i]; }
  const cpu::Core& core(unsigned i) const { return *cores_[i]; }
  const std::string& error_message() const { return error_; }
  RunStatus status() const { return status_; }

  // Architectural view of a memory word, wherever the newest copy lives.
  std::uint32_t read_word(std::uint32_t addr) const;
  // Writes all dirty cache lines back to memory.
  void flush_caches();
  const mem::MainMemory& memory() const { return *memory_; }

  std::vector<std::uint32_t> results() const;

  mem::CacheHierarchy* caches() { return caches_.get(); }
  const mem::CacheHierarchy* caches() const { return caches_.get(); }
  noc::Network* network() { return network_.get(); }

  // Permutation of hart indices; used to check order independence.
  void set_core_order(std::vector<unsigned> order) { order_ = std::move(order); }
  void set_record_trace(bool on);

  // Statistics report ("rvdse-stats/1"). The "host" section holds wall-clock data and is the
  // only part that differs between identical runs.
  nlohmann::json report() const;

 private:
  void snapshot();

  SystemConfig cfg_;
  LoadedProgram program_;
  std::unique_ptr<mem::MainMemory> memory_;
  std::unique_ptr<mem::MainMemory> imemory_;  // separate layout only
  std::vector<std::unique_ptr<cpu::MemPort>> ports_;
  std::unique_ptr<noc::Network> network_;
  std::unique_ptr<mem::LineBackend> backend_;
  std::unique_ptr<mem::CacheHierarchy> caches_;
  std::vector<std::unique_ptr<cpu::Core>> cores_;
  std::vector<unsigned> order_;
  std::vector<cpu::FlatPort*> flat_ports_;
  std::uint64_t now_ = 0;
  RunStatus status_ = RunStatus::Halted;
  std::string error_;
  double wall_seconds_ = 0;
  std::vector<nlohmann::json> intervals_;
};

// JSON Schema of System::report().
const nlohmann::json& stats_schema();

// cycles(baseline) / cycles(report).
double speedup(const nlohmann::json& baseline, const nlohmann::json& report);

// Drops the wall-clock section so reports can be compared for equality.
nlohmann::json deterministic_part(const nlohmann::json& report);

}  // namespace rvdse::sys
