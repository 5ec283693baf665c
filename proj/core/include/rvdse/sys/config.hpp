#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rvdse/asm/kernel.hpp"
#include "rvdse/cpu/core.hpp"
#include "rvdse/mem/cache_params.hpp"
#include "rvdse/mem/main_memory.hpp"
#include "rvdse/noc/network.hpp"
#include "rvdse/noc/topology.hpp"

namespace rvdse::sys {

struct CoreConfig {
  cpu::CoreVariant variant = cpu::CoreVariant::SingleCycle;
  cpu::OooParams ooo;
};

struct MemoryConfig {
  mem::MemoryKind kind = mem::MemoryKind::Sync;
  std::uint32_t size_bytes = 64 * 1024;
  unsigned latency = 1;  // resolved from kind
  unsigned address_bits = 32;
  bool separate = false;  // split instruction/data memories (cacheless only)
};

struct CachesConfig {
  std::vector<mem::CacheParams> l1i;  // one per core
  std::vector<mem::CacheParams> l1d;
  mem::CacheParams l2;
};

enum class InterconnectKind { None, SharedBus, Noc };
const char* interconnect_name(InterconnectKind k);

struct NocConfig {
  noc::TopologyConfig topology;
  noc::RouterParams router;
  unsigned cluster_node = 0;  // node holding the cores and caches
};

struct ProgramConfig {
  std::string benchmark;  // bundled benchmark, or
  std::string path;       // .vmh image or .s source
  std::map<std::string, std::uint32_t> params;
};

struct SystemConfig {
  std::string name = "system";
  std::uint64_t seed = 1;
  std::vector<CoreConfig> cores{CoreConfig{}};
  MemoryConfig memory;
  std::optional<CachesConfig> caches;
  InterconnectKind interconnect = InterconnectKind::None;
  NocConfig noc;
  ProgramConfig program;
  assembler::KernelParams kernel;  // for .s programs; harts = cores
  std::uint64_t max_cycles = 50'000'000;
  std::uint64_t stats_interval = 0;  // 0: no interval dumps
};

struct Issue {
  std::string path;  // JSON pointer into the config
  std::string message;
};

struct Validation {
  std::vector<Issue> errors;
  std::vector<Issue> warnings;
  bool ok() const { return errors.empty(); }
  nlohmann::json to_json() const;
};

// Full structural and semantic check. Never throws; every problem found is
// reported.
Validation validate_config(const nlohmann::json& j);

// validate_config, then defaults. Throws InvalidConfig listing all errors.
SystemConfig parse_config(const nlohmann::json& j, Validation* report = nullptr);

// Canonical document with every default made explicit; parse_config of it
// gives back the same system.
nlohmann::json resolved_config(const SystemConfig& cfg);

// JSON Schema (draft 2020-12) of the config document.
const nlohmann::json& config_schema();

nlohmann::json cache_params_json(const mem::CacheParams& p);

}  // namespace rvdse::sys
