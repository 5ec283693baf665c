#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rvdse/asm/assembler.hpp"
#include "rvdse/asm/kernel.hpp"

namespace rvdse::sys {

// Assembly sources compiled into the library from programs/*.s.
struct EmbeddedProgram {
  std::string_view name;
  std::string_view source;
};

const std::vector<EmbeddedProgram>& embedded_programs();

std::optional<std::string_view> find_program_source(std::string_view name);

// A runnable benchmark: an embedded source plus default values for its
// parameter words (data labels patched after assembly).
struct BenchmarkInfo {
  std::string name;
  std::string source;  // embedded program name
  std::string description;
  std::map<std::string, std::uint32_t> params;
  // Label of the result word(s) and how many per hart (0 = single word).
  std::string result_label;
  bool per_hart_results = false;
};

const std::vector<BenchmarkInfo>& bundled_benchmarks();
const BenchmarkInfo* find_benchmark(std::string_view name);

// Start-up layout for bundled programs: 1 KiB stacks below 0x3ffc, so any
// program needs at least 16 KiB of memory.
assembler::KernelParams bundled_kernel_params(unsigned harts);

// Wraps, assembles and patches a bundled benchmark. `overrides` replaces
// parameter defaults. Throws InvalidConfig for unknown names or parameters.
assembler::AssembledProgram build_bundled_program(
    std::string_view name, unsigned harts,
    const std::map<std::string, std::uint32_t>& overrides = {});

}  // namespace rvdse::sys
