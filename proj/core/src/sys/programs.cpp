#include "rvdse/sys/programs.hpp"

#include "rvdse/error.hpp"

namespace rvdse::sys {

std::optional<std::string_view> find_program_source(std::string_view name) {
  for (const auto& p : embedded_programs()) {
    if (p.name == name) return p.source;
  }
  return std::nullopt;
}

const std::vector<BenchmarkInfo>& bundled_benchmarks() {
  static const std::vector<BenchmarkInfo> list = {
      {"factorial", "factorial", "10! by recursion and shift-add multiply, repeated `reps` times",
       {{"reps", 16}}, "result", false},
      {"prime", "prime", "counts primes below `limit` (trial division, soft remainder)",
       {{"limit", 100}}, "results", true},
      {"prime_parallel", "prime", "prime with a larger limit, for multi-hart scaling runs",
       {{"limit", 1200}}, "results", true},
      {"mandelbrot", "mandelbrot", "16x12 Q12 fixed-point Mandelbrot, rotate-xor checksum of iteration counts",
       {}, "checksum", false},
  };
  return list;
}

const BenchmarkInfo* find_benchmark(std::string_view name) {
  for (const auto& b : bundled_benchmarks()) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

assembler::KernelParams bundled_kernel_params(unsigned harts) {
  assembler::KernelParams p;
  p.stack_pointer = 0x3ffc;
  p.stack_size = 0x400;
  p.harts = harts;
  return p;
}

assembler::AssembledProgram build_bundled_program(std::string_view name, unsigned harts,
                                                  const std::map<std::string, std::uint32_t>& overrides) {
  const BenchmarkInfo* info = find_benchmark(name);
  if (!info) throw Error(ErrorKind::InvalidConfig, "unknown benchmark '" + std::string(name) + "'");
  const auto src = find_program_source(info->source);
  if (!src) throw Error(ErrorKind::InvalidConfig, "missing program source '" + info->source + "'");

  auto wrapped = assembler::wrap_kernel(assembler::AssemblySource::from_text(*src), bundled_kernel_params(harts));
  auto program = assembler::assemble(wrapped);

  auto params = info->params;
  for (const auto& [k, v] : overrides) {
    if (!params.count(k)) {
      throw Error(ErrorKind::InvalidConfig, "benchmark '" + info->name + "' has no parameter '" + k + "'");
    }
    params[k] = v;
  }
  for (const auto& [label, value] : params) {
    const auto it = program.labels.find(label);
    if (it == program.labels.end()) {
      throw Error(ErrorKind::InvalidConfig, "parameter label '" + label + "' not found");
    }
    program.image.words[it->second / 4] = value;
  }
  return program;
}

}  // namespace rvdse::sys
