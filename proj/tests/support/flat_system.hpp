#pragma once

#include <memory>

#include "rvdse/cpu/core.hpp"
#include "rvdse/mem/main_memory.hpp"

namespace rvdse::testing {

// One core on flat memory, no caches.
struct FlatSystem {
  mem::MainMemory memory;
  cpu::FlatPort iflat, dflat;
  cpu::HartIdPort dport;
  std::unique_ptr<cpu::Core> core;
  std::uint64_t cycles = 0;

  FlatSystem(cpu::CoreVariant v, const std::map<std::uint32_t, std::uint32_t>& image, unsigned latency,
             std::size_t words = 1u << 14, cpu::OooParams ooo = {})
      : memory(words), iflat(memory, latency), dflat(memory, latency), dport(dflat, 0, latency) {
    memory.load_image(image);
    core = cpu::make_core(v, 0, 0, iflat, dport, ooo);
  }

  void run(std::uint64_t max_cycles = 50'000'000) {
    while (!core->halted() && cycles < max_cycles) core->tick(cycles++);
  }
};

}  // namespace rvdse::testing
