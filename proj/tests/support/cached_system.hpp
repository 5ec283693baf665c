#pragma once

#include <memory>
#include <vector>

#include "rvdse/cpu/core.hpp"
#include "rvdse/mem/hierarchy.hpp"
#include "rvdse/mem/main_memory.hpp"

namespace rvdse::testing {

// N cores, split L1s, shared L2, local memory.
struct CachedSystem {
  mem::MainMemory memory;
  mem::LocalLineBackend backend;
  mem::CacheHierarchy caches;
  std::vector<std::unique_ptr<cpu::HartIdPort>> dports;
  std::vector<std::unique_ptr<cpu::Core>> cores;
  std::uint64_t cycles = 0;

  CachedSystem(cpu::CoreVariant v, const std::map<std::uint32_t, std::uint32_t>& image, unsigned harts,
               unsigned latency, mem::CacheParams l1, mem::CacheParams l2, std::size_t words = 1u << 14)
      : memory(words), backend(memory, latency), caches(l2, backend) {
    memory.load_image(image);
    for (unsigned h = 0; h < harts; ++h) {
      auto& ic = caches.add_l1("i" + std::to_string(h), l1);
      auto& dc = caches.add_l1("d" + std::to_string(h), l1);
      dports.push_back(std::make_unique<cpu::HartIdPort>(dc, h, 1));
      cores.push_back(cpu::make_core(v, h, 0, ic, *dports.back()));
    }
  }

  bool halted() const {
    for (const auto& c : cores) {
      if (!c->halted()) return false;
    }
    return true;
  }

  void step() {
    backend.tick(cycles);
    caches.tick(cycles);
    for (auto& c : cores) {
      if (!c->halted()) c->tick(cycles);
    }
    ++cycles;
  }

  void run(std::uint64_t max_cycles = 50'000'000) {
    while (!halted() && cycles < max_cycles) step();
  }
};

}  // namespace rvdse::testing
