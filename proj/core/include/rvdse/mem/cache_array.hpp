#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "rvdse/mem/cache_params.hpp"
#include "rvdse/mem/mesi.hpp"

namespace rvdse::mem {

struct CacheLine {
  std::uint32_t tag = 0;
  Mesi state = Mesi::Invalid;
  bool dirty = false;
  std::vector<std::uint32_t> data;
  unsigned lru = 0;  // 0 = least recently used

  bool valid() const { return state != Mesi::Invalid; }
};

// Invalid ways first (lowest index), then LRU rank 0, or a draw from `rng`.
unsigned select_victim(const std::vector<CacheLine>& set, ReplacementPolicy policy, std::minstd_rand& rng);

// Marks `way` most recently used: it takes rank ways-1 and every line
// ranked above its old rank moves down one.
void lru_touch(std::vector<CacheLine>& set, unsigned way);

struct CacheStats {
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t evictions = 0;
  std::uint64_t writebacks = 0;        // dirty data sent to the next level
  std::uint64_t snoop_writebacks = 0;  // of which forced by a snoop
  std::uint64_t invalidations = 0;     // lines invalidated by remote requests
  std::uint64_t upgrades = 0;          // S -> M write intents
  std::uint64_t flush_reqs = 0;        // lines given up for an L2 eviction

  double miss_rate() const { return hits + misses ? static_cast<double>(misses) / static_cast<double>(hits + misses) : 0.0; }
};

class CacheArray {
 public:
  explicit CacheArray(const CacheParams& p);

  const CacheParams& params() const { return p_; }
  std::vector<CacheLine>& set(std::uint32_t index) { return sets_[index]; }
  const std::vector<CacheLine>& set(std::uint32_t index) const { return sets_[index]; }

  // Way holding addr, if valid.
  std::optional<unsigned> find(std::uint32_t addr) const;
  CacheLine* line_for(std::uint32_t addr);
  const CacheLine* line_for(std::uint32_t addr) const;

  std::uint32_t line_base(std::uint32_t addr) const { return addr & ~(p_.line_bytes() - 1); }
  std::uint32_t base_of(std::uint32_t index, const CacheLine& l) const {
    return compose_address({l.tag, index, 0}, p_);
  }
  std::uint32_t index_of(std::uint32_t addr) const { return decompose_address(addr & ~3u, p_).index; }

  void touch(std::uint32_t addr);
  unsigned victim(std::uint32_t index) { return select_victim(sets_[index], p_.policy, rng_); }

  template <typename F>
  void for_each_valid(F f) const {
    for (std::uint32_t i = 0; i < sets_.size(); ++i) {
      for (const auto& l : sets_[i]) {
        if (l.valid()) f(base_of(i, l), l);
      }
    }
  }

  CacheStats stats;

 private:
  CacheParams p_;
  std::vector<std::vector<CacheLine>> sets_;
  std::minstd_rand rng_;
};

}  // namespace rvdse::mem
