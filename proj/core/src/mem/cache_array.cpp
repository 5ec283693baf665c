#include "rvdse/mem/cache_array.hpp"

namespace rvdse::mem {

unsigned select_victim(const std::vector<CacheLine>& set, ReplacementPolicy policy, std::minstd_rand& rng) {
  for (unsigned w = 0; w < set.size(); ++w) {
    if (!set[w].valid()) return w;
  }
  if (policy == ReplacementPolicy::Random) return static_cast<unsigned>(rng() % set.size());
  for (unsigned w = 0; w < set.size(); ++w) {
    if (set[w].lru == 0) return w;
  }
  return 0;
}

void lru_touch(std::vector<CacheLine>& set, unsigned way) {
  const unsigned old = set[way].lru;
  for (auto& l : set) {
    if (l.lru > old) --l.lru;
  }
  set[way].lru = static_cast<unsigned>(set.size()) - 1;
}

CacheArray::CacheArray(const CacheParams& p) : p_(p), rng_(p.seed) {
  sets_.resize(p.sets());
  for (auto& s : sets_) {
    s.resize(static_cast<std::size_t>(p.ways));
    for (unsigned w = 0; w < s.size(); ++w) {
      s[w].lru = w;
      s[w].data.assign(p.words_per_line(), 0);
    }
  }
}

std::optional<unsigned> CacheArray::find(std::uint32_t addr) const {
  const auto a = decompose_address(addr & ~3u, p_);
  const auto& s = sets_[a.index];
  for (unsigned w = 0; w < s.size(); ++w) {
    if (s[w].valid() && s[w].tag == a.tag) return w;
  }
  return std::nullopt;
}

CacheLine* CacheArray::line_for(std::uint32_t addr) {
  const auto w = find(addr);
  return w ? &sets_[index_of(addr)][*w] : nullptr;
}

const CacheLine* CacheArray::line_for(std::uint32_t addr) const {
  const auto w = find(addr);
  return w ? &sets_[index_of(addr)][*w] : nullptr;
}

void CacheArray::touch(std::uint32_t addr) {
  if (auto w = find(addr)) lru_touch(sets_[index_of(addr)], *w);
}

}  // namespace rvdse::mem
