#include "rvdse/mem/cache_params.hpp"

#include <cstdio>

#include "rvdse/error.hpp"

namespace rvdse::mem {

const char* policy_name(ReplacementPolicy p) { return p == ReplacementPolicy::LRU ? "lru" : "random"; }

ReplacementPolicy policy_from_name(const std::string& s) {
  if (s == "lru") return ReplacementPolicy::LRU;
  if (s == "random") return ReplacementPolicy::Random;
  throw Error(ErrorKind::InvalidConfig, "unknown replacement policy '" + s + "'");
}

AddressParts decompose_address(std::uint32_t addr, const CacheParams& p) {
  if (addr & 3) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "0x%08x is not word aligned", addr);
    throw Error(ErrorKind::MisalignedAddress, buf);
  }
  const std::uint64_t word = addr >> 2;
  AddressParts a;
  a.offset = static_cast<std::uint32_t>(word & ((1ull << p.offset_bits) - 1));
  a.index = static_cast<std::uint32_t>((word >> p.offset_bits) & ((1ull << p.index_bits) - 1));
  a.tag = static_cast<std::uint32_t>(word >> (p.offset_bits + p.index_bits));
  return a;
}

std::uint32_t compose_address(const AddressParts& a, const CacheParams& p) {
  const std::uint64_t word = (static_cast<std::uint64_t>(a.tag) << (p.offset_bits + p.index_bits)) |
                             (static_cast<std::uint64_t>(a.index) << p.offset_bits) | a.offset;
  return static_cast<std::uint32_t>(word << 2);
}

}  // namespace rvdse::mem
