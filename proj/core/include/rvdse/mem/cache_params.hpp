#pragma once

#include <cstdint>
#include <string>

namespace rvdse::mem {

enum class ReplacementPolicy { LRU, Random };
enum class CacheRole { L1, Lx };

const char* policy_name(ReplacementPolicy p);
ReplacementPolicy policy_from_name(const std::string& s);  // throws InvalidConfig

struct CacheParams {
  int index_bits = 6;   // sets = 2^index_bits
  int offset_bits = 2;  // words per line = 2^offset_bits
  int ways = 4;
  ReplacementPolicy policy = ReplacementPolicy::LRU;
  CacheRole role = CacheRole::L1;
  unsigned hit_latency = 1;
  std::uint32_t seed = 1;  // random replacement

  std::uint32_t sets() const { return 1u << index_bits; }
  std::uint32_t words_per_line() const { return 1u << offset_bits; }
  std::uint32_t line_bytes() const { return 4u << offset_bits; }
  std::uint64_t capacity_bytes() const {
    return static_cast<std::uint64_t>(sets()) * static_cast<std::uint64_t>(ways) * line_bytes();
  }
};

struct AddressParts {
  std::uint32_t tag = 0;
  std::uint32_t index = 0;
  std::uint32_t offset = 0;  // word within the line

  bool operator==(const AddressParts&) const = default;
};

// Throws MisalignedAddress unless addr is word aligned.
AddressParts decompose_address(std::uint32_t addr, const CacheParams& p);
std::uint32_t compose_address(const AddressParts& parts, const CacheParams& p);

}  // namespace rvdse::mem
