#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rvdse::mem {

enum class MemoryKind { Async, Sync, OffChip };

const char* memory_kind_name(MemoryKind k);
MemoryKind memory_kind_from_name(const std::string& name);  // throws InvalidConfig

// Word-addressed backing store. Addresses here are byte addresses.
class MainMemory {
 public:
  explicit MainMemory(std::size_t words) : words_(words, 0) {}

  std::size_t size_words() const { return words_.size(); }
  bool contains(std::uint32_t byte_addr) const { return (byte_addr >> 2) < words_.size(); }

  // Both throw MemoryOutOfBounds.
  std::uint32_t read(std::uint32_t byte_addr) const;
  void write(std::uint32_t byte_addr, std::uint32_t data, std::uint8_t mask = 0xf);

  // Throws ProgramImageTooLarge when a word falls outside.
  void load_image(const std::map<std::uint32_t, std::uint32_t>& words);

  const std::vector<std::uint32_t>& words() const { return words_; }

 private:
  std::vector<std::uint32_t> words_;
};

// Latency per word access for a memory kind: 0 async, 1 sync, otherwise the
// configured off-chip latency (at least 2).
unsigned memory_latency(MemoryKind k, unsigned offchip_latency);

}  // namespace rvdse::mem
