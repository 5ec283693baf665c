#include "rvdse/mem/main_memory.hpp"

#include <cstdio>

#include "rvdse/error.hpp"
#include "rvdse/isa/semantics.hpp"

namespace rvdse::mem {

const char* memory_kind_name(MemoryKind k) {
  switch (k) {
    case MemoryKind::Async: return "async";
    case MemoryKind::Sync: return "sync";
    case MemoryKind::OffChip: return "offchip";
  }
  return "async";
}

MemoryKind memory_kind_from_name(const std::string& name) {
  if (name == "async") return MemoryKind::Async;
  if (name == "sync") return MemoryKind::Sync;
  if (name == "offchip") return MemoryKind::OffChip;
  throw Error(ErrorKind::InvalidConfig, "unknown memory kind '" + name + "'");
}

unsigned memory_latency(MemoryKind k, unsigned offchip_latency) {
  switch (k) {
    case MemoryKind::Async: return 0;
    case MemoryKind::Sync: return 1;
    case MemoryKind::OffChip: return offchip_latency < 2 ? 2 : offchip_latency;
  }
  return 0;
}

namespace {
Error oob(std::uint32_t addr, std::size_t words) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "byte address 0x%08x beyond %zu-word memory", addr, words);
  return Error(ErrorKind::MemoryOutOfBounds, buf);
}
}  // namespace

std::uint32_t MainMemory::read(std::uint32_t byte_addr) const {
  if (!contains(byte_addr)) throw oob(byte_addr, words_.size());
  return words_[byte_addr >> 2];
}

void MainMemory::write(std::uint32_t byte_addr, std::uint32_t data, std::uint8_t mask) {
  if (!contains(byte_addr)) throw oob(byte_addr, words_.size());
  auto& w = words_[byte_addr >> 2];
  w = isa::merge_lanes(w, {data, mask});
}

void MainMemory::load_image(const std::map<std::uint32_t, std::uint32_t>& words) {
  for (const auto& [addr, word] : words) {
    if (addr >= words_.size()) {
      throw Error(ErrorKind::ProgramImageTooLarge,
                  "image word " + std::to_string(addr) + " beyond " + std::to_string(words_.size()) +
                      "-word memory");
    }
    words_[addr] = word;
  }
}

}  // namespace rvdse::mem
