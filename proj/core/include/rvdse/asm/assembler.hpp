#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rvdse::assembler {

// Sparse word-addressed image plus the entry point (a byte address).
struct MemoryImage {
  std::map<std::uint32_t, std::uint32_t> words;
  std::uint32_t entry = 0;

  bool operator==(const MemoryImage&) const = default;
  bool empty() const { return words.empty(); }
  // One past the highest occupied word address.
  std::uint32_t extent_words() const;
};

struct AssemblySource {
  std::vector<std::string> lines;

  static AssemblySource from_text(std::string_view text);
  std::string text() const;
};

struct AssembledProgram {
  MemoryImage image;
  std::map<std::string, std::uint32_t> labels;  // name -> byte address
};

// Two-pass assembler. Supports the RV32I mnemonics, the pseudo-instructions
// li/la/mv/j/jr/ret/call/nop/not/neg/seqz/snez and the branch-with-zero
// forms, directives .org/.word/.globl/.equ/.text/.data/.align, `#` and `//`
// comments, and x0..x31 or ABI register names in any case.
// Entry point: the `_start` label when present, otherwise 0.
AssembledProgram assemble(const AssemblySource& source);
AssembledProgram assemble(std::string_view text);

// Labels only (first pass); used to check wrapper prerequisites.
std::map<std::string, std::uint32_t> collect_labels(const AssemblySource& source);

// Register number for "x5", "t0", "fp"...; -1 when not a register name.
int parse_register(std::string_view name);

}  // namespace rvdse::assembler
