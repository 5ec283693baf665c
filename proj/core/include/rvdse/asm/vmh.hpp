#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "rvdse/asm/assembler.hpp"

namespace rvdse::assembler {

// Verilog $readmemh-compatible text: one `@addr` record per contiguous run
// of words, 8 hex digits per word. An empty image renders as "".
std::string emit_vmh(const MemoryImage& image);

// Accepts whitespace-separated 1-8 digit hex words, `@HEX` word-address
// records, and // or /* */ comments. Short words zero-extend. Throws
// MalformedToken or AddressOverflow (beyond `limit_words` when given, or
// beyond the 32-bit byte address space).
MemoryImage parse_vmh(std::string_view text, std::optional<std::uint64_t> limit_words = std::nullopt);

MemoryImage read_vmh_file(const std::string& path);
void write_vmh_file(const std::string& path, const MemoryImage& image);

}  // namespace rvdse::assembler
