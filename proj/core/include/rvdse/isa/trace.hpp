#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rvdse::isa {

// One retired instruction. rd/value are zero when nothing is written.
struct RetirementRecord {
  std::uint32_t pc = 0;
  std::uint32_t instr = 0;
  std::uint8_t rd = 0;
  std::uint32_t value = 0;
  bool store = false;
  std::uint32_t mem_addr = 0;  // word-aligned byte address of the store
  std::uint32_t mem_data = 0;  // data already shifted into lanes
  std::uint8_t mem_mask = 0;

  bool operator==(const RetirementRecord&) const = default;
};

using RetirementTrace = std::vector<RetirementRecord>;

enum class HaltReason : std::uint8_t { None, SelfLoop, Ebreak, Unsupported };

const char* halt_reason_name(HaltReason r);

// "pc=%08x instr=%08x rd=%d val=%08x"
std::string format_record(const RetirementRecord& r);
void write_trace_text(std::ostream& os, const RetirementTrace& trace);
// One JSON object per line; includes the store effect.
void write_trace_jsonl(std::ostream& os, const RetirementTrace& trace);

// Index of the first differing record, or -1 when the traces are equal.
long first_mismatch(const RetirementTrace& a, const RetirementTrace& b);

}  // namespace rvdse::isa
