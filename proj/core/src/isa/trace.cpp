#include "rvdse/isa/trace.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

namespace rvdse::isa {

const char* halt_reason_name(HaltReason r) {
  switch (r) {
    case HaltReason::None: return "none";
    case HaltReason::SelfLoop: return "self-loop";
    case HaltReason::Ebreak: return "ebreak";
    case HaltReason::Unsupported: return "unsupported-instruction";
  }
  return "none";
}

std::string format_record(const RetirementRecord& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "pc=%08x instr=%08x rd=%d val=%08x", r.pc, r.instr, r.rd, r.value);
  return buf;
}

void write_trace_text(std::ostream& os, const RetirementTrace& trace) {
  for (const auto& r : trace) os << format_record(r) << '\n';
}

void write_trace_jsonl(std::ostream& os, const RetirementTrace& trace) {
  for (const auto& r : trace) {
    nlohmann::json j = {{"pc", r.pc}, {"instr", r.instr}, {"rd", r.rd}, {"val", r.value}};
    if (r.store) {
      j["store"] = {{"addr", r.mem_addr}, {"data", r.mem_data}, {"mask", r.mem_mask}};
    }
    os << j.dump() << '\n';
  }
}

long first_mismatch(const RetirementTrace& a, const RetirementTrace& b) {
  const auto n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!(a[i] == b[i])) return static_cast<long>(i);
  }
  if (a.size() != b.size()) return static_cast<long>(n);
  return -1;
}

}  // namespace rvdse::isa
