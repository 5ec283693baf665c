#include "rvdse/cpu/mem_port.hpp"

#include "rvdse/isa/semantics.hpp"
#include "rvdse/mem/main_memory.hpp"

namespace rvdse::cpu {

FlatPort::FlatPort(mem::MainMemory& memory, unsigned latency) : memory_(memory), latency_(latency) {}

bool FlatPort::ready() const { return pending_.size() < (latency_ <= 1 ? 2u : 1u); }

void FlatPort::issue(const MemRequest& req, std::uint64_t now) {
  ++accesses_;
  Pending p{{req.addr, 0, std::nullopt}, now + latency_};
  if (!memory_.contains(req.addr)) {
    p.resp.error = ErrorKind::MemoryOutOfBounds;
  } else if (req.op == MemOp::Read) {
    p.resp.data = memory_.read(req.addr);
  } else if (req.op == MemOp::Write) {
    memory_.write(req.addr, req.data, req.mask);
  }
  pending_.push_back(p);
}

std::optional<MemResponse> FlatPort::take_response(std::uint64_t now) {
  if (pending_.empty() || pending_.front().ready_at > now) return std::nullopt;
  auto r = pending_.front().resp;
  pending_.pop_front();
  return r;
}

HartIdPort::HartIdPort(MemPort& inner, std::uint32_t hart_id, unsigned latency)
    : inner_(inner), hart_id_(hart_id), latency_(latency) {}

bool HartIdPort::ready() const { return inner_.ready(); }

void HartIdPort::issue(const MemRequest& req, std::uint64_t now) {
  if ((req.addr & ~3u) == isa::kHartIdAddress) {
    Slot s{true, {req.addr, hart_id_, std::nullopt}, now + latency_};
    if (req.op != MemOp::Read) s.resp.error = ErrorKind::MemoryOutOfBounds;
    order_.push_back(s);
    return;
  }
  inner_.issue(req, now);
  order_.push_back({false, {}, 0});
}

std::optional<MemResponse> HartIdPort::take_response(std::uint64_t now) {
  if (order_.empty()) return std::nullopt;
  if (order_.front().local) {
    if (order_.front().ready_at > now) return std::nullopt;
    auto r = order_.front().resp;
    order_.pop_front();
    return r;
  }
  auto r = inner_.take_response(now);
  if (r) order_.pop_front();
  return r;
}

}  // namespace rvdse::cpu
