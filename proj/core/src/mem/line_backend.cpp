#include "rvdse/mem/line_backend.hpp"

#include <cstdio>

namespace rvdse::mem {

std::optional<unsigned> NodeMap::owner(std::uint32_t addr) const {
  if (bytes_per_node == 0) return std::nullopt;
  const std::uint64_t node = addr / bytes_per_node;
  if (node >= nodes) return std::nullopt;
  return static_cast<unsigned>(node);
}

Translation memiface_translate(const LineRequest& req, unsigned latency, const NodeMap* map, unsigned local_node) {
  Translation t;
  if (map) {
    const auto owner = map->owner(req.addr);
    if (!owner) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "no node owns 0x%08x", req.addr);
      throw Error(ErrorKind::AddressUnmapped, buf);
    }
    if (*owner != local_node) {
      RemoteTxn r;
      r.node = *owner;
      if (req.op == LineOp::Fill) {
        r.request_flits = 1;
        r.response_flits = 1 + req.words;
      } else {
        r.request_flits = 1 + req.words;
        r.response_flits = 1;
      }
      t.remote = r;
      return t;
    }
  }
  for (unsigned i = 0; i < req.words; ++i) {
    WordTxn w;
    w.write = req.op == LineOp::WriteBack;
    w.addr = req.addr + 4 * i;
    if (w.write) w.data = i < req.data.size() ? req.data[i] : 0;
    t.local.push_back(w);
  }
  t.local_cycles = static_cast<std::uint64_t>(req.words) * latency;
  return t;
}

void LocalLineBackend::request(const LineRequest& req, std::uint64_t now) {
  const Translation t = memiface_translate(req, latency_);
  reply_ = LineReply{req.op, req.addr, {}, std::nullopt};
  for (const auto& w : t.local) {
    if (!memory_.contains(w.addr)) {
      reply_.error = ErrorKind::MemoryOutOfBounds;
      break;
    }
    if (w.write) {
      memory_.write(w.addr, w.data);
      ++word_writes;
    } else {
      reply_.data.push_back(memory_.read(w.addr));
      ++word_reads;
    }
  }
  if (req.op == LineOp::Fill) {
    ++fills;
  } else {
    ++writebacks;
  }
  busy_ = true;
  ready_at_ = now + t.local_cycles;
}

std::optional<LineReply> LocalLineBackend::poll(std::uint64_t now) {
  if (!busy_ || now < ready_at_) return std::nullopt;
  busy_ = false;
  return reply_;
}

}  // namespace rvdse::mem
