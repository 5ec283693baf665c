#include "rvdse/noc/memory_backend.hpp"

#include <algorithm>

namespace rvdse::noc {

NocLineBackend::NocLineBackend(Network& net, mem::MainMemory& memory, mem::NodeMap map, unsigned local_node,
                               unsigned latency, unsigned line_words)
    : net_(net), memory_(memory), map_(map), local_(local_node), latency_(latency), line_words_(line_words) {
  controller_free_.assign(net_.nodes(), 0);
}

bool NocLineBackend::mapped(std::uint32_t addr) const {
  return memory_.contains(addr) && map_.owner(addr).has_value();
}

bool NocLineBackend::idle() const { return !busy_ && outbox_.empty() && net_.idle(); }

void NocLineBackend::request(const mem::LineRequest& req, std::uint64_t now) {
  const auto t = mem::memiface_translate(req, latency_, &map_, local_);
  busy_ = true;
  reply_ = mem::LineReply{req.op, req.addr, {}, std::nullopt};
  if (req.op == mem::LineOp::Fill) {
    ++fills;
  } else {
    ++writebacks;
  }
  if (t.remote) {
    remote_ = true;
    ++remote_requests;
    std::vector<std::uint32_t> payload{req.addr};
    if (req.op == mem::LineOp::WriteBack) payload.insert(payload.end(), req.data.begin(), req.data.end());
    net_.send(local_, t.remote->node, payload, now, req.op == mem::LineOp::Fill ? kFill : kWriteBack);
    return;
  }
  remote_ = false;
  for (const auto& w : t.local) {
    if (w.write) {
      memory_.write(w.addr, w.data);
      ++word_writes;
    } else {
      reply_.data.push_back(memory_.read(w.addr));
      ++word_reads;
    }
  }
  ready_at_ = now + t.local_cycles;
}

std::optional<mem::LineReply> NocLineBackend::poll(std::uint64_t now) {
  if (!busy_) return std::nullopt;
  if (!remote_) {
    if (now < ready_at_) return std::nullopt;
    busy_ = false;
    return reply_;
  }
  auto p = net_.receive(local_);
  if (!p) return std::nullopt;
  busy_ = false;
  if (p->tag == kFillData) reply_.data.assign(p->payload.begin() + 1, p->payload.end());
  return reply_;
}

void NocLineBackend::tick(std::uint64_t now) {
  // memory controllers at the other nodes
  for (unsigned k = 0; k < net_.nodes(); ++k) {
    if (k == local_) continue;
    while (auto p = net_.receive(k)) {
      const std::uint32_t base = p->payload.at(0);
      const unsigned words = p->tag == kFill ? 0 : static_cast<unsigned>(p->payload.size() - 1);
      std::vector<std::uint32_t> out{base};
      unsigned n = words;
      if (p->tag == kFill) {
        n = line_words_;
        for (unsigned i = 0; i < n; ++i) {
          out.push_back(memory_.read(base + 4 * i));
          ++word_reads;
        }
      } else {
        for (unsigned i = 0; i < n; ++i) {
          memory_.write(base + 4 * i, p->payload[1 + i]);
          ++word_writes;
        }
      }
      const std::uint64_t start = std::max(now, controller_free_[k]);
      controller_free_[k] = start + static_cast<std::uint64_t>(n) * latency_;
      outbox_.push_back({controller_free_[k], k, p->src, std::move(out), p->tag == kFill ? kFillData : kAck});
    }
  }
  for (auto it = outbox_.begin(); it != outbox_.end();) {
    if (it->at <= now) {
      net_.send(it->from, it->to, it->payload, now, it->tag);
      it = outbox_.erase(it);
    } else {
      ++it;
    }
  }
  net_.tick(now);
}

}  // namespace rvdse::noc
