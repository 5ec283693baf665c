#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "rvdse/mem/line_backend.hpp"
#include "rvdse/noc/network.hpp"

namespace rvdse::noc {

// Distributed memory: node k owns one contiguous slice of `memory`. Lines
// owned by the local node are served directly; others travel as packets to
// the owner's memory controller and back.
class NocLineBackend : public mem::LineBackend {
 public:
  NocLineBackend(Network& net, mem::MainMemory& memory, mem::NodeMap map, unsigned local_node, unsigned latency,
                 unsigned line_words);

  bool ready() const override { return !busy_; }
  void request(const mem::LineRequest& req, std::uint64_t now) override;
  std::optional<mem::LineReply> poll(std::uint64_t now) override;
  void tick(std::uint64_t now) override;
  bool idle() const override;

  bool mapped(std::uint32_t addr) const override;
  std::uint32_t peek(std::uint32_t addr) const override { return memory_.read(addr); }
  void poke(std::uint32_t addr, std::uint32_t value) override { memory_.write(addr, value); }

  std::uint64_t remote_requests = 0;

 private:
  enum Tag : std::uint32_t { kFill = 0, kWriteBack = 1, kFillData = 2, kAck = 3 };
  struct Scheduled {
    std::uint64_t at;
    unsigned from;
    unsigned to;
    std::vector<std::uint32_t> payload;
    std::uint32_t tag;
  };

  Network& net_;
  mem::MainMemory& memory_;
  mem::NodeMap map_;
  unsigned local_;
  unsigned latency_;
  unsigned line_words_;  // a fill request is one flit, so the width is fixed per system
  bool busy_ = false;
  bool remote_ = false;
  mem::LineReply reply_;
  std::uint64_t ready_at_ = 0;
  std::vector<std::uint64_t> controller_free_;  // per node
  std::deque<Scheduled> outbox_;
};

}  // namespace rvdse::noc
