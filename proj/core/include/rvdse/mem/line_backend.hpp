#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "rvdse/error.hpp"
#include "rvdse/mem/main_memory.hpp"

namespace rvdse::mem {

enum class LineOp { Fill, WriteBack };

struct LineRequest {
  LineOp op = LineOp::Fill;
  std::uint32_t addr = 0;            // line base, byte address
  unsigned words = 1;
  std::vector<std::uint32_t> data;   // write-back payload
};

struct LineReply {
  LineOp op = LineOp::Fill;
  std::uint32_t addr = 0;
  std::vector<std::uint32_t> data;   // fill payload
  std::optional<ErrorKind> error;
};

// Contiguous address slices, one per node: node i owns
// [i * bytes_per_node, (i + 1) * bytes_per_node).
struct NodeMap {
  unsigned nodes = 1;
  std::uint32_t bytes_per_node = 0;

  std::optional<unsigned> owner(std::uint32_t addr) const;
};

struct WordTxn {
  bool write = false;
  std::uint32_t addr = 0;
  std::uint32_t data = 0;
};

struct RemoteTxn {
  unsigned node = 0;
  unsigned request_flits = 1;   // fill: 1; write-back: head + one per word
  unsigned response_flits = 1;  // fill: head + one per word; write-back: ack
};

struct Translation {
  std::vector<WordTxn> local;     // word transactions against local memory
  std::optional<RemoteTxn> remote;
  std::uint64_t local_cycles = 0; // words x latency
};

// Bridges a last-level-cache line request to word-granular memory accesses,
// or to one request packet for the node owning the address. Throws
// AddressUnmapped when no node owns it.
Translation memiface_translate(const LineRequest& req, unsigned latency, const NodeMap* map = nullptr,
                               unsigned local_node = 0);

// What the last-level cache talks to.
class LineBackend {
 public:
  virtual ~LineBackend() = default;
  virtual bool ready() const = 0;
  virtual void request(const LineRequest& req, std::uint64_t now) = 0;
  virtual std::optional<LineReply> poll(std::uint64_t now) = 0;
  virtual void tick(std::uint64_t /*now*/) {}
  virtual bool idle() const = 0;

  // Untimed access for flush-all, coherent reads and checks.
  virtual bool mapped(std::uint32_t addr) const = 0;
  virtual std::uint32_t peek(std::uint32_t addr) const = 0;
  virtual void poke(std::uint32_t addr, std::uint32_t value) = 0;

  std::uint64_t fills = 0;
  std::uint64_t writebacks = 0;
  std::uint64_t word_reads = 0;
  std::uint64_t word_writes = 0;
};

// Local memory: a line takes words x latency cycles, one request at a time.
class LocalLineBackend : public LineBackend {
 public:
  LocalLineBackend(MainMemory& memory, unsigned latency) : memory_(memory), latency_(latency) {}

  bool ready() const override { return !busy_; }
  void request(const LineRequest& req, std::uint64_t now) override;
  std::optional<LineReply> poll(std::uint64_t now) override;
  bool idle() const override { return !busy_; }

  bool mapped(std::uint32_t addr) const override { return memory_.contains(addr); }
  std::uint32_t peek(std::uint32_t addr) const override { return memory_.read(addr); }
  void poke(std::uint32_t addr, std::uint32_t value) override { memory_.write(addr, value); }

 private:
  MainMemory& memory_;
  unsigned latency_;
  bool busy_ = false;
  LineReply reply_;
  std::uint64_t ready_at_ = 0;
};

}  // namespace rvdse::mem
