#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rvdse/arbiter.hpp"
#include "rvdse/cpu/mem_port.hpp"
#include "rvdse/mem/cache_array.hpp"
#include "rvdse/mem/line_backend.hpp"

namespace rvdse::mem {

class CacheHierarchy;

struct PendingMiss {
  cpu::MemRequest req;
  BusMsg kind = BusMsg::Read;
  std::uint64_t issued_at = 0;
  bool granted = false;
};

// Private first-level cache. Hits complete after hit_latency cycles; a miss
// blocks the port until the shared bus finishes the transaction.
class L1Cache : public cpu::MemPort {
 public:
  L1Cache(unsigned id, std::string name, const CacheParams& p, CacheHierarchy& h);

  bool ready() const override { return !miss_ && responses_.size() < 2; }
  void issue(const cpu::MemRequest& req, std::uint64_t now) override;
  std::optional<cpu::MemResponse> take_response(std::uint64_t now) override;
  bool idle() const override { return !miss_ && responses_.empty(); }

  unsigned id() const { return id_; }
  const std::string& name() const { return name_; }
  CacheArray& array() { return array_; }
  const CacheArray& array() const { return array_; }
  const std::optional<PendingMiss>& pending() const { return miss_; }

 private:
  friend class CacheHierarchy;
  void respond(const cpu::MemResponse& r, std::uint64_t at) { responses_.push_back({r, at}); }

  struct Timed {
    cpu::MemResponse resp;
    std::uint64_t ready_at;
  };
  unsigned id_;
  std::string name_;
  CacheArray array_;
  CacheHierarchy& h_;
  std::optional<PendingMiss> miss_;
  std::deque<Timed> responses_;
};

// Shared last-level cache; arbitrates its ports round robin.
class LxCache {
 public:
  explicit LxCache(const CacheParams& p) : array_(p) {}

  void set_ports(unsigned n) { arb_.resize(n); }
  // Strict round robin among requesting ports.
  std::optional<unsigned> lx_serve(const std::vector<bool>& requesting) { return arb_.pick(requesting); }

  CacheArray& array() { return array_; }
  const CacheArray& array() const { return array_; }

 private:
  CacheArray array_;
  RoundRobinArbiter arb_{1};
};

// Bus drivers other than the L1s.
inline constexpr int kDriverController = -1;
inline constexpr int kDriverLx = -2;

struct BusEvent {
  std::uint64_t cycle = 0;
  int driver = kDriverController;  // L1 id, or one of the constants above
  BusMsg msg = BusMsg::NoReq;
  std::uint32_t addr = 0;
};

// One load or store becoming globally visible.
struct PerformedOp {
  std::uint64_t seq = 0;
  std::uint64_t cycle = 0;
  unsigned cache = 0;
  bool write = false;
  std::uint32_t addr = 0;
  std::uint32_t data = 0;  // value read, or write data
  std::uint8_t mask = 0xf;
};

// L1s + shared L2 on a snooping bus, in front of a line backend. The bus is
// atomic: a granted transaction owns it until it drives NO_REQ. Snoop
// responses belong to the granted transaction and go first.
class CacheHierarchy {
 public:
  CacheHierarchy(const CacheParams& l2, LineBackend& backend);

  // Line width of `p` must divide the L2 line width.
  L1Cache& add_l1(const std::string& name, const CacheParams& p);

  void tick(std::uint64_t now);
  bool idle() const;

  bool mapped(std::uint32_t addr) const { return backend_.mapped(addr); }
  // Writes every dirty line back to the backend and empties all caches.
  void flush_all();
  // Newest value of a word, wherever it lives.
  std::uint32_t coherent_read(std::uint32_t addr) const;

  // Empty when the invariant holds.
  std::vector<std::string> check_swmr() const;
  std::vector<std::string> check_inclusion() const;

  void set_bus_log(bool on) { log_on_ = on; }
  const std::vector<BusEvent>& bus_log() const { return log_; }
  void set_perform_hook(std::function<void(const PerformedOp&)> f) { hook_ = std::move(f); }

  std::size_t l1_count() const { return l1s_.size(); }
  L1Cache& l1(std::size_t i) { return *l1s_[i]; }
  const L1Cache& l1(std::size_t i) const { return *l1s_[i]; }
  LxCache& l2() { return l2_; }
  const LxCache& l2() const { return l2_; }

  std::uint64_t bus_busy_cycles() const { return busy_cycles_; }
  std::uint64_t transactions(BusMsg m) const { return by_kind_[static_cast<unsigned>(m)]; }
  nlohmann::json stats_json() const;

 private:
  friend class L1Cache;
  void performed(unsigned cache, bool write, std::uint32_t addr, std::uint32_t data, std::uint8_t mask,
                 std::uint64_t now);
  void log(std::uint64_t cycle, int driver, BusMsg m, std::uint32_t addr);

  struct Txn {
    enum class Phase { Timed, MemWriteBack, MemFill } phase = Phase::Timed;
    unsigned l1 = 0;
    BusMsg kind = BusMsg::Read;
    std::uint32_t addr = 0;
    std::uint32_t llc_base = 0;
    std::uint64_t ready_at = 0;
    unsigned l1_way = 0;
    Mesi fill_state = Mesi::Exclusive;
    bool l2_fill = false;
    unsigned l2_way = 0;
    std::optional<LineRequest> victim_wb;
    bool mem_issued = false;
    std::optional<ErrorKind> error;
  };

  void grant(std::uint64_t now);
  void advance(std::uint64_t now);
  void complete(std::uint64_t now);
  bool issue_memory(std::uint64_t now);

  // Applies `msg` to every line of L1 `c` inside the L2 line at llc_base.
  // Returns the number of dirty sub-lines written back.
  unsigned snoop_l1(L1Cache& c, std::uint32_t llc_base, BusMsg msg, std::uint64_t cycle, bool* any_valid);
  CacheLine& l2_line(std::uint32_t addr);

  LineBackend& backend_;
  LxCache l2_;
  std::vector<std::unique_ptr<L1Cache>> l1s_;
  std::optional<Txn> txn_;
  bool log_on_ = false;
  std::vector<BusEvent> log_;
  std::function<void(const PerformedOp&)> hook_;
  std::uint64_t seq_ = 0;
  std::uint64_t busy_cycles_ = 0;
  std::uint64_t last_completion_ = ~0ull;
  std::uint64_t grant_cycle_ = 0;
  std::array<std::uint64_t, 16> by_kind_{};
};

}  // namespace rvdse::mem
