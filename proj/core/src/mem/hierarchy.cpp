#include "rvdse/mem/hierarchy.hpp"

#include <cstdio>
#include <map>

#include "rvdse/error.hpp"

namespace rvdse::mem {

namespace {

std::uint32_t lane_mask(std::uint8_t mask) {
  std::uint32_t m = 0;
  for (int b = 0; b < 4; ++b) {
    if (mask & (1u << b)) m |= 0xffu << (8 * b);
  }
  return m;
}

std::uint32_t merge(std::uint32_t old, std::uint32_t data, std::uint8_t mask) {
  const auto m = lane_mask(mask);
  return (old & ~m) | (data & m);
}

unsigned word_in_line(std::uint32_t addr, const CacheParams& p) {
  return (addr >> 2) & (p.words_per_line() - 1);
}

std::string hex(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

nlohmann::json cache_json(const std::string& name, const CacheArray& a) {
  const auto& p = a.params();
  const auto& s = a.stats;
  return {{"name", name},
          {"index_bits", p.index_bits},
          {"offset_bits", p.offset_bits},
          {"ways", p.ways},
          {"policy", policy_name(p.policy)},
          {"capacity_bytes", p.capacity_bytes()},
          {"reads", s.reads},
          {"writes", s.writes},
          {"hits", s.hits},
          {"misses", s.misses},
          {"miss_rate", s.miss_rate()},
          {"evictions", s.evictions},
          {"writebacks", s.writebacks},
          {"snoop_writebacks", s.snoop_writebacks},
          {"invalidations", s.invalidations},
          {"upgrades", s.upgrades},
          {"flush_reqs", s.flush_reqs}};
}

}  // namespace

// ---- L1 ----

L1Cache::L1Cache(unsigned id, std::string name, const CacheParams& p, CacheHierarchy& h)
    : id_(id), name_(std::move(name)), array_(p), h_(h) {}

void L1Cache::issue(const cpu::MemRequest& req, std::uint64_t now) {
  const std::uint64_t at = now + array_.params().hit_latency;
  const std::uint32_t addr = req.addr & ~3u;
  if (!h_.mapped(addr)) {
    respond({addr, 0, ErrorKind::MemoryOutOfBounds}, at);
    return;
  }
  auto& st = array_.stats;
  switch (req.op) {
    case cpu::MemOp::Read: {
      ++st.reads;
      if (auto* l = array_.line_for(addr)) {
        ++st.hits;
        array_.touch(addr);
        const auto v = l->data[word_in_line(addr, array_.params())];
        respond({addr, v, std::nullopt}, at);
        h_.performed(id_, false, addr, v, 0xf, now);
      } else {
        ++st.misses;
        miss_ = PendingMiss{req, BusMsg::Read, now, false};
      }
      break;
    }
    case cpu::MemOp::Write: {
      ++st.writes;
      auto* l = array_.line_for(addr);
      if (!l) {
        ++st.misses;
        miss_ = PendingMiss{req, BusMsg::ReadForOwnership, now, false};
        break;
      }
      ++st.hits;
      const auto w = mesi_local_write(l->state);
      if (w.bus != BusMsg::NoReq) {
        miss_ = PendingMiss{req, w.bus, now, false};
        break;
      }
      auto& d = l->data[word_in_line(addr, array_.params())];
      d = merge(d, req.data, req.mask);
      l->state = Mesi::Modified;
      l->dirty = true;
      array_.touch(addr);
      respond({addr, 0, std::nullopt}, at);
      h_.performed(id_, true, addr, req.data, req.mask, now);
      break;
    }
    case cpu::MemOp::Flush:
      miss_ = PendingMiss{req, BusMsg::Flush, now, false};
      break;
    case cpu::MemOp::Invalidate:
      miss_ = PendingMiss{req, BusMsg::Invalidate, now, false};
      break;
  }
}

std::optional<cpu::MemResponse> L1Cache::take_response(std::uint64_t now) {
  if (responses_.empty() || responses_.front().ready_at > now) return std::nullopt;
  auto r = responses_.front().resp;
  responses_.pop_front();
  return r;
}

// ---- hierarchy ----

CacheHierarchy::CacheHierarchy(const CacheParams& l2, LineBackend& backend) : backend_(backend), l2_(l2) {}

L1Cache& CacheHierarchy::add_l1(const std::string& name, const CacheParams& p) {
  if (p.offset_bits > l2_.array().params().offset_bits) {
    throw Error(ErrorKind::InvalidConfig, "L1 '" + name + "' line is wider than the shared cache line");
  }
  const auto id = static_cast<unsigned>(l1s_.size());
  l1s_.push_back(std::make_unique<L1Cache>(id, name, p, *this));
  l2_.set_ports(static_cast<unsigned>(l1s_.size()));
  return *l1s_.back();
}

bool CacheHierarchy::idle() const {
  if (txn_) return false;
  for (const auto& c : l1s_) {
    if (!c->idle()) return false;
  }
  return backend_.idle();
}

void CacheHierarchy::log(std::uint64_t cycle, int driver, BusMsg m, std::uint32_t addr) {
  if (log_on_) log_.push_back({cycle, driver, m, addr});
}

void CacheHierarchy::performed(unsigned cache, bool write, std::uint32_t addr, std::uint32_t data,
                               std::uint8_t mask, std::uint64_t now) {
  const PerformedOp op{seq_++, now, cache, write, addr, data, mask};
  if (hook_) hook_(op);
}

CacheLine& CacheHierarchy::l2_line(std::uint32_t addr) {
  auto* l = l2_.array().line_for(addr);
  if (!l) throw Error(ErrorKind::ProtocolViolation, "line " + hex(addr) + " held in an L1 but not in L2");
  return *l;
}

unsigned CacheHierarchy::snoop_l1(L1Cache& c, std::uint32_t llc_base, BusMsg msg, std::uint64_t cycle,
                                  bool* any_valid) {
  auto& a = c.array();
  const auto& p = a.params();
  const unsigned sub = l2_.array().params().words_per_line() / p.words_per_line();
  unsigned wbs = 0;
  for (unsigned k = 0; k < sub; ++k) {
    const std::uint32_t base = llc_base + k * p.line_bytes();
    CacheLine* l = a.line_for(base);
    if (!l) continue;
    const auto r = mesi_snoop(l->state, msg);
    if (r.action == SnoopAction::WriteBack || r.action == SnoopAction::WriteBackInvalidate) {
      auto& x = l2_line(base);
      const unsigned off = (base - llc_base) / 4;
      for (unsigned w = 0; w < p.words_per_line(); ++w) x.data[off + w] = l->data[w];
      x.dirty = true;
      x.state = Mesi::Modified;
      ++a.stats.writebacks;
      if (msg != BusMsg::FlushReq && msg != BusMsg::Flush) ++a.stats.snoop_writebacks;
      log(cycle + 1 + wbs, static_cast<int>(c.id()), BusMsg::WriteBack, base);
      ++wbs;
    }
    if (r.action == SnoopAction::Invalidate || r.action == SnoopAction::WriteBackInvalidate) {
      if (msg == BusMsg::FlushReq) {
        ++a.stats.flush_reqs;
        log(cycle, static_cast<int>(c.id()), BusMsg::FlushDone, base);
      } else {
        ++a.stats.invalidations;
        log(cycle, static_cast<int>(c.id()), BusMsg::InvalidateAck, base);
      }
    }
    l->state = r.next;
    if (l->state != Mesi::Modified) l->dirty = false;
    if (l->valid() && any_valid) *any_valid = true;
  }
  return wbs;
}

void CacheHierarchy::grant(std::uint64_t now) {
  std::vector<bool> req(l1s_.size());
  for (std::size_t i = 0; i < l1s_.size(); ++i) req[i] = l1s_[i]->miss_ && !l1s_[i]->miss_->granted;
  const auto g = l2_.lx_serve(req);
  if (!g) return;

  L1Cache& r = *l1s_[*g];
  PendingMiss& m = *r.miss_;
  m.granted = true;
  const int rid = static_cast<int>(*g);

  Txn t;
  t.l1 = *g;
  t.addr = m.req.addr & ~3u;
  t.kind = m.kind;
  if (t.kind == BusMsg::WriteIntent && !r.array().line_for(t.addr)) t.kind = BusMsg::ReadForOwnership;
  if (t.kind == BusMsg::WriteIntent) ++r.array().stats.upgrades;
  t.llc_base = l2_.array().line_base(t.addr);
  ++by_kind_[static_cast<unsigned>(t.kind)];
  log(now, rid, t.kind, t.addr);
  std::uint64_t c = now + 1;

  const bool fill = t.kind == BusMsg::Read || t.kind == BusMsg::ReadForOwnership;
  if (fill) {
    auto& a = r.array();
    const auto idx = a.index_of(t.addr);
    const unsigned way = a.victim(idx);
    CacheLine& v = a.set(idx)[way];
    if (v.valid()) {
      const auto base = a.base_of(idx, v);
      ++a.stats.evictions;
      if (v.state == Mesi::Modified) {
        auto& x = l2_line(base);
        const unsigned off = (base - l2_.array().line_base(base)) / 4;
        for (unsigned w = 0; w < v.data.size(); ++w) x.data[off + w] = v.data[w];
        x.dirty = true;
        x.state = Mesi::Modified;
        ++a.stats.writebacks;
        log(c++, rid, BusMsg::WriteBack, base);
      }
      v.state = Mesi::Invalid;
      v.dirty = false;
    }
    t.l1_way = way;
  }

  // Snoop phase; flush and invalidate also reach the requester's own copies.
  bool sharers = false;
  unsigned wbs = 0;
  for (auto& o : l1s_) {
    const bool self = o->id() == t.l1;
    if (self && fill) continue;
    if (self && t.kind == BusMsg::WriteIntent) continue;
    wbs += snoop_l1(*o, t.llc_base, t.kind, c + wbs, self ? nullptr : &sharers);
  }
  c += 1 + wbs;
  t.fill_state = t.kind == BusMsg::ReadForOwnership ? Mesi::Modified : sharers ? Mesi::Shared : Mesi::Exclusive;

  const unsigned l2_lat = l2_.array().params().hit_latency;
  auto& l2a = l2_.array();
  if (fill) {
    ++l2a.stats.reads;
    if (l2a.line_for(t.llc_base)) {
      ++l2a.stats.hits;
      l2a.touch(t.llc_base);
    } else {
      ++l2a.stats.misses;
      const auto idx = l2a.index_of(t.llc_base);
      const unsigned way = l2a.victim(idx);
      CacheLine& v = l2a.set(idx)[way];
      if (v.valid()) {
        const auto vbase = l2a.base_of(idx, v);
        bool held = false;
        for (auto& o : l1s_) {
          const auto& p = o->array().params();
          const unsigned sub = l2a.params().words_per_line() / p.words_per_line();
          for (unsigned k = 0; k < sub; ++k) held |= o->array().line_for(vbase + k * p.line_bytes()) != nullptr;
        }
        if (held) {
          log(c, kDriverLx, BusMsg::FlushReq, vbase);
          unsigned fw = 0;
          for (auto& o : l1s_) fw += snoop_l1(*o, vbase, BusMsg::FlushReq, c + fw, nullptr);
          c += 1 + fw;
        }
        ++l2a.stats.evictions;
        if (v.dirty) {
          ++l2a.stats.writebacks;
          t.victim_wb = LineRequest{LineOp::WriteBack, vbase, l2a.params().words_per_line(), v.data};
        }
        v.state = Mesi::Invalid;
        v.dirty = false;
      }
      t.l2_fill = true;
      t.l2_way = way;
    }
    c += l2_lat;
  } else if (t.kind == BusMsg::Flush || t.kind == BusMsg::Invalidate) {
    if (auto* x = l2a.line_for(t.llc_base)) {
      if (t.kind == BusMsg::Flush && x->dirty) {
        ++l2a.stats.writebacks;
        t.victim_wb = LineRequest{LineOp::WriteBack, t.llc_base, l2a.params().words_per_line(), x->data};
      }
      x->state = Mesi::Invalid;
      x->dirty = false;
    }
    c += l2_lat;
  }
  t.ready_at = c;
  txn_ = t;
  grant_cycle_ = now;
}

bool CacheHierarchy::issue_memory(std::uint64_t now) {
  Txn& t = *txn_;
  if (!t.mem_issued) {
    if (!backend_.ready()) return false;
    if (t.phase == Txn::Phase::MemWriteBack) {
      backend_.request(*t.victim_wb, now);
    } else {
      backend_.request(LineRequest{LineOp::Fill, t.llc_base, l2_.array().params().words_per_line(), {}}, now);
    }
    t.mem_issued = true;
  }
  auto reply = backend_.poll(now);
  if (!reply) return false;
  t.mem_issued = false;
  if (reply->error) t.error = reply->error;
  if (t.phase == Txn::Phase::MemFill && !reply->error) {
    auto& l2a = l2_.array();
    const auto idx = l2a.index_of(t.llc_base);
    auto& set = l2a.set(idx);
    CacheLine& x = set[t.l2_way];
    x.tag = decompose_address(t.llc_base, l2a.params()).tag;
    x.state = Mesi::Exclusive;
    x.dirty = false;
    x.data = reply->data;
    x.data.resize(l2a.params().words_per_line(), 0);
    lru_touch(set, t.l2_way);
  }
  return true;
}

void CacheHierarchy::advance(std::uint64_t now) {
  Txn& t = *txn_;
  if (t.phase == Txn::Phase::Timed) {
    if (now < t.ready_at) return;
    if (t.victim_wb) {
      t.phase = Txn::Phase::MemWriteBack;
    } else if (t.l2_fill) {
      t.phase = Txn::Phase::MemFill;
    } else {
      complete(now);
      return;
    }
  }
  if (t.phase == Txn::Phase::MemWriteBack) {
    if (!issue_memory(now)) return;
    t.victim_wb.reset();
    if (!t.l2_fill) {
      complete(now);
      return;
    }
    t.phase = Txn::Phase::MemFill;
  }
  if (t.phase == Txn::Phase::MemFill) {
    if (!issue_memory(now)) return;
    complete(now);
  }
}

void CacheHierarchy::complete(std::uint64_t now) {
  Txn t = *txn_;
  L1Cache& r = *l1s_[t.l1];
  const PendingMiss m = *r.miss_;
  r.miss_.reset();
  auto& a = r.array();
  const auto& p = a.params();

  if (t.error) {
    r.respond({t.addr, 0, t.error}, now);
  } else if (t.kind == BusMsg::Read || t.kind == BusMsg::ReadForOwnership) {
    const auto idx = a.index_of(t.addr);
    auto& set = a.set(idx);
    CacheLine& l = set[t.l1_way];
    const auto& x = l2_line(t.llc_base);
    const unsigned off = (a.line_base(t.addr) - t.llc_base) / 4;
    l.tag = decompose_address(t.addr, p).tag;
    l.state = t.fill_state;
    l.dirty = false;
    for (unsigned w = 0; w < p.words_per_line(); ++w) l.data[w] = x.data[off + w];
    lru_touch(set, t.l1_way);
    l2_.array().touch(t.llc_base);
    auto& d = l.data[word_in_line(t.addr, p)];
    if (m.req.op == cpu::MemOp::Read) {
      r.respond({t.addr, d, std::nullopt}, now);
      performed(t.l1, false, t.addr, d, 0xf, now);
    } else {
      d = merge(d, m.req.data, m.req.mask);
      l.state = Mesi::Modified;
      l.dirty = true;
      r.respond({t.addr, 0, std::nullopt}, now);
      performed(t.l1, true, t.addr, m.req.data, m.req.mask, now);
    }
  } else if (t.kind == BusMsg::WriteIntent) {
    CacheLine* l = a.line_for(t.addr);
    if (!l) throw Error(ErrorKind::ProtocolViolation, "upgrade of " + hex(t.addr) + " lost its line");
    auto& d = l->data[word_in_line(t.addr, p)];
    d = merge(d, m.req.data, m.req.mask);
    l->state = Mesi::Modified;
    l->dirty = true;
    a.touch(t.addr);
    r.respond({t.addr, 0, std::nullopt}, now);
    performed(t.l1, true, t.addr, m.req.data, m.req.mask, now);
  } else {
    r.respond({t.addr, 0, std::nullopt}, now);
  }
  log(now, kDriverController, BusMsg::NoReq, t.addr);
  busy_cycles_ += now - grant_cycle_ + 1;
  last_completion_ = now;
  txn_.reset();
}

void CacheHierarchy::tick(std::uint64_t now) {
  if (txn_) advance(now);
  if (!txn_ && last_completion_ != now) grant(now);
}

void CacheHierarchy::flush_all() {
  for (auto& c : l1s_) {
    auto& a = c->array();
    for (std::uint32_t i = 0; i < a.params().sets(); ++i) {
      for (auto& l : a.set(i)) {
        if (!l.valid()) continue;
        if (l.state == Mesi::Modified) {
          const auto base = a.base_of(i, l);
          auto& x = l2_line(base);
          const unsigned off = (base - l2_.array().line_base(base)) / 4;
          for (unsigned w = 0; w < l.data.size(); ++w) x.data[off + w] = l.data[w];
          x.dirty = true;
          x.state = Mesi::Modified;
        }
        l.state = Mesi::Invalid;
        l.dirty = false;
      }
    }
  }
  auto& l2a = l2_.array();
  for (std::uint32_t i = 0; i < l2a.params().sets(); ++i) {
    for (auto& l : l2a.set(i)) {
      if (!l.valid()) continue;
      if (l.dirty) {
        const auto base = l2a.base_of(i, l);
        for (unsigned w = 0; w < l.data.size(); ++w) backend_.poke(base + 4 * w, l.data[w]);
      }
      l.state = Mesi::Invalid;
      l.dirty = false;
    }
  }
  if (txn_ && txn_->victim_wb && !txn_->mem_issued) {
    const auto& v = *txn_->victim_wb;
    for (unsigned w = 0; w < v.data.size(); ++w) backend_.poke(v.addr + 4 * w, v.data[w]);
  }
}

std::uint32_t CacheHierarchy::coherent_read(std::uint32_t addr) const {
  addr &= ~3u;
  for (const auto& c : l1s_) {
    const auto* l = c->array().line_for(addr);
    if (l && l->state == Mesi::Modified) return l->data[word_in_line(addr, c->array().params())];
  }
  if (const auto* x = l2_.array().line_for(addr)) return x->data[word_in_line(addr, l2_.array().params())];
  if (txn_ && txn_->victim_wb && !txn_->mem_issued) {
    const auto& v = *txn_->victim_wb;
    if (addr >= v.addr && addr < v.addr + 4 * v.data.size()) return v.data[(addr - v.addr) / 4];
  }
  return backend_.peek(addr);
}

std::vector<std::string> CacheHierarchy::check_swmr() const {
  struct Holders {
    unsigned valid = 0;
    unsigned exclusive = 0;
  };
  std::map<std::uint32_t, Holders> words;
  for (const auto& c : l1s_) {
    c->array().for_each_valid([&](std::uint32_t base, const CacheLine& l) {
      for (unsigned w = 0; w < l.data.size(); ++w) {
        auto& h = words[base + 4 * w];
        ++h.valid;
        if (l.state == Mesi::Modified || l.state == Mesi::Exclusive) ++h.exclusive;
      }
    });
  }
  std::vector<std::string> out;
  for (const auto& [addr, h] : words) {
    if (h.exclusive > 0 && h.valid > 1) {
      out.push_back(hex(addr) + ": " + std::to_string(h.exclusive) + " exclusive holder(s) among " +
                    std::to_string(h.valid));
    }
  }
  return out;
}

std::vector<std::string> CacheHierarchy::check_inclusion() const {
  std::vector<std::string> out;
  for (const auto& c : l1s_) {
    c->array().for_each_valid([&](std::uint32_t base, const CacheLine& l) {
      if (!l2_.array().line_for(base)) out.push_back(c->name() + " holds " + hex(base) + " missing from L2");
      if (l.dirty && l.state != Mesi::Modified) out.push_back(c->name() + " dirty non-M line " + hex(base));
    });
  }
  return out;
}

nlohmann::json CacheHierarchy::stats_json() const {
  nlohmann::json j;
  j["l1"] = nlohmann::json::array();
  for (const auto& c : l1s_) j["l1"].push_back(cache_json(c->name(), c->array()));
  j["l2"] = cache_json("l2", l2_.array());
  nlohmann::json kinds = nlohmann::json::object();
  for (unsigned k = 0; k < by_kind_.size(); ++k) {
    if (by_kind_[k]) kinds[bus_msg_name(static_cast<BusMsg>(k))] = by_kind_[k];
  }
  j["bus"] = {{"busy_cycles", busy_cycles_}, {"transactions", kinds}};
  j["memory"] = {{"line_fills", backend_.fills},
                 {"line_writebacks", backend_.writebacks},
                 {"word_reads", backend_.word_reads},
                 {"word_writes", backend_.word_writes}};
  return j;
}

}  // namespace rvdse::mem
