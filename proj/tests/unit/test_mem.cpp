#include <doctest.h>

#include "mesi_stress.hpp"

using namespace rvdse;

TEST_CASE("mesi stress matches sequential consistency") {
  for (std::uint32_t seed = 1; seed <= 4; ++seed) {
    for (bool het : {false, true}) {
      testing::StressConfig cfg;
      cfg.seed = seed;
      cfg.ops = 3000;
      cfg.heterogeneous = het;
      cfg.memory_latency = seed % 3;
      const auto r = testing::run_mesi_stress(cfg);
      CAPTURE(seed);
      CAPTURE(het);
      CHECK_MESSAGE(r.ok, r.failure);
      CHECK(r.reads_checked > 500);
      MESSAGE("cycles=" << r.cycles << " performed=" << r.performed << " reads=" << r.reads_checked);
    }
  }
}

#include "lru_oracle.hpp"
#include "rvdse/error.hpp"
#include "rvdse/mem/line_backend.hpp"

TEST_CASE("address decomposition") {
  mem::CacheParams p;
  p.offset_bits = 2;
  p.index_bits = 4;
  CHECK(mem::decompose_address(0x44, p) == mem::AddressParts{0, 4, 1});
  CHECK(mem::decompose_address(0, p) == mem::AddressParts{0, 0, 0});
  CHECK_THROWS_AS(mem::decompose_address(0x42, p), Error);

  // bit-slice oracle: shift/mask by hand
  std::mt19937 rng(7);
  for (int i = 0; i < 2000; ++i) {
    p.offset_bits = static_cast<int>(rng() % 5);
    p.index_bits = static_cast<int>(rng() % 9);
    const std::uint32_t a = rng() & ~3u;
    const std::uint32_t word = a / 4;
    const std::uint32_t off = word % (1u << p.offset_bits);
    const std::uint32_t idx = (word >> p.offset_bits) % (1u << p.index_bits);
    const std::uint32_t tag = static_cast<std::uint32_t>(std::uint64_t{word} >> (p.offset_bits + p.index_bits));
    const auto parts = mem::decompose_address(a, p);
    REQUIRE(parts == mem::AddressParts{tag, idx, off});
    REQUIRE(mem::compose_address(parts, p) == a);
    const std::uint32_t b = a ^ (1u << (2 + p.offset_bits + p.index_bits + rng() % 4));
    const auto pb = mem::decompose_address(b, p);
    REQUIRE(pb.index == parts.index);
    REQUIRE(pb.tag != parts.tag);
  }
  p.offset_bits = 2;
  p.index_bits = 6;
  p.ways = 4;
  CHECK(p.capacity_bytes() == 64u * 4 * 16);
}

TEST_CASE("victim selection") {
  mem::CacheParams p;
  p.index_bits = 0;
  p.offset_bits = 0;
  auto run = [&](int ways, std::initializer_list<unsigned> touches) {
    p.ways = ways;
    mem::CacheArray a(p);
    for (unsigned w = 0; w < static_cast<unsigned>(ways); ++w) {
      a.set(0)[w].state = mem::Mesi::Shared;
      a.set(0)[w].tag = w;
    }
    for (auto w : touches) mem::lru_touch(a.set(0), w);
    return a.victim(0);
  };
  CHECK(run(4, {0, 1, 2, 3}) == 0);
  CHECK(run(2, {0, 1, 0}) == 1);

  p.ways = 4;
  mem::CacheArray a(p);
  a.set(0)[0].state = mem::Mesi::Modified;
  a.set(0)[2].state = mem::Mesi::Shared;
  CHECK(a.victim(0) == 1);  // invalid ways first

  for (unsigned ways : {1u, 2u, 4u, 8u, 16u}) {
    for (std::uint32_t seed = 0; seed < 40; ++seed) REQUIRE(testing::lru_trace_mismatches(ways, seed) == 0);
  }
}

TEST_CASE("random replacement is a seeded minimal-standard generator") {
  // x(n+1) = 48271 x(n) mod (2^31 - 1)
  const std::uint32_t golden[] = {48271u, 182605794u, 1291394886u, 1914720637u, 2078669041u, 407355683u};
  std::uint64_t x = 1;
  for (auto g : golden) {
    x = x * 48271u % 2147483647u;
    CHECK(x == g);
  }
  mem::CacheParams p;
  p.index_bits = 0;
  p.offset_bits = 0;
  p.ways = 4;
  p.policy = mem::ReplacementPolicy::Random;
  p.seed = 1;
  mem::CacheArray a(p);
  for (auto& l : a.set(0)) l.state = mem::Mesi::Shared;
  for (auto g : golden) CHECK(a.victim(0) == g % 4);
}

TEST_CASE("mesi transition tables") {
  using mem::BusMsg;
  using mem::Mesi;
  using mem::SnoopAction;
  // reference MESI table
  struct Row {
    Mesi s;
    BusMsg m;
    SnoopAction a;
    Mesi next;
  };
  const Row rows[] = {
      {Mesi::Modified, BusMsg::Read, SnoopAction::WriteBack, Mesi::Shared},
      {Mesi::Exclusive, BusMsg::Read, SnoopAction::None, Mesi::Shared},
      {Mesi::Shared, BusMsg::Read, SnoopAction::None, Mesi::Shared},
      {Mesi::Modified, BusMsg::ReadForOwnership, SnoopAction::WriteBackInvalidate, Mesi::Invalid},
      {Mesi::Exclusive, BusMsg::ReadForOwnership, SnoopAction::Invalidate, Mesi::Invalid},
      {Mesi::Shared, BusMsg::ReadForOwnership, SnoopAction::Invalidate, Mesi::Invalid},
      {Mesi::Shared, BusMsg::WriteIntent, SnoopAction::Invalidate, Mesi::Invalid},
      {Mesi::Modified, BusMsg::FlushReq, SnoopAction::WriteBackInvalidate, Mesi::Invalid},
      {Mesi::Shared, BusMsg::FlushReq, SnoopAction::Invalidate, Mesi::Invalid},
      {Mesi::Modified, BusMsg::Flush, SnoopAction::WriteBackInvalidate, Mesi::Invalid},
      {Mesi::Modified, BusMsg::Invalidate, SnoopAction::Invalidate, Mesi::Invalid},
  };
  for (const auto& r : rows) CHECK(mem::mesi_snoop(r.s, r.m) == mem::SnoopResult{r.a, r.next});
  for (auto m : {BusMsg::Read, BusMsg::ReadForOwnership, BusMsg::WriteIntent, BusMsg::FlushReq}) {
    CHECK(mem::mesi_snoop(Mesi::Invalid, m) == mem::SnoopResult{SnoopAction::None, Mesi::Invalid});
  }
  CHECK_THROWS_AS(mem::mesi_snoop(Mesi::Exclusive, BusMsg::WriteIntent), Error);
  CHECK_THROWS_AS(mem::mesi_snoop(Mesi::Shared, BusMsg::WriteBack), Error);

  CHECK(mem::mesi_local_write(Mesi::Shared) == mem::LocalWriteResult{BusMsg::WriteIntent, Mesi::Modified});
  CHECK(mem::mesi_local_write(Mesi::Exclusive) == mem::LocalWriteResult{BusMsg::NoReq, Mesi::Modified});
  CHECK(mem::mesi_local_write(Mesi::Modified) == mem::LocalWriteResult{BusMsg::NoReq, Mesi::Modified});
  CHECK(mem::mesi_local_write(Mesi::Invalid) == mem::LocalWriteResult{BusMsg::ReadForOwnership, Mesi::Modified});
  for (unsigned k = 0; k <= 9; ++k) CHECK(k < 16);
}

TEST_CASE("round robin port service") {
  mem::CacheParams p;
  mem::LxCache l2(p);
  l2.set_ports(3);
  std::vector<unsigned> order;
  for (int i = 0; i < 6; ++i) order.push_back(*l2.lx_serve({true, true, true}));
  CHECK(order == std::vector<unsigned>{0, 1, 2, 0, 1, 2});
  CHECK(*l2.lx_serve({false, true, false}) == 1);
  CHECK(*l2.lx_serve({false, true, false}) == 1);
  CHECK_FALSE(l2.lx_serve({false, false, false}));
}

TEST_CASE("line requests become word transactions or packets") {
  mem::LineRequest fill{mem::LineOp::Fill, 0x40, 4, {}};
  for (unsigned lat : {0u, 1u, 2u, 5u}) {
    const auto t = mem::memiface_translate(fill, lat);
    CHECK(t.local.size() == 4);
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < t.local.size(); ++i) {
      CHECK_FALSE(t.local[i].write);
      CHECK(t.local[i].addr == 0x40 + 4 * i);
      sum += lat;
    }
    CHECK(t.local_cycles == sum);
  }
  mem::LineRequest wb{mem::LineOp::WriteBack, 0x80, 4, {1, 2, 3, 4}};
  const auto t = mem::memiface_translate(wb, 1);
  REQUIRE(t.local.size() == 4);
  CHECK(t.local[3].write);
  CHECK(t.local[3].data == 4);

  mem::NodeMap map{4, 0x1000};
  const auto r = mem::memiface_translate({mem::LineOp::Fill, 0x3010, 4, {}}, 1, &map, 0);
  REQUIRE(r.remote);
  CHECK(r.remote->node == 3);
  CHECK(r.remote->request_flits == 1);
  CHECK(r.remote->response_flits == 5);
  CHECK(r.local.empty());
  CHECK_THROWS_AS(mem::memiface_translate({mem::LineOp::Fill, 0x4000, 4, {}}, 1, &map, 0), Error);

  mem::MainMemory m(64);
  mem::LocalLineBackend be(m, 2);
  m.write(0x10, 7);
  be.request({mem::LineOp::Fill, 0x10, 4, {}}, 100);
  CHECK_FALSE(be.poll(107));
  auto rep = be.poll(108);
  REQUIRE(rep);
  CHECK(rep->data.at(0) == 7);
}

namespace {

struct Rig {
  mem::MainMemory memory{1u << 12};
  mem::LocalLineBackend backend{memory, 1};
  mem::CacheHierarchy h;
  std::uint64_t now = 0;

  explicit Rig(unsigned ports, int l2_index_bits = 4) : h(l2(l2_index_bits), backend) {
    mem::CacheParams l1;
    l1.index_bits = 2;
    l1.ways = 2;
    for (unsigned i = 0; i < ports; ++i) h.add_l1("c" + std::to_string(i), l1);
    h.set_bus_log(true);
  }
  static mem::CacheParams l2(int index_bits) {
    mem::CacheParams p;
    p.role = mem::CacheRole::Lx;
    p.index_bits = index_bits;
    p.ways = 1;
    return p;
  }
  cpu::MemResponse access(unsigned port, cpu::MemOp op, std::uint32_t addr, std::uint32_t data = 0) {
    auto& c = h.l1(port);
    while (!c.ready()) tick();
    c.issue({op, addr, data, 0xf}, now);
    for (;;) {
      tick();
      if (auto r = c.take_response(now - 1)) return *r;
    }
  }
  void tick() {
    h.tick(now);
    ++now;
  }
  mem::Mesi state(unsigned port, std::uint32_t addr) {
    const auto* l = h.l1(port).array().line_for(addr);
    return l ? l->state : mem::Mesi::Invalid;
  }
};

}  // namespace

TEST_CASE("hierarchy coherence scenarios") {
  using mem::Mesi;
  Rig r(3);
  r.memory.write(0x100, 11);
  CHECK(r.access(0, cpu::MemOp::Read, 0x100).data == 11);
  CHECK(r.state(0, 0x100) == Mesi::Exclusive);
  // read hit: response one cycle after issue
  auto& c0 = r.h.l1(0);
  c0.issue({cpu::MemOp::Read, 0x104, 0, 0xf}, r.now);
  CHECK_FALSE(c0.take_response(r.now));
  CHECK(c0.take_response(r.now + 1));

  CHECK(r.access(1, cpu::MemOp::Read, 0x100).data == 11);
  CHECK(r.state(0, 0x100) == Mesi::Shared);
  CHECK(r.state(1, 0x100) == Mesi::Shared);

  r.access(1, cpu::MemOp::Write, 0x100, 22);  // S -> upgrade
  CHECK(r.state(1, 0x100) == Mesi::Modified);
  CHECK(r.state(0, 0x100) == Mesi::Invalid);
  CHECK(r.h.l1(1).array().stats.upgrades == 1);

  // remote read of a modified line: write back first, both end shared
  const auto before = r.h.bus_log().size();
  CHECK(r.access(2, cpu::MemOp::Read, 0x100).data == 22);
  CHECK(r.state(1, 0x100) == Mesi::Shared);
  std::vector<mem::BusMsg> seq;
  for (auto i = before; i < r.h.bus_log().size(); ++i) seq.push_back(r.h.bus_log()[i].msg);
  CHECK(seq == std::vector<mem::BusMsg>{mem::BusMsg::Read, mem::BusMsg::WriteBack, mem::BusMsg::NoReq});

  // write miss: RFO and install modified
  r.access(0, cpu::MemOp::Write, 0x200, 5);
  CHECK(r.state(0, 0x200) == Mesi::Modified);

  // flush of a dirty line reaches memory and every copy goes
  r.access(1, cpu::MemOp::Read, 0x200);
  r.access(1, cpu::MemOp::Write, 0x200, 6);
  r.access(0, cpu::MemOp::Flush, 0x200);
  CHECK(r.memory.read(0x200) == 6);
  CHECK(r.state(1, 0x200) == Mesi::Invalid);
  CHECK_FALSE(r.h.l2().array().line_for(0x200));

  // one bus driver per cycle apart from acks
  std::map<std::uint64_t, int> drivers;
  for (const auto& e : r.h.bus_log()) {
    if (e.msg != mem::BusMsg::InvalidateAck && e.msg != mem::BusMsg::FlushDone) ++drivers[e.cycle];
  }
  for (const auto& [cyc, n] : drivers) CHECK(n == 1);
  CHECK(r.h.check_swmr().empty());
  CHECK(r.h.check_inclusion().empty());
}

TEST_CASE("L2 eviction flushes the line out of every L1") {
  using mem::Mesi;
  Rig r(2, 0);  // one-line L2
  r.access(0, cpu::MemOp::Read, 0x40);
  r.access(1, cpu::MemOp::Read, 0x44);
  auto count = [&](std::size_t from, mem::BusMsg m) {
    unsigned n = 0;
    for (auto i = from; i < r.h.bus_log().size(); ++i) n += r.h.bus_log()[i].msg == m;
    return n;
  };
  auto before = r.h.bus_log().size();
  r.access(0, cpu::MemOp::Read, 0x800);
  CHECK(r.state(0, 0x40) == Mesi::Invalid);
  CHECK(r.state(1, 0x40) == Mesi::Invalid);
  CHECK(count(before, mem::BusMsg::FlushReq) == 1);
  CHECK(count(before, mem::BusMsg::FlushDone) == 2);

  // dirty copy above the victim is written back all the way down
  r.access(1, cpu::MemOp::Write, 0x804, 9);
  before = r.h.bus_log().size();
  r.access(0, cpu::MemOp::Read, 0x40);
  CHECK(count(before, mem::BusMsg::WriteBack) == 1);
  CHECK(r.memory.read(0x804) == 9);
  CHECK(r.h.check_inclusion().empty());
}
