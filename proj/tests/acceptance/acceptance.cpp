// One line per acceptance criterion; exit status 1 when any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lru_oracle.hpp"
#include "mesi_stress.hpp"
#include "noc_traffic.hpp"
#include "rvdse/asm/kernel.hpp"
#include "rvdse/asm/vmh.hpp"
#include "rvdse/isa/golden.hpp"
#include "rvdse/noc/topology.hpp"
#include "rvdse/sys/config.hpp"
#include "rvdse/sys/programs.hpp"
#include "rvdse/sys/sweep.hpp"
#include "rvdse/sys/system.hpp"

using namespace rvdse;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

sys::LoadedProgram from_asm(const std::string& text, unsigned harts = 1) {
  const auto p = assembler::assemble(
      assembler::wrap_kernel(assembler::AssemblySource::from_text(text), sys::bundled_kernel_params(harts)));
  sys::LoadedProgram lp;
  lp.name = "inline";
  lp.image = p.image;
  lp.labels = p.labels;
  return lp;
}

std::string fmt(const char* f, double v) {
  char b[64];
  std::snprintf(b, sizeof b, f, v);
  return b;
}

// ---------------------------------------------------------------------------

Outcome golden_equivalence() {
  int runs = 0, bad = 0;
  std::string first_bad;
  for (const char* name : {"factorial", "prime", "mandelbrot"}) {
    const auto prog = sys::build_bundled_program(name, 1);
    const auto golden = isa::run_golden(prog.image.words, prog.image.entry);
    for (const auto v : cpu::kAllVariants) {
      for (const char* kind : {"async", "sync"}) {
        const auto cfg = sys::parse_config({{"cores", {{{"variant", cpu::variant_name(v)}}}},
                                            {"memory", {{"kind", kind}}},
                                            {"program", name}});
        sys::System s(cfg, sys::load_program(cfg));
        const auto st = s.run();
        ++runs;
        if (st != sys::RunStatus::Halted || isa::first_mismatch(s.core(0).trace(), golden.trace) != -1) {
          ++bad;
          if (first_bad.empty()) first_bad = std::string(name) + "/" + cpu::variant_name(v) + "/" + kind;
        }
      }
    }
  }
  return {bad == 0, std::to_string(runs - bad) + "/" + std::to_string(runs) + " traces identical" +
                        (first_bad.empty() ? "" : ", first mismatch " + first_bad)};
}

// Cycles per extra loop iteration; the loop body holds `body` instructions
// and one taken backward branch, with independent filler so no data hazard
// reaches the branch.
double cycles_per_iteration(const char* variant, const char* mem, const std::string& branch) {
  auto cycles = [&](int n) {
    std::ostringstream src;
    src << "main:\n  li t0, " << n << "\n  li t1, 0\nloop:\n  addi t0, t0, -1\n"
        << "  addi t2, t2, 1\n  addi t3, t3, 1\n  addi t4, t4, 1\n"
        << (branch == "jal" ? "  beqz t0, out\n  addi t5, t5, 1\n  j loop\nout:\n" : "  bnez t0, loop\n")
        << "  ret\n";
    const auto cfg = sys::parse_config({{"cores", {{{"variant", variant}}}}, {"memory", {{"kind", mem}}}});
    sys::System s(cfg, from_asm(src.str()));
    s.run();
    return static_cast<double>(s.cycle());
  };
  return (cycles(400) - cycles(200)) / 200.0;
}

Outcome branch_penalties() {
  bool ok = true;
  std::string d;
  for (const char* mem : {"async", "sync"}) {
    for (const auto& [variant, want] : {std::pair{"5-bypass", 2.0}, std::pair{"7-bypass", 3.0}}) {
      // bnez loop: 5 instructions; j loop: 7 instructions (beqz not taken)
      const double b1 = cycles_per_iteration(variant, mem, "bne") - 5;
      const double b2 = cycles_per_iteration(variant, mem, "jal") - 7;
      ok &= b1 == want && b2 == want;
      d += std::string(variant) + "/" + mem + " branch " + fmt("%.3f", b1) + " jump " + fmt("%.3f", b2) + "; ";
    }
  }
  return {ok, d + "bubbles per taken transfer (want 2 and 3)"};
}

Outcome forwarding_benefit() {
  auto cycles = [](const char* v) {
    const auto cfg = sys::parse_config({{"cores", {{{"variant", v}}}}, {"memory", {{"kind", "sync"}}}, {"program", "prime"}});
    sys::System s(cfg, sys::load_program(cfg));
    s.run();
    return static_cast<double>(s.cycle());
  };
  const double stall = cycles("5-stall"), bypass = cycles("5-bypass");
  const double r = bypass / stall;
  return {r >= 0.40 && r <= 0.70, "cycles(5-bypass)/cycles(5-stall) = " + fmt("%.0f", bypass) + "/" +
                                       fmt("%.0f", stall) + " = " + fmt("%.3f", r) + " (want [0.40, 0.70])"};
}

Outcome single_cycle_cpi() {
  bool ok = true;
  std::string d;
  // fixed start-up cost: the same measurement on code without loads/stores
  std::uint64_t startup = 0;
  {
    const auto cfg = sys::parse_config({{"cores", {{{"variant", "single-cycle"}}}}, {"memory", {{"kind", "sync"}}}});
    sys::LoadedProgram p;
    p.image.words = {{0, isa::make(isa::Mnemonic::ADDI, 1, 0, 0, 1).raw}, {1, isa::make(isa::Mnemonic::JAL, 0, 0, 0, 0).raw}};
    sys::System s(cfg, p);
    s.run();
    startup = s.cycle() - s.core(0).stats().retired;
  }
  for (const char* name : {"factorial", "prime", "mandelbrot"}) {
    const auto prog = sys::build_bundled_program(name, 1);
    const auto golden = isa::run_golden(prog.image.words, prog.image.entry);
    std::uint64_t accesses = 0;
    for (const auto& r : golden.trace) accesses += isa::decode(r.instr).is_memory();
    auto run = [&](const char* kind) {
      const auto cfg = sys::parse_config({{"cores", {{{"variant", "single-cycle"}}}}, {"memory", {{"kind", kind}}}, {"program", name}});
      auto s = std::make_unique<sys::System>(cfg, sys::load_program(cfg));
      s->run();
      return s;
    };
    const auto a = run("async");
    const auto s = run("sync");
    const double cpi = static_cast<double>(a->cycle()) / static_cast<double>(a->core(0).stats().retired);
    const std::uint64_t nops = s->cycle() - s->core(0).stats().retired - startup;
    ok &= a->cycle() == golden.trace.size() && nops == accesses && s->core(0).stats().inserted_nops == accesses;
    d += std::string(name) + " cpi " + fmt("%.3f", cpi) + " nops " + std::to_string(nops) + "/" +
         std::to_string(accesses) + "; ";
  }
  return {ok, d + "async CPI 1.000, sync NOPs = memory accesses (start-up " + std::to_string(startup) + " cycle)"};
}

Outcome multicore_scaling() {
  json base = {{"cores", {{"count", 1}, {"template", {{"variant", "7-bypass"}}}}},
               {"memory", {{"kind", "sync"}}},
               {"caches",
                {{"l1", {{"offset_bits", 2}, {"index_bits", 6}, {"ways", 4}, {"policy", "lru"}}},
                 {"l2", {{"offset_bits", 2}, {"index_bits", 7}, {"ways", 4}, {"policy", "lru"}}}}},
               {"program", "prime_parallel"}};
  const auto spec = sys::parse_sweep({{"base", base}, {"grid", {{"/cores/count", {1, 2, 4, 8}}}}});
  const auto res = sys::run_sweep(spec);
  bool ok = true;
  std::string d = "cycles";
  for (const auto& p : res.points) {
    ok &= p.status == "halted";
    d += " " + (p.report.is_null() ? std::string("-") : p.report["cycles"].dump());
  }
  if (!ok) return {false, d + " (a point failed)"};
  d += "; per doubling";
  for (std::size_t i = 1; i < res.points.size(); ++i) {
    const double s = res.points[i - 1].report["cycles"].get<double>() / res.points[i].report["cycles"].get<double>();
    ok &= s >= 1.5;
    d += " " + fmt("%.2fx", s);
  }
  return {ok, d + " (want >= 1.5x)"};
}

Outcome mesi_suite() {
  int bad = 0;
  std::uint64_t reads = 0;
  std::string first;
  for (std::uint32_t seed = 1; seed <= 20; ++seed) {
    testing::StressConfig cfg;
    cfg.seed = seed;
    cfg.ops = 10000;
    cfg.heterogeneous = seed % 2 == 0;
    cfg.memory_latency = seed % 4;
    const auto r = testing::run_mesi_stress(cfg);
    reads += r.reads_checked;
    if (!r.ok) {
      ++bad;
      if (first.empty()) first = "seed " + std::to_string(seed) + ": " + r.failure;
    }
  }
  return {bad == 0, std::to_string(20 - bad) + "/20 seeds x 10000 ops clean (SWMR, inclusion, write-back, SC replay; " +
                        std::to_string(reads) + " reads checked)" + (first.empty() ? "" : "; " + first)};
}

Outcome lru_oracle() {
  static constexpr unsigned kWays[] = {1, 2, 4, 8, 16};
  unsigned bad_traces = 0;
  for (unsigned i = 0; i < 1000; ++i) bad_traces += testing::lru_trace_mismatches(kWays[i % 5], 1000 + i) != 0;
  return {bad_traces == 0, std::to_string(1000 - bad_traces) + "/1000 traces agree with the stack oracle over ways {1,2,4,8,16}"};
}

sys::SystemConfig cached_cfg(const char* mem, unsigned latency = 0) {
  json m = {{"kind", mem}};
  if (latency) m["latency"] = latency;
  return sys::parse_config({{"cores", {{{"variant", "7-bypass"}}}},
                            {"memory", m},
                            {"caches",
                             {{"l1", {{"offset_bits", 2}, {"index_bits", 6}, {"ways", 4}}},
                              {"l2", {{"offset_bits", 2}, {"index_bits", 7}, {"ways", 4}}}}}});
}

Outcome cache_hit_transparency() {
  // warm loop over 16 words: extra passes are all hits
  auto loop = [](int passes) {
    std::ostringstream s;
    s << "main:\n  li t0, " << passes << "\nouter:\n  la t3, buf\n  li t2, 16\ninner:\n  lw t4, 0(t3)\n"
      << "  addi t3, t3, 4\n  addi t2, t2, -1\n  bnez t2, inner\n  addi t0, t0, -1\n  bnez t0, outer\n  ret\n"
      << "buf:\n  .word 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16\n";
    return s.str();
  };
  auto run = [](const sys::SystemConfig& cfg, const std::string& src) {
    auto s = std::make_unique<sys::System>(cfg, from_asm(src));
    s->run();
    return s;
  };
  const auto cfg = cached_cfg("sync");
  const auto a = run(cfg, loop(4)), b = run(cfg, loop(8));
  const auto flat = sys::parse_config({{"cores", {{{"variant", "7-bypass"}}}}, {"memory", {{"kind", "sync"}}}});
  const auto fa = run(flat, loop(4)), fb = run(flat, loop(8));
  const auto stall_delta = b->core(0).stats().stall_memory - a->core(0).stats().stall_memory;
  const auto cyc_delta = b->cycle() - a->cycle();
  const auto flat_delta = fb->cycle() - fa->cycle();
  const bool hits_ok = stall_delta == 0 && cyc_delta == flat_delta;

  // one new line per load, from off-chip memory
  auto stride = [](int n) {
    std::ostringstream s;
    s << "main:\n  li t0, " << n << "\n  li t3, 0x4000\nloop:\n  lw t4, 0(t3)\n  addi t3, t3, 16\n"
      << "  addi t0, t0, -1\n  bnez t0, loop\n  ret\n";
    return s.str();
  };
  const unsigned latency = 10;
  const auto mcfg = cached_cfg("offchip", latency);
  const auto c = run(mcfg, stride(64)), e = run(mcfg, stride(128));
  const auto misses = e->caches()->l1(1).array().stats.misses - c->caches()->l1(1).array().stats.misses;
  const double per_miss = static_cast<double>(e->core(0).stats().stall_memory - c->core(0).stats().stall_memory) /
                          static_cast<double>(misses);
  const unsigned fill = 4 * latency;  // one 4-word line, word by word
  const bool miss_ok = misses == 64 && per_miss >= fill;
  return {hits_ok && miss_ok, "all-hit passes: memory stalls +" + std::to_string(stall_delta) + ", cycles +" +
                                  std::to_string(cyc_delta) + " vs perfect memory +" + std::to_string(flat_delta) +
                                  "; misses: " + fmt("%.1f", per_miss) + " stall cycles each (fill " +
                                  std::to_string(fill) + ")"};
}

Outcome noc_properties() {
  unsigned checked = 0, wrong = 0;
  std::string first;
  for (unsigned w = 2; w <= 4; ++w) {
    for (unsigned h = 2; h <= 4; ++h) {
      noc::TopologyConfig tc;
      tc.kind = noc::TopologyKind::Mesh;
      tc.width = w;
      tc.height = h;
      const auto topo = noc::build_topology(tc);
      for (const auto kind : {noc::RouterKind::SingleCycle, noc::RouterKind::Pipelined}) {
        noc::RouterParams p;
        p.kind = kind;
        const unsigned per_hop = kind == noc::RouterKind::SingleCycle ? 1 : p.pipeline_stages;
        for (unsigned s = 0; s < w * h; ++s) {
          for (unsigned d = 0; d < w * h; ++d) {
            const unsigned hops = 1 + (s % w > d % w ? s % w - d % w : d % w - s % w) +
                                  (s / w > d / w ? s / w - d / w : d / w - s / w);
            for (unsigned len = 1; len <= 5; ++len) {
              const auto got = testing::lone_packet_latency(topo, p, s, d, len);
              const auto want = hops * per_hop + (len - 1);
              ++checked;
              if (got != want) {
                ++wrong;
                if (first.empty()) first = std::to_string(w) + "x" + std::to_string(h) + " " + std::to_string(s) + "->" + std::to_string(d);
              }
            }
          }
        }
      }
    }
  }
  unsigned runs = 0, lossy = 0;
  std::uint64_t packets = 0;
  for (std::uint32_t seed = 1; seed <= 10; ++seed) {
    for (const auto kind : {noc::RouterKind::SingleCycle, noc::RouterKind::Pipelined}) {
      noc::TopologyConfig tc;
      tc.width = 4;
      tc.height = 4;
      noc::RouterParams p;
      p.kind = kind;
      noc::Network net(noc::build_topology(tc), p);
      const auto r = testing::run_random_traffic(net, seed, 0.3);
      ++runs;
      packets += r.packets_delivered;
      lossy += !(r.drained && r.flits_injected == r.flits_sent && r.flits_ejected == r.flits_sent &&
                 r.packets_delivered == r.packets_sent && r.integrity_errors == 0);
    }
  }
  return {wrong == 0 && lossy == 0,
          std::to_string(checked - wrong) + "/" + std::to_string(checked) + " lone packets at hops*P+(L-1)" +
              (first.empty() ? "" : " (first miss " + first + ")") + "; " + std::to_string(runs - lossy) + "/" +
              std::to_string(runs) + " random runs at load 0.3 lossless and intact (" + std::to_string(packets) +
              " packets)"};
}

Outcome toolchain() {
  std::mt19937 rng(99);
  unsigned bad = 0;
  for (int i = 0; i < 1000; ++i) {
    assembler::MemoryImage img;
    const unsigned n = rng() % 200;
    const std::uint32_t span = 1u << (4 + rng() % 20);
    for (unsigned k = 0; k < n; ++k) img.words[rng() % span] = static_cast<std::uint32_t>(rng());
    bad += assembler::parse_vmh(assembler::emit_vmh(img)).words != img.words;
  }
  auto a0 = [](const char* name) {
    const auto p = sys::build_bundled_program(name, 1);
    const auto vmh = assembler::parse_vmh(assembler::emit_vmh(p.image));
    return isa::run_golden(vmh.words, p.image.entry).final_state.regs[10];
  };
  const auto f = a0("factorial"), pr = a0("prime");
  return {bad == 0 && f == 3628800 && pr == 25, std::to_string(1000 - bad) + "/1000 vmh round trips exact; factorial " +
                                                    std::to_string(f) + ", primes below 100 " + std::to_string(pr)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"golden-equivalence", golden_equivalence},
      {"branch-penalties", branch_penalties},
      {"forwarding-benefit", forwarding_benefit},
      {"single-cycle-cpi", single_cycle_cpi},
      {"multicore-scaling", multicore_scaling},
      {"mesi-properties", mesi_suite},
      {"lru-oracle", lru_oracle},
      {"cache-hit-transparency", cache_hit_transparency},
      {"noc-latency-and-integrity", noc_properties},
      {"toolchain", toolchain},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %-26s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
