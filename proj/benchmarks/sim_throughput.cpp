#include <benchmark/benchmark.h>

#include <random>

#include <nlohmann/json.hpp>

#include "rvdse/noc/network.hpp"
#include "rvdse/noc/topology.hpp"
#include "rvdse/sys/config.hpp"
#include "rvdse/sys/system.hpp"

using namespace rvdse;
using nlohmann::json;

namespace {

json cores(const char* variant, int n) {
  json a = json::array();
  for (int i = 0; i < n; ++i) a.push_back({{"variant", variant}});
  return a;
}

void run_config(benchmark::State& state, const json& doc) {
  const auto cfg = sys::parse_config(doc);
  const auto prog = sys::load_program(cfg);
  std::uint64_t cycles = 0;
  for (auto _ : state) {
    sys::System s(cfg, prog);
    s.run();
    cycles += s.cycle();
    benchmark::DoNotOptimize(s.results());
  }
  state.counters["sim_cycles/s"] = benchmark::Counter(static_cast<double>(cycles), benchmark::Counter::kIsRate);
}

void BM_SingleCycle(benchmark::State& state) {
  run_config(state, {{"cores", cores("single-cycle", 1)}, {"program", "mandelbrot"}});
}
BENCHMARK(BM_SingleCycle)->Unit(benchmark::kMillisecond);

void BM_FiveStageBypass(benchmark::State& state) {
  run_config(state, {{"cores", cores("5-bypass", 1)}, {"program", "mandelbrot"}});
}
BENCHMARK(BM_FiveStageBypass)->Unit(benchmark::kMillisecond);

void BM_MulticoreCached(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  run_config(state, {{"cores", cores("7-bypass", n)},
                     {"memory", {{"kind", "sync"}}},
                     {"caches", {{"l1", {{"offset_bits", 2}, {"index_bits", 6}, {"ways", 4}}},
                                 {"l2", {{"offset_bits", 2}, {"index_bits", 7}, {"ways", 4}}}}},
                     {"program", "prime_parallel"}});
}
BENCHMARK(BM_MulticoreCached)->Arg(1)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_MeshUniformRandom(benchmark::State& state) {
  noc::TopologyConfig tc;
  tc.width = tc.height = static_cast<unsigned>(state.range(0));
  const auto topo = noc::build_topology(tc);
  std::uint64_t cycles = 0;
  for (auto _ : state) {
    noc::Network net(topo, noc::RouterParams{});
    std::mt19937 rng(1);
    std::uniform_int_distribution<unsigned> node(0, topo.nodes() - 1);
    std::bernoulli_distribution fire(0.05);
    std::uint64_t now = 0;
    for (; now < 5000; ++now) {
      for (unsigned n = 0; n < topo.nodes(); ++n) {
        if (fire(rng)) net.send(n, node(rng), {1, 2, 3, 4}, now);
      }
      net.tick(now);
      for (unsigned n = 0; n < topo.nodes(); ++n) {
        while (net.receive(n)) {
        }
      }
    }
    cycles += now;
    benchmark::DoNotOptimize(net.packets_delivered());
  }
  state.counters["net_cycles/s"] = benchmark::Counter(static_cast<double>(cycles), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_MeshUniformRandom)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
