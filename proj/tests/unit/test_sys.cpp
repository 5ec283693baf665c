#include <doctest.h>

#include <httplib.h>

#include <algorithm>
#include <thread>

#include "rvdse/error.hpp"
#include "rvdse/isa/golden.hpp"
#include "rvdse/sys/config.hpp"
#include "rvdse/sys/programs.hpp"
#include "rvdse/sys/server.hpp"
#include "rvdse/sys/sweep.hpp"
#include "rvdse/sys/system.hpp"

using namespace rvdse;
using nlohmann::json;

namespace {

bool has_error(const sys::Validation& v, const std::string& path, const std::string& text) {
  return std::any_of(v.errors.begin(), v.errors.end(), [&](const sys::Issue& i) {
    return i.path == path && i.message.find(text) != std::string::npos;
  });
}

json cached_doc(unsigned cores, const std::string& variant = "7-bypass") {
  return {{"cores", {{"count", cores}, {"template", {{"variant", variant}}}}},
          {"memory", {{"kind", "sync"}}},
          {"caches",
           {{"l1", {{"offset_bits", 2}, {"index_bits", 6}, {"ways", 4}}},
            {"l2", {{"offset_bits", 2}, {"index_bits", 7}, {"ways", 4}}}}},
          {"program", "prime_parallel"}};
}

json run_report(const json& doc) {
  const auto cfg = sys::parse_config(doc);
  sys::System s(cfg, sys::load_program(cfg));
  s.run();
  return s.report();
}

}  // namespace

TEST_CASE("config validation") {
  const auto ok = sys::validate_config({{"cores", {{{"variant", "single-cycle"}}}}, {"memory", {{"kind", "async"}}}});
  CHECK(ok.ok());
  CHECK(ok.warnings.empty());

  const auto neg = sys::validate_config({{"cores", {{{"variant", "5-bypass"}}}},
                                         {"caches", {{"l1", {{"offset_bits", -1}}}}}});
  CHECK(has_error(neg, "/caches/l1/offset_bits", "offset_bits must be ≥ 0"));

  const auto four = sys::validate_config({{"cores", {{"count", 4}, {"template", {{"variant", "5-bypass"}}}}}});
  CHECK(has_error(four, "/caches", "coherence requires an L1/L2 cache subsystem"));

  const auto nops = sys::validate_config({{"cores", {{{"variant", "single-cycle"}}}}, {"memory", {{"kind", "sync"}}}});
  CHECK(nops.ok());
  REQUIRE(nops.warnings.size() == 1);
  CHECK(nops.warnings[0].message.find("NOPs are inserted between BRAM or off-chip memory accesses") != std::string::npos);

  // every problem is reported at once
  const auto many = sys::validate_config({{"cores", {{{"variant", "9-stage"}}}},
                                          {"memory", {{"kind", "offchip"}, {"latency", 1}}},
                                          {"bogus", 1}});
  CHECK(many.errors.size() >= 3);
  CHECK_THROWS_AS(sys::parse_config({{"bogus", 1}}), Error);

  const auto noc = sys::validate_config({{"cores", {{{"variant", "5-bypass"}}}},
                                         {"caches", json::object()},
                                         {"interconnect", {{"kind", "noc"}, {"noc", {{"topology", "ring"}, {"routing", "dor"}}}}}});
  CHECK_FALSE(noc.ok());
}

TEST_CASE("resolved config parses back to the same system") {
  for (const auto& doc : {cached_doc(4), json{{"cores", {{{"variant", "ooo"}}}}, {"program", "factorial"}},
                          json{{"cores", {{"count", 2}, {"template", {{"variant", "5-stall"}}}}},
                               {"memory", {{"size_bytes", 65536}}},
                               {"caches", json::object()},
                               {"interconnect", {{"kind", "noc"}, {"noc", {{"width", 2}, {"height", 2}}}}},
                               {"program", "prime"}}}) {
    const auto cfg = sys::parse_config(doc);
    const auto r1 = sys::resolved_config(cfg);
    CHECK(sys::validate_config(r1).ok());
    CHECK(sys::resolved_config(sys::parse_config(r1)) == r1);
  }
}

TEST_CASE("system assembly") {
  {
    json doc = cached_doc(1);
    doc["caches"]["l1"]["index_bits"] = 8;  // 16 kB
    doc["caches"]["l2"]["index_bits"] = 9;  // 32 kB
    const auto cfg = sys::parse_config(doc);
    CHECK(cfg.caches->l1d[0].capacity_bytes() == 16 * 1024);
    CHECK(cfg.caches->l2.capacity_bytes() == 32 * 1024);
    sys::System s(cfg, sys::load_program(cfg));
    CHECK(s.harts() == 1);
    CHECK(s.caches()->l1_count() == 2);
    CHECK(s.network() == nullptr);
  }
  {
    const auto cfg = sys::parse_config(cached_doc(8));
    sys::System s(cfg, sys::load_program(cfg));
    CHECK(s.harts() == 8);
    CHECK(s.caches()->l1_count() == 16);
  }
  {
    json doc = cached_doc(2);
    doc["interconnect"] = {{"kind", "noc"}, {"noc", {{"topology", "mesh"}, {"width", 2}, {"height", 2}, {"cluster_node", 3}}}};
    const auto cfg = sys::parse_config(doc);
    sys::System s(cfg, sys::load_program(cfg));
    REQUIRE(s.network() != nullptr);
    CHECK(s.network()->topology().nodes() == 4);
    REQUIRE(s.run() == sys::RunStatus::Halted);
    const auto r = s.report();
    CHECK(r["noc"]["packets_delivered"].get<int>() > 0);
    CHECK(r["noc"]["integrity_errors"] == 0);
    const auto want = sys::parse_config(cached_doc(2));
    sys::System bus(want, sys::load_program(want));
    bus.run();
    CHECK(s.results() == bus.results());
  }
  {
    json doc = {{"cores", {{{"variant", "5-bypass"}}}}, {"memory", {{"size_bytes", 16384}}}, {"program", "factorial"}};
    const auto cfg = sys::parse_config(doc);
    auto prog = sys::load_program(cfg);
    prog.image.words[0x10000] = 1;
    CHECK_THROWS_AS(sys::System(cfg, prog), Error);
  }
}

TEST_CASE("runs are deterministic and independent of core tick order") {
  const auto doc = cached_doc(4);
  const auto a = run_report(doc);
  const auto b = run_report(doc);
  CHECK(sys::deterministic_part(a) == sys::deterministic_part(b));
  CHECK(sys::validate_config(a["config"]).ok());

  const auto cfg = sys::parse_config(doc);
  const auto prog = sys::load_program(cfg);
  sys::System fwd(cfg, prog), rev(cfg, prog);
  rev.set_core_order({3, 1, 2, 0});
  fwd.run();
  rev.run();
  CHECK(fwd.cycle() == rev.cycle());
  for (unsigned h = 0; h < 4; ++h) CHECK(isa::first_mismatch(fwd.core(h).trace(), rev.core(h).trace()) == -1);
  CHECK(sys::deterministic_part(fwd.report()) == sys::deterministic_part(rev.report()));
}

TEST_CASE("retired counts equal the golden model per hart") {
  const auto cfg = sys::parse_config(cached_doc(4));
  const auto prog = sys::load_program(cfg);
  sys::System s(cfg, prog);
  REQUIRE(s.run() == sys::RunStatus::Halted);
  for (unsigned h = 0; h < 4; ++h) {
    isa::GoldenOptions o;
    o.hart_id = h;
    const auto g = isa::run_golden(prog.image.words, prog.image.entry, o);
    CHECK(s.core(h).stats().retired == g.trace.size());
    CHECK(isa::first_mismatch(s.core(h).trace(), g.trace) == -1);
  }
  // prime_parallel counts the primes below 1200
  const auto r = s.results();
  CHECK(r[0] + r[1] + r[2] + r[3] == 196);
}

TEST_CASE("bypassing beats stalling on prime") {
  auto cycles = [](const char* v) {
    return run_report({{"cores", {{{"variant", v}}}}, {"program", "prime"}})["cycles"].get<std::uint64_t>();
  };
  CHECK(cycles("5-bypass") < cycles("5-stall"));
}

TEST_CASE("larger L1 never misses more") {
  std::uint64_t prev = ~0ull;
  for (unsigned index : {0u, 1u, 2u, 3u, 4u, 5u, 6u}) {
    json doc = {{"cores", {{{"variant", "5-bypass"}}}},
                {"caches",
                 {{"l1", {{"offset_bits", 2}, {"index_bits", index}, {"ways", 2}}},
                  {"l2", {{"offset_bits", 2}, {"index_bits", 8}, {"ways", 8}}}}},
                {"program", "mandelbrot"}};
    const auto r = run_report(doc);
    std::uint64_t misses = 0;
    for (const auto& c : r["caches"]["l1"]) misses += c["misses"].get<std::uint64_t>();
    CAPTURE(index);
    CHECK(misses <= prev);
    prev = misses;
  }
}

TEST_CASE("cycle limit and interval statistics") {
  json doc = {{"cores", {{{"variant", "5-bypass"}}}}, {"program", "prime"}, {"stats_interval", 1000}};
  const auto cfg = sys::parse_config(doc);
  sys::System s(cfg, sys::load_program(cfg));
  CHECK(s.run(5000) == sys::RunStatus::CycleLimit);
  const auto r = s.report();
  CHECK(r["status"] == "cycle-limit");
  CHECK(r["cycles"] == 5000);
  CHECK(r["intervals"].size() == 5);
  CHECK(s.run() == sys::RunStatus::Halted);
  CHECK(s.results() == std::vector<std::uint32_t>{25});
}

TEST_CASE("sweeps") {
  {
    json spec = {{"base", {{"cores", {{{"variant", "5-bypass"}}}},
                           {"caches", {{"l1", {{"offset_bits", 2}, {"index_bits", 6}}},
                                       {"l2", {{"offset_bits", 2}, {"index_bits", 8}, {"ways", 16}}}}},
                           {"program", "factorial"}}},
                 {"grid", {{"/caches/l1/ways", {1, 2, 4, 8, 16}}}},
                 {"threads", 3}};
    const auto s = sys::parse_sweep(spec);
    const auto res = sys::run_sweep(s);
    REQUIRE(res.points.size() == 5);
    for (const auto& p : res.points) CHECK(p.status == "halted");
    CHECK(res.points[3].report["config"]["caches"]["per_core"][0]["l1d"]["ways"] == 8);
    const auto csv = res.to_csv(s);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
    CHECK(csv.rfind("index,/caches/l1/ways,status,cycles", 0) == 0);
  }
  {
    json spec = {{"base", cached_doc(1)}, {"grid", {{"/cores/count", {1, 2, 4, 8}}}}};
    const auto res = sys::run_sweep(sys::parse_sweep(spec));
    REQUIRE(res.points.size() == 4);
    CHECK(res.points[0].speedup == doctest::Approx(1.0));
    for (std::size_t i = 1; i < 4; ++i) {
      const double want = res.points[0].report["cycles"].get<double>() / res.points[i].report["cycles"].get<double>();
      CHECK(res.points[i].speedup == doctest::Approx(want));
      CHECK(res.points[i].speedup > res.points[i - 1].speedup);
    }
    // sorted by cycles: most cores first
    CHECK(res.order.front() == 3);
  }
  {
    const auto res = sys::run_sweep(sys::parse_sweep({{"base", {{"program", "factorial"}}}}));
    REQUIRE(res.points.size() == 1);
    CHECK(res.points[0].status == "halted");
  }
  {
    // one bad point does not stop the others
    json spec = {{"base", {{"cores", {{{"variant", "5-bypass"}}}}, {"program", "factorial"}}},
                 {"grid", {{"/cores/0/variant", {"5-bypass", "warp-drive", "ooo"}}}}};
    const auto res = sys::run_sweep(sys::parse_sweep(spec));
    CHECK(res.points[0].status == "halted");
    CHECK(res.points[1].status == "invalid");
    CHECK_FALSE(res.points[1].error.empty());
    CHECK(res.points[2].status == "halted");
  }
  CHECK_THROWS_AS(sys::parse_sweep({{"base", json::object()}, {"grid", {{"/no/such/setting", {1, 2}}}}}), Error);
  CHECK_THROWS_AS(sys::parse_sweep({{"base", json::object()}, {"grid", {{"/seed", {1, 2, 3}}, {"/max_cycles", {1, 2, 3}}}}, {"cap", 8}}), Error);
}

TEST_CASE("api service") {
  sys::ApiService api;
  CHECK(api.handle("GET", "/api/schema", {}, "").body["$schema"].get<std::string>().find("2020-12") != std::string::npos);
  CHECK(api.handle("GET", "/api/stats-schema", {}, "").body["$id"] == "rvdse-stats/1");
  const auto benches = api.handle("GET", "/api/benchmarks", {}, "").body;
  CHECK(benches.size() == sys::bundled_benchmarks().size());

  auto v = api.handle("POST", "/api/validate", {}, json{{"cores", {{"count", 4}, {"template", {{"variant", "5-bypass"}}}}}}.dump());
  CHECK(v.body["ok"] == false);
  CHECK(api.handle("POST", "/api/validate", {}, "{not json").status == 400);

  auto bad = api.handle("POST", "/api/runs", {}, json{{"config", {{"bogus", 1}}}, {"program", "prime"}}.dump());
  CHECK(bad.status == 422);

  std::vector<std::string> ids;
  for (unsigned cores : {1u, 2u}) {
    auto r = api.handle("POST", "/api/runs", {}, json{{"config", cached_doc(cores)}, {"program", "prime"}}.dump());
    REQUIRE(r.status == 201);
    ids.push_back(r.body["id"]);
  }
  api.wait_all();
  for (unsigned i = 0; i < 2; ++i) {
    const auto r = api.handle("GET", "/api/runs/" + ids[i], {}, "");
    REQUIRE(r.status == 200);
    CHECK(r.body["status"] == "halted");
    // same numbers as a direct run
    json doc = cached_doc(i + 1);
    doc["program"] = "prime";
    CHECK(r.body["report"]["cycles"] == run_report(doc)["cycles"]);
    const auto t = api.handle("GET", "/api/runs/" + ids[i] + "/trace", {{"from", "2"}, {"count", "3"}}, "");
    REQUIRE(t.status == 200);
    CHECK(t.body["records"].size() == 3);
    CHECK(t.body["from"] == 2);
  }
  CHECK(api.handle("GET", "/api/runs/nope", {}, "").status == 404);
  CHECK(api.handle("GET", "/api/runs", {}, "").body.size() == 2);

  // uploaded image
  const auto prog = sys::build_bundled_program("factorial", 1);
  std::string vmh;
  for (const auto& [a, w] : prog.image.words) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "@%x %08x\n", a, w);
    vmh += buf;
  }
  auto up = api.handle("POST", "/api/runs", {},
                       json{{"config", {{"cores", {{{"variant", "5-bypass"}}}}}}, {"vmh", vmh}, {"wait", true}}.dump());
  REQUIRE(up.status == 201);
  CHECK(up.body["status"] == "halted");
  const auto done = api.handle("GET", "/api/runs/" + up.body["id"].get<std::string>(), {}, "");
  CHECK(done.body["report"]["cores"][0]["a0"] == 3628800);
}

TEST_CASE("http server") {
  sys::HttpServer server;
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread t([&] { server.listen(); });
  httplib::Client cli("127.0.0.1", port);
  cli.set_connection_timeout(5);
  auto res = cli.Get("/api/benchmarks");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body).size() == sys::bundled_benchmarks().size());
  auto post = cli.Post("/api/runs", json{{"config", {{"cores", {{{"variant", "7-bypass"}}}}}}, {"program", "factorial"}, {"wait", true}}.dump(),
                       "application/json");
  REQUIRE(post);
  CHECK(post->status == 201);
  const auto id = json::parse(post->body)["id"].get<std::string>();
  auto got = cli.Get(("/api/runs/" + id).c_str());
  REQUIRE(got);
  CHECK(json::parse(got->body)["report"]["program"]["results"][0] == 3628800);
  auto missing = cli.Get("/api/nothing");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  server.stop();
  t.join();
}
