#include "rvdse/sys/config.hpp"

#include <set>

#include "rvdse/error.hpp"
#include "rvdse/sys/programs.hpp"

namespace rvdse::sys {

using nlohmann::json;

const char* interconnect_name(InterconnectKind k) {
  switch (k) {
    case InterconnectKind::None: return "none";
    case InterconnectKind::SharedBus: return "shared-bus";
    case InterconnectKind::Noc: return "noc";
  }
  return "none";
}

json Validation::to_json() const {
  auto list = [](const std::vector<Issue>& v) {
    json a = json::array();
    for (const auto& i : v) a.push_back({{"path", i.path}, {"message", i.message}});
    return a;
  };
  return {{"ok", ok()}, {"errors", list(errors)}, {"warnings", list(warnings)}};
}

json cache_params_json(const mem::CacheParams& p) {
  return {{"index_bits", p.index_bits}, {"offset_bits", p.offset_bits}, {"ways", p.ways},
          {"policy", mem::policy_name(p.policy)}, {"hit_latency", p.hit_latency}, {"seed", p.seed}};
}

namespace {

class Analyzer {
 public:
  explicit Analyzer(Validation& v) : v_(v) {}

  void error(const std::string& path, const std::string& msg) { v_.errors.push_back({path.empty() ? "/" : path, msg}); }
  void warn(const std::string& path, const std::string& msg) { v_.warnings.push_back({path.empty() ? "/" : path, msg}); }

  bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
      error(path, "must be an object");
      return false;
    }
    for (const auto& [k, _] : j.items()) {
      bool known = false;
      for (const char* a : allowed) known |= k == a;
      if (!known) error(path + "/" + k, "unknown field '" + k + "'");
    }
    return true;
  }

  std::optional<std::int64_t> integer(const json& obj, const char* key, const std::string& path, std::int64_t lo,
                                      std::int64_t hi) {
    if (!obj.contains(key)) return std::nullopt;
    const auto& j = obj.at(key);
    const std::string p = path + "/" + key;
    if (!j.is_number_integer()) {
      error(p, std::string(key) + " must be an integer");
      return std::nullopt;
    }
    const std::int64_t v = j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)
                               ? INT64_MAX
                               : j.get<std::int64_t>();
    if (v < lo) {
      error(p, std::string(key) + " must be ≥ " + std::to_string(lo));
      return std::nullopt;
    }
    if (v > hi) {
      error(p, std::string(key) + " must be ≤ " + std::to_string(hi));
      return std::nullopt;
    }
    return v;
  }

  std::optional<std::string> string(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    const auto& j = obj.at(key);
    if (!j.is_string()) {
      error(path + "/" + key, std::string(key) + " must be a string");
      return std::nullopt;
    }
    return j.get<std::string>();
  }

  std::optional<bool> boolean(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    const auto& j = obj.at(key);
    if (!j.is_boolean()) {
      error(path + "/" + key, std::string(key) + " must be true or false");
      return std::nullopt;
    }
    return j.get<bool>();
  }

  template <typename F>
  auto named(const json& obj, const char* key, const std::string& path, F convert)
      -> std::optional<decltype(convert(std::string()))> {
    const auto s = string(obj, key, path);
    if (!s) return std::nullopt;
    try {
      return convert(*s);
    } catch (const Error& e) {
      error(path + "/" + key, e.detail());
      return std::nullopt;
    }
  }

  void cache(const json& j, const std::string& path, mem::CacheParams& p) {
    if (!object(j, path, {"index_bits", "offset_bits", "ways", "policy", "hit_latency", "seed"})) return;
    if (auto v = integer(j, "index_bits", path, 0, 20)) p.index_bits = static_cast<int>(*v);
    if (auto v = integer(j, "offset_bits", path, 0, 8)) p.offset_bits = static_cast<int>(*v);
    if (auto v = integer(j, "ways", path, 1, 64)) p.ways = static_cast<int>(*v);
    if (auto v = named(j, "policy", path, mem::policy_from_name)) p.policy = *v;
    if (auto v = integer(j, "hit_latency", path, 1, 64)) p.hit_latency = static_cast<unsigned>(*v);
    if (auto v = integer(j, "seed", path, 0, UINT32_MAX)) p.seed = static_cast<std::uint32_t>(*v);
  }

  void core(const json& j, const std::string& path, CoreConfig& c) {
    if (!object(j, path, {"variant", "ooo"})) return;
    if (auto v = named(j, "variant", path, cpu::variant_from_name)) c.variant = *v;
    if (!j.contains("variant")) error(path + "/variant", "variant is required");
    if (!j.contains("ooo")) return;
    const std::string op = path + "/ooo";
    const auto& o = j.at("ooo");
    if (c.variant != cpu::CoreVariant::Ooo) warn(op, "ooo parameters ignored for a " + std::string(cpu::variant_name(c.variant)) + " core");
    if (!object(o, op, {"queue_length", "alus", "alu_latency", "pipelined_alus", "commit_capacity"})) return;
    if (auto v = integer(o, "queue_length", op, 1, 256)) c.ooo.queue_length = static_cast<unsigned>(*v);
    if (auto v = integer(o, "commit_capacity", op, 1, 256)) c.ooo.commit_capacity = static_cast<unsigned>(*v);
    if (auto v = boolean(o, "pipelined_alus", op)) c.ooo.pipelined_alus = *v;
    unsigned alus = static_cast<unsigned>(c.ooo.alu_latency.size());
    if (auto v = integer(o, "alus", op, 1, 16)) alus = static_cast<unsigned>(*v);
    std::vector<unsigned> lat(alus, c.ooo.alu_latency.empty() ? 1 : c.ooo.alu_latency.front());
    if (o.contains("alu_latency")) {
      const auto& l = o.at("alu_latency");
      if (l.is_array()) {
        lat.clear();
        for (std::size_t i = 0; i < l.size(); ++i) {
          if (!l[i].is_number_integer() || l[i].get<std::int64_t>() < 1 || l[i].get<std::int64_t>() > 64) {
            error(op + "/alu_latency/" + std::to_string(i), "ALU latency must be an integer in 1..64");
          } else {
            lat.push_back(l[i].get<unsigned>());
          }
        }
        if (o.contains("alus") && lat.size() != alus) error(op + "/alu_latency", "one latency per ALU expected");
        if (lat.empty()) error(op + "/alu_latency", "at least one ALU required");
      } else if (auto v = integer(o, "alu_latency", op, 1, 64)) {
        lat.assign(alus, static_cast<unsigned>(*v));
      }
    }
    if (!lat.empty()) c.ooo.alu_latency = lat;
  }

  void analyze(const json& j, SystemConfig& cfg) {
    if (!object(j, "", {"name", "seed", "cores", "memory", "caches", "interconnect", "program", "kernel",
                        "max_cycles", "stats_interval"})) {
      return;
    }
    if (auto v = string(j, "name", "")) cfg.name = *v;
    if (auto v = integer(j, "seed", "", 0, INT64_MAX)) cfg.seed = static_cast<std::uint64_t>(*v);
    if (auto v = integer(j, "max_cycles", "", 1, INT64_MAX)) cfg.max_cycles = static_cast<std::uint64_t>(*v);
    if (auto v = integer(j, "stats_interval", "", 0, INT64_MAX)) cfg.stats_interval = static_cast<std::uint64_t>(*v);

    // cores
    if (j.contains("cores")) {
      const auto& c = j.at("cores");
      cfg.cores.clear();
      if (c.is_array()) {
        for (std::size_t i = 0; i < c.size(); ++i) {
          CoreConfig cc;
          core(c[i], "/cores/" + std::to_string(i), cc);
          cfg.cores.push_back(cc);
        }
      } else if (object(c, "/cores", {"count", "template"})) {
        const auto n = integer(c, "count", "/cores", 1, 64);
        if (!c.contains("count")) error("/cores/count", "count is required");
        CoreConfig cc;
        if (c.contains("template")) {
          core(c.at("template"), "/cores/template", cc);
        } else {
          error("/cores/template", "template is required");
        }
        cfg.cores.assign(n.value_or(1), cc);
      }
      if (c.is_array() && c.empty()) error("/cores", "at least one core is required");
      if (cfg.cores.empty()) cfg.cores.push_back({});
    }
    const unsigned harts = static_cast<unsigned>(cfg.cores.size());

    // memory
    unsigned latency_given = ~0u;
    if (j.contains("memory") && object(j.at("memory"), "/memory", {"kind", "size_bytes", "latency", "address_bits", "layout"})) {
      const auto& m = j.at("memory");
      if (auto v = named(m, "kind", "/memory", mem::memory_kind_from_name)) cfg.memory.kind = *v;
      if (auto v = integer(m, "size_bytes", "/memory", 4, UINT32_MAX)) {
        if (*v % 4) {
          error("/memory/size_bytes", "size_bytes must be a multiple of 4");
        } else {
          cfg.memory.size_bytes = static_cast<std::uint32_t>(*v);
        }
      }
      if (auto v = integer(m, "latency", "/memory", 0, 1000)) latency_given = static_cast<unsigned>(*v);
      if (auto v = integer(m, "address_bits", "/memory", 2, 32)) cfg.memory.address_bits = static_cast<unsigned>(*v);
      if (auto v = string(m, "layout", "/memory")) {
        if (*v == "separate") {
          cfg.memory.separate = true;
        } else if (*v != "unified") {
          error("/memory/layout", "layout must be 'unified' or 'separate'");
        }
      }
    }
    switch (cfg.memory.kind) {
      case mem::MemoryKind::Async:
      case mem::MemoryKind::Sync: {
        const unsigned fixed = mem::memory_latency(cfg.memory.kind, 0);
        if (latency_given != ~0u && latency_given != fixed) {
          error("/memory/latency", std::string(mem::memory_kind_name(cfg.memory.kind)) + " memory has latency " +
                                       std::to_string(fixed));
        }
        cfg.memory.latency = fixed;
        break;
      }
      case mem::MemoryKind::OffChip:
        if (latency_given == ~0u) {
          cfg.memory.latency = 10;
        } else if (latency_given < 2) {
          error("/memory/latency", "off-chip latency must be ≥ 2");
        } else {
          cfg.memory.latency = latency_given;
        }
        break;
    }
    if (cfg.memory.address_bits < 32 && cfg.memory.size_bytes > (1ull << cfg.memory.address_bits)) {
      error("/memory/size_bytes", "size_bytes exceeds the " + std::to_string(cfg.memory.address_bits) +
                                      "-bit address space");
    }

    // caches
    if (j.contains("caches") && !j.at("caches").is_null()) {
      const auto& c = j.at("caches");
      if (object(c, "/caches", {"l1", "l1i", "l1d", "l2", "per_core"})) {
        CachesConfig cc;
        mem::CacheParams l1;
        if (c.contains("l1")) cache(c.at("l1"), "/caches/l1", l1);
        mem::CacheParams l1i = l1, l1d = l1;
        if (c.contains("l1i")) cache(c.at("l1i"), "/caches/l1i", l1i);
        if (c.contains("l1d")) cache(c.at("l1d"), "/caches/l1d", l1d);
        cc.l2.index_bits = 7;
        cc.l2.role = mem::CacheRole::Lx;
        if (c.contains("l2")) cache(c.at("l2"), "/caches/l2", cc.l2);
        cc.l2.role = mem::CacheRole::Lx;
        cc.l1i.assign(harts, l1i);
        cc.l1d.assign(harts, l1d);
        if (c.contains("per_core")) {
          const auto& pc = c.at("per_core");
          if (!pc.is_array()) {
            error("/caches/per_core", "per_core must be an array");
          } else {
            if (pc.size() > harts) error("/caches/per_core", "more entries than cores");
            for (std::size_t i = 0; i < pc.size() && i < harts; ++i) {
              const std::string p = "/caches/per_core/" + std::to_string(i);
              if (!object(pc[i], p, {"l1i", "l1d"})) continue;
              if (pc[i].contains("l1i")) cache(pc[i].at("l1i"), p + "/l1i", cc.l1i[i]);
              if (pc[i].contains("l1d")) cache(pc[i].at("l1d"), p + "/l1d", cc.l1d[i]);
            }
          }
        }
        // explicit seeds win; otherwise derive from the system seed
        auto seeded = [&](const json* src, mem::CacheParams& p, std::uint64_t k) {
          if (!(src && src->is_object() && src->contains("seed"))) {
            p.seed = static_cast<std::uint32_t>(cfg.seed * 1009 + k);
          }
        };
        auto at = [&](const char* key) -> const json* { return c.contains(key) ? &c.at(key) : nullptr; };
        for (unsigned i = 0; i < harts; ++i) {
          const json* pi = nullptr;
          const json* pd = nullptr;
          if (c.contains("per_core") && c.at("per_core").is_array() && i < c.at("per_core").size()) {
            const auto& e = c.at("per_core")[i];
            if (e.is_object() && e.contains("l1i")) pi = &e.at("l1i");
            if (e.is_object() && e.contains("l1d")) pd = &e.at("l1d");
          }
          if (!pi) pi = at("l1i") && at("l1i")->contains("seed") ? at("l1i") : at("l1");
          if (!pd) pd = at("l1d") && at("l1d")->contains("seed") ? at("l1d") : at("l1");
          seeded(pi, cc.l1i[i], 2 * i + 1);
          seeded(pd, cc.l1d[i], 2 * i + 2);
        }
        seeded(at("l2"), cc.l2, 0);

        std::uint64_t l1_bytes = 0;
        for (unsigned i = 0; i < harts; ++i) {
          for (const auto* p : {&cc.l1i[i], &cc.l1d[i]}) {
            l1_bytes += p->capacity_bytes();
            if (p->offset_bits > cc.l2.offset_bits) {
              error("/caches", "L1 lines of core " + std::to_string(i) +
                                   " are wider than L2 lines; the L2 line width must be a multiple of every L1 line width");
            }
          }
        }
        if (l1_bytes > cc.l2.capacity_bytes()) {
          warn("/caches/l2", "L2 is smaller than the L1s combined; inclusion will force back-invalidations");
        }
        cfg.caches = cc;
      }
    }

    // interconnect
    cfg.interconnect = cfg.caches ? InterconnectKind::SharedBus : InterconnectKind::None;
    if (j.contains("interconnect")) {
      const auto& ic = j.at("interconnect");
      std::optional<std::string> kind;
      const json* nj = nullptr;
      if (ic.is_string()) {
        kind = ic.get<std::string>();
      } else if (object(ic, "/interconnect", {"kind", "noc"})) {
        kind = string(ic, "kind", "/interconnect");
        if (ic.contains("noc")) nj = &ic.at("noc");
      }
      if (kind) {
        if (*kind == "none") {
          cfg.interconnect = InterconnectKind::None;
        } else if (*kind == "shared-bus") {
          cfg.interconnect = InterconnectKind::SharedBus;
        } else if (*kind == "noc") {
          cfg.interconnect = InterconnectKind::Noc;
        } else {
          error("/interconnect/kind", "kind must be none, shared-bus or noc");
        }
      }
      if (nj) noc(*nj, cfg);
    }
    if (cfg.interconnect != InterconnectKind::None && !cfg.caches) {
      error("/interconnect", std::string(interconnect_name(cfg.interconnect)) + " needs a cache subsystem");
    }
    if (cfg.interconnect == InterconnectKind::None && cfg.caches) {
      error("/interconnect", "a cache subsystem needs interconnect shared-bus or noc");
    }
    if (cfg.interconnect == InterconnectKind::Noc) {
      try {
        const auto t = noc::build_topology(cfg.noc.topology);
        const unsigned nodes = t.nodes();
        if (cfg.memory.size_bytes % nodes) {
          error("/memory/size_bytes", "size_bytes must divide evenly across " + std::to_string(nodes) + " NoC nodes");
        } else if (cfg.caches && (cfg.memory.size_bytes / nodes) % cfg.caches->l2.line_bytes()) {
          error("/memory/size_bytes", "per-node memory slice must hold whole L2 lines");
        }
        if (cfg.noc.cluster_node >= nodes) {
          error("/interconnect/noc/cluster_node", "cluster_node must be < " + std::to_string(nodes));
        }
      } catch (const Error& e) {
        error("/interconnect/noc", e.detail());
      }
    }

    if (harts > 1 && !cfg.caches) {
      error("/caches", std::to_string(harts) + " cores share memory; coherence requires an L1/L2 cache subsystem");
    }
    if (cfg.memory.separate && cfg.caches) {
      error("/memory/layout", "separate instruction/data memories are only modelled without caches");
    }
    for (std::size_t i = 0; i < cfg.cores.size(); ++i) {
      if (cfg.cores[i].variant == cpu::CoreVariant::SingleCycle && cfg.memory.kind != mem::MemoryKind::Async &&
          !cfg.caches) {
        warn("/cores/" + std::to_string(i),
             "single-cycle core on " + std::string(mem::memory_kind_name(cfg.memory.kind)) +
                 " memory: NOPs are inserted between BRAM or off-chip memory accesses");
        break;
      }
    }

    // kernel
    cfg.kernel = bundled_kernel_params(harts);
    if (j.contains("kernel") && object(j.at("kernel"), "/kernel", {"stack_pointer", "stack_size"})) {
      const auto& k = j.at("kernel");
      if (auto v = integer(k, "stack_pointer", "/kernel", 0, UINT32_MAX)) cfg.kernel.stack_pointer = static_cast<std::uint32_t>(*v);
      if (auto v = integer(k, "stack_size", "/kernel", 0, UINT32_MAX)) cfg.kernel.stack_size = static_cast<std::uint32_t>(*v);
    }
    cfg.kernel.harts = harts;
    if (cfg.kernel.stack_pointer >= cfg.memory.size_bytes) {
      error("/kernel/stack_pointer", "stack pointer lies outside the " + std::to_string(cfg.memory.size_bytes) +
                                         "-byte memory");
    }
    if (cfg.kernel.hart_stack(harts - 1) < 0) {
      error("/kernel", "stack of hart " + std::to_string(harts - 1) + " starts below address 0");
    }

    // program
    if (j.contains("program")) {
      const auto& p = j.at("program");
      if (p.is_string()) {
        // a bundled benchmark name, otherwise a file
        const auto name = p.get<std::string>();
        if (const auto* b = find_benchmark(name)) {
          cfg.program.benchmark = name;
          cfg.program.params = b->params;
        } else {
          cfg.program.path = name;
        }
      } else if (object(p, "/program", {"benchmark", "path", "params"})) {
        if (auto v = string(p, "benchmark", "/program")) cfg.program.benchmark = *v;
        if (auto v = string(p, "path", "/program")) cfg.program.path = *v;
        if (cfg.program.benchmark.empty() == cfg.program.path.empty()) {
          error("/program", "give exactly one of benchmark or path");
        }
        const BenchmarkInfo* b = cfg.program.benchmark.empty() ? nullptr : find_benchmark(cfg.program.benchmark);
        if (!cfg.program.benchmark.empty() && !b) {
          error("/program/benchmark", "unknown benchmark '" + cfg.program.benchmark + "'");
        }
        if (p.contains("params")) {
          const auto& pp = p.at("params");
          if (!pp.is_object()) {
            error("/program/params", "params must be an object");
          } else {
            for (const auto& [k, v] : pp.items()) {
              if (b && !b->params.count(k)) error("/program/params/" + k, "benchmark has no parameter '" + k + "'");
              if (!v.is_number_unsigned() || v.get<std::uint64_t>() > UINT32_MAX) {
                error("/program/params/" + k, "parameter values are 32-bit unsigned integers");
              } else {
                cfg.program.params[k] = v.get<std::uint32_t>();
              }
            }
          }
          if (!b && !cfg.program.params.empty()) error("/program/params", "params only apply to bundled benchmarks");
        }
        if (b) {
          for (const auto& [k, v] : b->params) cfg.program.params.emplace(k, v);
        }
      }
    }
  }

  void noc(const json& n, SystemConfig& cfg) {
    const std::string p = "/interconnect/noc";
    if (!object(n, p, {"topology", "width", "height", "nodes", "neighbours", "tables", "routing", "router",
                      "cluster_node"})) {
      return;
    }
    auto& t = cfg.noc.topology;
    if (auto v = named(n, "topology", p, noc::topology_from_name)) t.kind = *v;
    if (auto v = integer(n, "width", p, 1, 64)) t.width = static_cast<unsigned>(*v);
    if (auto v = integer(n, "height", p, 1, 64)) t.height = static_cast<unsigned>(*v);
    if (auto v = integer(n, "nodes", p, 1, 4096)) t.nodes = static_cast<unsigned>(*v);
    if (auto v = integer(n, "cluster_node", p, 0, 4095)) cfg.noc.cluster_node = static_cast<unsigned>(*v);
    t.routing = t.kind == noc::TopologyKind::Mesh ? noc::RoutingMode::DOR : noc::RoutingMode::Table;
    if (auto v = named(n, "routing", p, noc::routing_from_name)) t.routing = *v;
    if (n.contains("neighbours")) {
      try {
        t.neighbours = n.at("neighbours").get<std::vector<std::vector<unsigned>>>();
      } catch (const std::exception&) {
        error(p + "/neighbours", "neighbours must be an array of arrays of node ids");
      }
    }
    if (n.contains("tables")) {
      const auto& tj = n.at("tables");
      if (!tj.is_array()) {
        error(p + "/tables", "tables must be an array with one object per node");
      } else {
        for (std::size_t i = 0; i < tj.size(); ++i) {
          noc::RoutingTable rt;
          if (!tj[i].is_object()) {
            error(p + "/tables/" + std::to_string(i), "routing table must map destination ids to ports");
            continue;
          }
          for (const auto& [k, v] : tj[i].items()) {
            try {
              rt[static_cast<unsigned>(std::stoul(k))] = v.get<unsigned>();
            } catch (const std::exception&) {
              error(p + "/tables/" + std::to_string(i) + "/" + k, "destination ids and ports are integers");
            }
          }
          t.tables.push_back(rt);
        }
      }
    }
    if (n.contains("router")) {
      const auto& r = n.at("router");
      const std::string rp = p + "/router";
      if (object(r, rp, {"kind", "vcs", "vc_depth", "pipeline_stages", "buffered"})) {
        auto& rr = cfg.noc.router;
        if (auto v = named(r, "kind", rp, noc::router_kind_from_name)) rr.kind = *v;
        if (auto v = integer(r, "vcs", rp, 1, 16)) rr.vcs = static_cast<unsigned>(*v);
        if (auto v = integer(r, "vc_depth", rp, 1, 256)) rr.vc_depth = static_cast<unsigned>(*v);
        if (auto v = integer(r, "pipeline_stages", rp, 1, 16)) rr.pipeline_stages = static_cast<unsigned>(*v);
        if (auto v = boolean(r, "buffered", rp)) rr.buffered = *v;
      }
    }
  }

 private:
  Validation& v_;
};

}  // namespace

Validation validate_config(const json& j) {
  Validation v;
  SystemConfig cfg;
  Analyzer(v).analyze(j, cfg);
  return v;
}

SystemConfig parse_config(const json& j, Validation* report) {
  Validation v;
  SystemConfig cfg;
  Analyzer(v).analyze(j, cfg);
  if (report) *report = v;
  if (!v.ok()) {
    std::string msg;
    for (const auto& e : v.errors) msg += (msg.empty() ? "" : "; ") + e.path + ": " + e.message;
    throw Error(ErrorKind::InvalidConfig, msg);
  }
  return cfg;
}

json resolved_config(const SystemConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["seed"] = cfg.seed;
  j["max_cycles"] = cfg.max_cycles;
  j["stats_interval"] = cfg.stats_interval;
  j["cores"] = json::array();
  for (const auto& c : cfg.cores) {
    json cj = {{"variant", cpu::variant_name(c.variant)}};
    if (c.variant == cpu::CoreVariant::Ooo) {
      cj["ooo"] = {{"queue_length", c.ooo.queue_length},
                   {"alus", c.ooo.alu_latency.size()},
                   {"alu_latency", c.ooo.alu_latency},
                   {"pipelined_alus", c.ooo.pipelined_alus},
                   {"commit_capacity", c.ooo.commit_capacity}};
    }
    j["cores"].push_back(cj);
  }
  j["memory"] = {{"kind", mem::memory_kind_name(cfg.memory.kind)},
                 {"size_bytes", cfg.memory.size_bytes},
                 {"latency", cfg.memory.latency},
                 {"address_bits", cfg.memory.address_bits},
                 {"layout", cfg.memory.separate ? "separate" : "unified"}};
  if (cfg.caches) {
    json pc = json::array();
    for (std::size_t i = 0; i < cfg.caches->l1i.size(); ++i) {
      pc.push_back({{"l1i", cache_params_json(cfg.caches->l1i[i])}, {"l1d", cache_params_json(cfg.caches->l1d[i])}});
    }
    j["caches"] = {{"per_core", pc}, {"l2", cache_params_json(cfg.caches->l2)}};
  } else {
    j["caches"] = nullptr;
  }
  json ic = {{"kind", interconnect_name(cfg.interconnect)}};
  if (cfg.interconnect == InterconnectKind::Noc) {
    const auto& t = cfg.noc.topology;
    json n = {{"topology", noc::topology_name(t.kind)},
              {"routing", noc::routing_name(t.routing)},
              {"cluster_node", cfg.noc.cluster_node}};
    if (t.kind == noc::TopologyKind::Mesh) {
      n["width"] = t.width;
      n["height"] = t.height;
    } else if (t.kind == noc::TopologyKind::Ring) {
      n["nodes"] = t.nodes;
    } else {
      n["neighbours"] = t.neighbours;
      if (!t.tables.empty()) {
        json tabs = json::array();
        for (const auto& rt : t.tables) {
          json o = json::object();
          for (const auto& [d, port] : rt) o[std::to_string(d)] = port;
          tabs.push_back(o);
        }
        n["tables"] = tabs;
      }
    }
    const auto& r = cfg.noc.router;
    n["router"] = {{"kind", noc::router_kind_name(r.kind)},
                   {"vcs", r.vcs},
                   {"vc_depth", r.vc_depth},
                   {"pipeline_stages", r.pipeline_stages},
                   {"buffered", r.buffered}};
    ic["noc"] = n;
  }
  j["interconnect"] = ic;
  j["kernel"] = {{"stack_pointer", cfg.kernel.stack_pointer}, {"stack_size", cfg.kernel.stack_size}};
  if (!cfg.program.benchmark.empty()) {
    j["program"] = {{"benchmark", cfg.program.benchmark}, {"params", cfg.program.params}};
  } else if (!cfg.program.path.empty()) {
    j["program"] = {{"path", cfg.program.path}};
  }
  return j;
}

}  // namespace rvdse::sys
