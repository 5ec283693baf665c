#include "rvdse/sys/system.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "rvdse/asm/kernel.hpp"
#include "rvdse/asm/vmh.hpp"
#include "rvdse/error.hpp"
#include "rvdse/sys/programs.hpp"

namespace rvdse::sys {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

const char* run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Halted: return "halted";
    case RunStatus::CycleLimit: return "cycle-limit";
    case RunStatus::Error: return "error";
  }
  return "error";
}

LoadedProgram load_program(const SystemConfig& cfg, const std::string& path_override) {
  LoadedProgram p;
  const std::string path = path_override.empty() ? cfg.program.path : path_override;
  if (path.empty() && !cfg.program.benchmark.empty()) {
    const auto* b = find_benchmark(cfg.program.benchmark);
    auto prog = build_bundled_program(cfg.program.benchmark, static_cast<unsigned>(cfg.cores.size()), cfg.program.params);
    p.name = cfg.program.benchmark;
    p.image = std::move(prog.image);
    p.labels = std::move(prog.labels);
    p.result_label = b->result_label;
    p.per_hart_results = b->per_hart_results;
    return p;
  }
  if (path.empty()) throw Error(ErrorKind::InvalidConfig, "no program given");
  p.name = path;
  if (ends_with(path, ".s") || ends_with(path, ".S") || ends_with(path, ".asm")) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidConfig, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    auto prog = assembler::assemble(
        assembler::wrap_kernel(assembler::AssemblySource::from_text(ss.str()), cfg.kernel));
    p.image = std::move(prog.image);
    p.labels = std::move(prog.labels);
    if (p.labels.count("results")) {
      p.result_label = "results";
      p.per_hart_results = true;
    } else if (p.labels.count("result")) {
      p.result_label = "result";
    }
    return p;
  }
  p.image = assembler::read_vmh_file(path);
  return p;
}

System::System(const SystemConfig& cfg, const LoadedProgram& program) : cfg_(cfg), program_(program) {
  const std::size_t words = cfg_.memory.size_bytes / 4;
  const unsigned lat = cfg_.memory.latency;
  memory_ = std::make_unique<mem::MainMemory>(words);
  memory_->load_image(program_.image.words);
  const unsigned harts = static_cast<unsigned>(cfg_.cores.size());
  const std::uint32_t entry = program_.image.entry;

  if (!cfg_.caches) {
    mem::MainMemory* imem = memory_.get();
    if (cfg_.memory.separate) {
      imemory_ = std::make_unique<mem::MainMemory>(words);
      imemory_->load_image(program_.image.words);
      imem = imemory_.get();
    }
    auto ip = std::make_unique<cpu::FlatPort>(*imem, lat);
    auto dflat = std::make_unique<cpu::FlatPort>(*memory_, lat);
    auto dp = std::make_unique<cpu::HartIdPort>(*dflat, 0, lat);
    flat_ports_ = {ip.get(), dflat.get()};
    cores_.push_back(cpu::make_core(cfg_.cores[0].variant, 0, entry, *ip, *dp, cfg_.cores[0].ooo));
    ports_.push_back(std::move(ip));
    ports_.push_back(std::move(dflat));
    ports_.push_back(std::move(dp));
  } else {
    const auto& cc = *cfg_.caches;
    if (cfg_.interconnect == InterconnectKind::Noc) {
      const auto topo = noc::build_topology(cfg_.noc.topology);
      network_ = std::make_unique<noc::Network>(topo, cfg_.noc.router);
      const mem::NodeMap map{topo.nodes(), cfg_.memory.size_bytes / topo.nodes()};
      backend_ = std::make_unique<noc::NocLineBackend>(*network_, *memory_, map, cfg_.noc.cluster_node, lat, cc.l2.words_per_line());
    } else {
      backend_ = std::make_unique<mem::LocalLineBackend>(*memory_, lat);
    }
    caches_ = std::make_unique<mem::CacheHierarchy>(cc.l2, *backend_);
    for (unsigned h = 0; h < harts; ++h) {
      auto& ic = caches_->add_l1("core" + std::to_string(h) + ".l1i", cc.l1i[h]);
      auto& dc = caches_->add_l1("core" + std::to_string(h) + ".l1d", cc.l1d[h]);
      auto dp = std::make_unique<cpu::HartIdPort>(dc, h, cc.l1d[h].hit_latency);
      cores_.push_back(cpu::make_core(cfg_.cores[h].variant, h, entry, ic, *dp, cfg_.cores[h].ooo));
      ports_.push_back(std::move(dp));
    }
  }
  for (unsigned h = 0; h < harts; ++h) order_.push_back(h);
}

System::~System() = default;

void System::set_record_trace(bool on) {
  for (auto& c : cores_) c->set_record_trace(on);
}

bool System::halted() const {
  for (const auto& c : cores_) {
    if (!c->halted()) return false;
  }
  return true;
}

void System::step() {
  if (backend_) backend_->tick(now_);
  if (caches_) caches_->tick(now_);
  for (unsigned h : order_) {
    auto& c = *cores_[h];
    if (!c.halted()) c.tick(now_);
  }
  ++now_;
  if (cfg_.stats_interval && now_ % cfg_.stats_interval == 0) snapshot();
}

void System::snapshot() {
  nlohmann::json s = {{"cycle", now_}};
  nlohmann::json retired = nlohmann::json::array();
  for (const auto& c : cores_) retired.push_back(c->stats().retired);
  s["retired"] = retired;
  if (caches_) {
    std::uint64_t misses = 0;
    for (std::size_t i = 0; i < caches_->l1_count(); ++i) misses += caches_->l1(i).array().stats.misses;
    s["l1_misses"] = misses;
    s["l2_misses"] = caches_->l2().array().stats.misses;
    s["bus_busy_cycles"] = caches_->bus_busy_cycles();
  }
  if (network_) s["noc_flits_ejected"] = network_->flits_ejected();
  intervals_.push_back(std::move(s));
}

RunStatus System::run(std::optional<std::uint64_t> max_cycles) {
  const std::uint64_t limit = max_cycles.value_or(cfg_.max_cycles);
  const auto t0 = std::chrono::steady_clock::now();
  status_ = RunStatus::Halted;
  error_.clear();
  try {
    while (!halted()) {
      if (now_ >= limit) {
        status_ = RunStatus::CycleLimit;
        error_ = "cycle limit of " + std::to_string(limit) + " reached";
        break;
      }
      step();
    }
  } catch (Error& e) {
    if (!e.cycle()) e.at_cycle(now_);
    status_ = RunStatus::Error;
    error_ = e.what();
  } catch (const std::exception& e) {
    status_ = RunStatus::Error;
    error_ = e.what();
  }
  wall_seconds_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return status_;
}

std::uint32_t System::read_word(std::uint32_t addr) const {
  if (caches_) return caches_->coherent_read(addr);
  return memory_->read(addr & ~3u);
}

void System::flush_caches() {
  if (caches_) caches_->flush_all();
}

std::vector<std::uint32_t> System::results() const {
  std::vector<std::uint32_t> out;
  if (program_.result_label.empty()) return out;
  const auto it = program_.labels.find(program_.result_label);
  if (it == program_.labels.end()) return out;
  const unsigned n = program_.per_hart_results ? harts() : 1;
  for (unsigned i = 0; i < n; ++i) out.push_back(read_word(it->second + 4 * i));
  return out;
}

nlohmann::json System::report() const {
  using nlohmann::json;
  json r;
  r["schema"] = "rvdse-stats/1";
  r["config"] = resolved_config(cfg_);
  r["status"] = run_status_name(status_);
  if (!error_.empty()) r["message"] = error_;
  r["cycles"] = now_;
  json prog = {{"name", program_.name}, {"entry", program_.image.entry}, {"image_words", program_.image.words.size()}};
  if (!program_.result_label.empty()) prog["results"] = results();
  r["program"] = prog;

  json cores = json::array();
  std::uint64_t retired = 0;
  for (const auto& c : cores_) {
    json cs;
    cs["hart"] = c->hart();
    cs["variant"] = cpu::variant_name(cfg_.cores[c->hart()].variant);
    cs["halted"] = c->halted();
    cs["halt_reason"] = isa::halt_reason_name(c->halt_reason());
    cs["a0"] = c->regs()[10];
    cs["stats"] = c->stats();
    retired += c->stats().retired;
    cores.push_back(cs);
  }
  r["cores"] = cores;
  r["totals"] = {{"retired", retired},
                 {"ipc", now_ ? static_cast<double>(retired) / static_cast<double>(now_) : 0.0}};
  json m = {{"kind", mem::memory_kind_name(cfg_.memory.kind)}, {"latency", cfg_.memory.latency}};
  if (!flat_ports_.empty()) {
    m["instruction_accesses"] = flat_ports_[0]->accesses();
    m["data_accesses"] = flat_ports_[1]->accesses();
  }
  r["memory"] = m;
  json derived = {{"ipc", r["totals"]["ipc"]}};
  if (caches_) {
    mem::CacheStats is, ds;
    for (std::size_t i = 0; i < caches_->l1_count(); ++i) {
      const auto& s = caches_->l1(i).array().stats;
      auto& agg = i % 2 == 0 ? is : ds;
      agg.hits += s.hits;
      agg.misses += s.misses;
    }
    derived["l1i_miss_rate"] = is.miss_rate();
    derived["l1d_miss_rate"] = ds.miss_rate();
    derived["l2_miss_rate"] = caches_->l2().array().stats.miss_rate();
  }
  r["derived"] = derived;
  r["caches"] = caches_ ? caches_->stats_json() : json(nullptr);
  r["noc"] = network_ ? network_->stats_json() : json(nullptr);
  if (cfg_.stats_interval) r["intervals"] = intervals_;
  r["host"] = {{"wall_seconds", wall_seconds_},
               {"cycles_per_second", wall_seconds_ > 0 ? static_cast<double>(now_) / wall_seconds_ : 0.0}};
  return r;
}

double speedup(const nlohmann::json& baseline, const nlohmann::json& report) {
  const auto b = baseline.at("cycles").get<double>();
  const auto c = report.at("cycles").get<double>();
  return c > 0 ? b / c : 0.0;
}

nlohmann::json deterministic_part(const nlohmann::json& report) {
  auto r = report;
  r.erase("host");
  return r;
}

}  // namespace rvdse::sys
