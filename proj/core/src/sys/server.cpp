#include "rvdse/sys/server.hpp"

#include <httplib.h>

#include <atomic>
#include <regex>

#include "rvdse/asm/vmh.hpp"
#include "rvdse/error.hpp"
#include "rvdse/sys/config.hpp"
#include "rvdse/sys/programs.hpp"
#include "rvdse/sys/system.hpp"

namespace rvdse::sys {

using nlohmann::json;

struct ApiService::Run {
  std::string id;
  std::mutex mu;
  std::string status = "queued";  // queued | running | halted | cycle-limit | error
  std::string error;
  json config;
  json report;
  std::vector<isa::RetirementTrace> traces;
  std::atomic<std::uint64_t> cycle{0};
};

namespace {

ApiResponse err(int status, const std::string& msg, json extra = json::object()) {
  extra["error"] = msg;
  return {status, extra};
}

constexpr std::uint64_t kChunk = 1 << 16;

}  // namespace

ApiService::ApiService() = default;

ApiService::~ApiService() { wait_all(); }

void ApiService::wait_all() {
  std::vector<std::thread> ts;
  {
    std::lock_guard lk(mu_);
    ts.swap(threads_);
  }
  for (auto& t : ts) t.join();
}

std::shared_ptr<ApiService::Run> ApiService::find(const std::string& id) {
  std::lock_guard lk(mu_);
  const auto it = runs_.find(id);
  return it == runs_.end() ? nullptr : it->second;
}

ApiResponse ApiService::handle(const std::string& method, const std::string& path,
                               const std::map<std::string, std::string>& query, const std::string& body) {
  static const std::regex run_re("^/api/runs/([A-Za-z0-9_-]+)$");
  static const std::regex trace_re("^/api/runs/([A-Za-z0-9_-]+)/trace$");
  auto parse_body = [&]() -> json {
    if (body.empty()) return json::object();
    return json::parse(body);
  };
  try {
    std::smatch m;
    if (method == "GET" && path == "/api/schema") return {200, config_schema()};
    if (method == "GET" && path == "/api/stats-schema") return {200, stats_schema()};
    if (method == "GET" && path == "/api/benchmarks") {
      json list = json::array();
      for (const auto& b : bundled_benchmarks()) {
        list.push_back({{"name", b.name},
                        {"description", b.description},
                        {"params", b.params},
                        {"result_label", b.result_label},
                        {"per_hart_results", b.per_hart_results}});
      }
      return {200, list};
    }
    if (method == "POST" && path == "/api/validate") {
      auto j = parse_body();
      if (j.contains("config") && j.size() == 1) j = j["config"];
      return {200, validate_config(j).to_json()};
    }
    if (method == "POST" && path == "/api/runs") return create_run(parse_body());
    if (method == "GET" && path == "/api/runs") return list_runs();
    if (method == "GET" && std::regex_match(path, m, run_re)) return get_run(m[1]);
    if (method == "GET" && std::regex_match(path, m, trace_re)) return get_trace(m[1], query);
    return err(404, "no route for " + method + " " + path);
  } catch (const json::exception& e) {
    return err(400, std::string("bad JSON: ") + e.what());
  }
}

ApiResponse ApiService::create_run(const json& body) {
  if (!body.contains("config")) return err(400, "body needs a 'config' object");
  json cfg_doc = body.at("config");
  std::string vmh;
  if (body.contains("program")) {
    const auto& p = body.at("program");
    if (!p.is_string()) return err(400, "'program' must be a benchmark name");
    if (!find_benchmark(p.get<std::string>())) return err(400, "unknown benchmark '" + p.get<std::string>() + "'");
    cfg_doc["program"] = {{"benchmark", p}};
    if (body.contains("params")) cfg_doc["program"]["params"] = body.at("params");
  }
  if (body.contains("vmh")) {
    vmh = body.at("vmh").get<std::string>();
    cfg_doc.erase("program");
  }
  const auto v = validate_config(cfg_doc);
  if (!v.ok()) return err(422, "invalid config", {{"validation", v.to_json()}});

  LoadedProgram prog;
  SystemConfig cfg;
  try {
    cfg = parse_config(cfg_doc);
    if (!vmh.empty()) {
      prog.name = "upload.vmh";
      prog.image = assembler::parse_vmh(vmh);
    } else {
      if (cfg.program.benchmark.empty()) return err(400, "no program: give 'program' or 'vmh'");
      prog = load_program(cfg);
    }
  } catch (const Error& e) {
    return err(400, e.what());
  }
  const std::uint64_t max_cycles = body.value("max_cycles", cfg.max_cycles);
  const bool record_trace = body.value("trace", true);

  auto run = std::make_shared<Run>();
  {
    std::lock_guard lk(mu_);
    run->id = "r" + std::to_string(next_id_++);
    runs_[run->id] = run;
  }
  run->config = resolved_config(cfg);

  auto job = [run, cfg, prog, max_cycles, record_trace] {
    std::unique_ptr<System> sys;
    try {
      sys = std::make_unique<System>(cfg, prog);
    } catch (const std::exception& e) {
      std::lock_guard lk(run->mu);
      run->status = "error";
      run->error = e.what();
      return;
    }
    sys->set_record_trace(record_trace);
    {
      std::lock_guard lk(run->mu);
      run->status = "running";
    }
    RunStatus st = RunStatus::CycleLimit;
    while (true) {
      const auto limit = std::min(max_cycles, sys->cycle() + kChunk);
      st = sys->run(limit);
      run->cycle = sys->cycle();
      if (st != RunStatus::CycleLimit || limit >= max_cycles) break;
    }
    std::lock_guard lk(run->mu);
    run->status = run_status_name(st);
    run->error = sys->error_message();
    run->report = sys->report();
    for (unsigned h = 0; h < sys->harts(); ++h) run->traces.push_back(sys->core(h).trace());
  };

  if (body.value("wait", false)) {
    job();
  } else {
    std::lock_guard lk(mu_);
    threads_.emplace_back(job);
  }
  std::lock_guard lk(run->mu);
  return {201, {{"id", run->id}, {"status", run->status}}};
}

ApiResponse ApiService::list_runs() {
  std::vector<std::shared_ptr<Run>> all;
  {
    std::lock_guard lk(mu_);
    for (const auto& [id, r] : runs_) all.push_back(r);
  }
  json out = json::array();
  for (const auto& r : all) {
    std::lock_guard lk(r->mu);
    out.push_back({{"id", r->id}, {"status", r->status}, {"cycle", r->cycle.load()}});
  }
  return {200, out};
}

ApiResponse ApiService::get_run(const std::string& id) {
  auto r = find(id);
  if (!r) return err(404, "no run '" + id + "'");
  std::lock_guard lk(r->mu);
  json j = {{"id", r->id}, {"status", r->status}, {"cycle", r->cycle.load()}, {"config", r->config}};
  if (!r->error.empty()) j["error"] = r->error;
  if (!r->report.is_null()) j["report"] = r->report;
  return {200, j};
}

ApiResponse ApiService::get_trace(const std::string& id, const std::map<std::string, std::string>& query) {
  auto r = find(id);
  if (!r) return err(404, "no run '" + id + "'");
  auto num = [&](const char* key, std::uint64_t def) -> std::uint64_t {
    const auto it = query.find(key);
    return it == query.end() ? def : std::stoull(it->second);
  };
  std::uint64_t hart, from, count;
  try {
    hart = num("hart", 0);
    from = num("from", 0);
    count = std::min<std::uint64_t>(num("count", 100), 10000);
  } catch (const std::exception&) {
    return err(400, "hart, from and count must be non-negative integers");
  }
  std::lock_guard lk(r->mu);
  if (r->report.is_null()) return err(409, "run '" + id + "' has not finished", {{"status", r->status}});
  if (hart >= r->traces.size()) return err(400, "no hart " + std::to_string(hart));
  const auto& t = r->traces[hart];
  json recs = json::array();
  for (std::uint64_t i = from; i < t.size() && i < from + count; ++i) {
    const auto& x = t[i];
    json rec = {{"pc", x.pc}, {"instr", x.instr}, {"rd", x.rd}, {"val", x.value}};
    if (x.store) rec["store"] = {{"addr", x.mem_addr}, {"data", x.mem_data}, {"mask", x.mem_mask}};
    recs.push_back(rec);
  }
  return {200, {{"id", id}, {"hart", hart}, {"from", from}, {"total", t.size()}, {"records", recs}}};
}

struct HttpServer::Impl {
  httplib::Server srv;
};

HttpServer::HttpServer(std::string static_dir)
    : service_(std::make_unique<ApiService>()), impl_(std::make_unique<Impl>()) {
  auto& srv = impl_->srv;
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> q;
    for (const auto& [k, v] : req.params) q[k] = v;
    const auto r = service_->handle(req.method, req.path, q, req.body);
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.body.dump(), "application/json");
  };
  srv.Get(R"(/api/.*)", handler);
  srv.Post(R"(/api/.*)", handler);
  srv.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  if (!static_dir.empty()) srv.set_mount_point("/", static_dir);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->srv.bind_to_any_port(host);
  return impl_->srv.bind_to_port(host, port) ? port : -1;
}

void HttpServer::listen() { impl_->srv.listen_after_bind(); }

void HttpServer::stop() { impl_->srv.stop(); }

}  // namespace rvdse::sys
