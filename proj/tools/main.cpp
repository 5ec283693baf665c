#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rvdse/asm/kernel.hpp"
#include "rvdse/asm/vmh.hpp"
#include "rvdse/error.hpp"
#include "rvdse/isa/trace.hpp"
#include "rvdse/sys/config.hpp"
#include "rvdse/sys/programs.hpp"
#include "rvdse/sys/server.hpp"
#include "rvdse/sys/sweep.hpp"
#include "rvdse/sys/system.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rvdse;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kRuntime = 2, kCycleLimit = 3 };

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidConfig, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(slurp(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidConfig, path + ": " + e.what());
  }
}

void print_issues(const sys::Validation& v) {
  for (const auto& w : v.warnings) std::cerr << "warning: " << w.path << ": " << w.message << '\n';
  for (const auto& e : v.errors) std::cerr << "error: " << e.path << ": " << e.message << '\n';
}

// Errors in the user's inputs count as validation failures.
int exit_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::ParseError:
    case ErrorKind::ImmediateOutOfRange:
    case ErrorKind::UndefinedLabel:
    case ErrorKind::DuplicateLabel:
    case ErrorKind::MalformedToken:
    case ErrorKind::AddressOverflow:
    case ErrorKind::MissingHartMain:
    case ErrorKind::InvalidStackLayout:
    case ErrorKind::MisalignedAddress:
    case ErrorKind::InvalidTopology:
      return kInvalid;
    default:
      return kRuntime;
  }
}

std::uint32_t parse_hex(const std::string& s) {
  std::size_t used = 0;
  const auto v = std::stoul(s, &used, 16);
  if (used != s.size()) throw CLI::ValidationError("--stack-pointer", "expects a hex number");
  return static_cast<std::uint32_t>(v);
}

int cmd_asm(const std::string& in, const std::string& out, const std::string& sp, unsigned stack_size,
            unsigned harts, bool raw) {
  const auto src = assembler::AssemblySource::from_text(slurp(in));
  assembler::AssembledProgram prog;
  if (raw) {
    prog = assembler::assemble(src);
  } else {
    assembler::KernelParams k;
    if (!sp.empty()) k.stack_pointer = parse_hex(sp);
    k.stack_size = stack_size;
    k.harts = harts;
    prog = assembler::assemble(assembler::wrap_kernel(src, k));
  }
  const auto text = assembler::emit_vmh(prog.image);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream(out) << text;
  }
  return kOk;
}

int cmd_validate(const std::string& config) {
  const auto v = sys::validate_config(read_json(config));
  print_issues(v);
  std::cout << v.to_json().dump(2) << '\n';
  return v.ok() ? kOk : kInvalid;
}

struct RunOptions {
  std::string config;
  std::string program;
  std::optional<std::uint64_t> max_cycles;
  std::string stats;
  std::string trace;
  std::optional<std::uint64_t> seed;
  std::uint64_t interval = 0;
};

void write_trace(const std::string& path, const sys::System& s) {
  std::ofstream out(path);
  const bool jsonl = path.size() > 6 && path.substr(path.size() - 6) == ".jsonl";
  for (unsigned h = 0; h < s.harts(); ++h) {
    if (s.harts() > 1 && !jsonl) out << "# hart " << h << '\n';
    if (jsonl) {
      isa::write_trace_jsonl(out, s.core(h).trace());
    } else {
      isa::write_trace_text(out, s.core(h).trace());
    }
  }
}

int cmd_run(const RunOptions& o) {
  json doc = o.config.empty() ? json::object() : read_json(o.config);
  if (o.seed) doc["seed"] = *o.seed;
  if (o.interval) doc["stats_interval"] = o.interval;
  std::string path;
  if (!o.program.empty()) {
    if (!fs::exists(o.program) && sys::find_benchmark(o.program)) {
      doc["program"] = {{"benchmark", o.program}};
    } else {
      path = o.program;
      doc.erase("program");
    }
  }
  sys::Validation v = sys::validate_config(doc);
  print_issues(v);
  if (!v.ok()) return kInvalid;
  const auto cfg = sys::parse_config(doc);
  if (path.empty() && cfg.program.benchmark.empty() && cfg.program.path.empty()) {
    std::cerr << "error: no program (use --program or set \"program\" in the config)\n";
    return kInvalid;
  }
  const auto prog = sys::load_program(cfg, path);
  sys::System s(cfg, prog);
  s.set_record_trace(!o.trace.empty());
  const auto st = s.run(o.max_cycles);
  const auto report = s.report();
  if (!o.stats.empty()) std::ofstream(o.stats) << report.dump(2) << '\n';
  if (!o.trace.empty()) write_trace(o.trace, s);

  std::cout << "status   " << sys::run_status_name(st) << '\n'
            << "cycles   " << s.cycle() << '\n'
            << "retired  " << report["totals"]["retired"] << '\n'
            << "ipc      " << report["totals"]["ipc"] << '\n';
  if (report["program"].contains("results")) std::cout << "results  " << report["program"]["results"] << '\n';
  for (unsigned h = 0; h < s.harts(); ++h) std::cout << "hart " << h << " a0 " << s.core(h).regs()[10] << '\n';
  if (!s.error_message().empty()) std::cerr << "error: " << s.error_message() << '\n';
  switch (st) {
    case sys::RunStatus::Halted: return kOk;
    case sys::RunStatus::CycleLimit: return kCycleLimit;
    case sys::RunStatus::Error: return kRuntime;
  }
  return kRuntime;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_dir, unsigned threads) {
  auto doc = read_json(spec_path);
  if (threads) doc["threads"] = threads;
  const auto spec = sys::parse_sweep(doc);
  const auto res = sys::run_sweep(spec);
  const auto csv = res.to_csv(spec);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    for (const auto& p : res.points) {
      if (!p.report.is_null()) {
        std::ofstream(fs::path(out_dir) / ("point-" + std::to_string(p.index) + ".json")) << p.report.dump(2) << '\n';
      }
    }
    std::ofstream(fs::path(out_dir) / "sweep.json") << res.to_json().dump(2) << '\n';
    std::ofstream(fs::path(out_dir) / "sweep.csv") << csv;
  }
  std::cout << csv;
  for (const auto& p : res.points) {
    if (!p.error.empty()) std::cerr << "point " << p.index << ": " << p.error << '\n';
  }
  return kOk;
}

sys::HttpServer* g_server = nullptr;

int cmd_serve(int port, const std::string& host, const std::string& static_dir) {
  sys::HttpServer server(static_dir);
  const int bound = server.bind(host, port);
  if (bound < 0) {
    std::cerr << "error: cannot bind " << host << ":" << port << '\n';
    return kRuntime;
  }
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::cout << "listening on http://" << host << ":" << bound << std::endl;
  server.listen();
  g_server = nullptr;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rvdse: cycle-level RV32I multi-core simulator"};
  app.require_subcommand(1);

  std::string asm_in, asm_out, asm_sp;
  unsigned asm_stack = 1024, asm_harts = 1;
  bool asm_raw = false;
  auto* a = app.add_subcommand("asm", "Assemble a source file to a .vmh image");
  a->add_option("input", asm_in, "Assembly source")->required()->check(CLI::ExistingFile);
  a->add_option("-o,--output", asm_out, "Output .vmh (default stdout)");
  a->add_option("--stack-pointer", asm_sp, "Initial stack pointer of hart 0 (hex)")->default_str("7fc");
  a->add_option("--stack-size", asm_stack, "Stack bytes per hart")->capture_default_str();
  a->add_option("--harts", asm_harts, "Number of harts")->capture_default_str()->check(CLI::PositiveNumber);
  a->add_flag("--raw", asm_raw, "Do not prepend the start-up code");

  RunOptions ro;
  auto* r = app.add_subcommand("run", "Simulate a program on a configured system");
  r->add_option("-c,--config", ro.config, "System config (JSON)")->check(CLI::ExistingFile);
  r->add_option("-p,--program", ro.program, "Program: .vmh, .s, or a bundled benchmark name");
  r->add_option("--max-cycles", ro.max_cycles, "Cycle limit");
  r->add_option("--stats", ro.stats, "Write the statistics report (JSON)");
  r->add_option("--trace", ro.trace, "Write retirement traces (.jsonl for JSON lines)");
  r->add_option("--seed", ro.seed, "Override the config seed");
  r->add_option("--interval", ro.interval, "Interval statistics every N cycles");

  std::string sweep_spec, sweep_out;
  unsigned sweep_threads = 0;
  auto* sw = app.add_subcommand("sweep", "Run a parameter grid");
  sw->add_option("-s,--spec", sweep_spec, "Sweep spec (JSON)")->required()->check(CLI::ExistingFile);
  sw->add_option("-o,--out", sweep_out, "Output directory");
  sw->add_option("-j,--threads", sweep_threads, "Parallel simulations");

  std::string val_config;
  auto* v = app.add_subcommand("validate", "Check a system config");
  v->add_option("-c,--config", val_config, "System config (JSON)")->required()->check(CLI::ExistingFile);

  int port = 8080;
  std::string host = "127.0.0.1", static_dir;
  auto* sv = app.add_subcommand("serve", "Serve the HTTP API");
  sv->add_option("--port", port, "Port (0 picks one)")->capture_default_str();
  sv->add_option("--host", host, "Address to bind")->capture_default_str();
  sv->add_option("--static", static_dir, "Directory served at /")->check(CLI::ExistingDirectory);

  auto* bl = app.add_subcommand("benchmarks", "List bundled benchmarks");
  auto* sc = app.add_subcommand("schema", "Print the config JSON Schema");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*a) return cmd_asm(asm_in, asm_out, asm_sp, asm_stack, asm_harts, asm_raw);
    if (*r) return cmd_run(ro);
    if (*sw) return cmd_sweep(sweep_spec, sweep_out, sweep_threads);
    if (*v) return cmd_validate(val_config);
    if (*sv) return cmd_serve(port, host, static_dir);
    if (*bl) {
      for (const auto& b : sys::bundled_benchmarks()) std::cout << b.name << "  " << b.description << '\n';
      return kOk;
    }
    if (*sc) {
      std::cout << sys::config_schema().dump(2) << '\n';
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
