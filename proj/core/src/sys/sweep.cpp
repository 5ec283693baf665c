#include "rvdse/sys/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "rvdse/error.hpp"
#include "rvdse/sys/system.hpp"

namespace rvdse::sys {

using nlohmann::json;

SweepSpec parse_sweep(const json& j) {
  std::vector<std::string> errors;
  SweepSpec s;
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "sweep spec must be an object");
  for (const auto& [k, v] : j.items()) {
    if (k != "base" && k != "grid" && k != "cap" && k != "threads" && k != "sort_by" && k != "baseline" &&
        k != "program") {
      errors.push_back("/" + k + ": unknown key");
    }
  }
  s.base = j.value("base", json::object());
  if (j.contains("cap")) s.cap = j.at("cap").get<std::size_t>();
  if (j.contains("threads")) s.threads = j.at("threads").get<unsigned>();
  if (j.contains("sort_by")) s.sort_by = j.at("sort_by").get<std::string>();
  if (j.contains("baseline")) s.baseline = j.at("baseline").get<std::size_t>();
  if (j.contains("program")) s.program = j.at("program").get<std::string>();

  const auto base_check = validate_config(s.base);
  for (const auto& e : base_check.errors) errors.push_back("/base" + e.path + ": " + e.message);

  if (j.contains("grid")) {
    if (!j.at("grid").is_object()) {
      errors.push_back("/grid: must be an object of JSON pointer -> list of values");
    } else {
      for (const auto& [path, values] : j.at("grid").items()) {
        if (!values.is_array() || values.empty()) {
          errors.push_back("/grid" + path + ": must be a non-empty list");
          continue;
        }
        if (path.empty() || path[0] != '/') {
          errors.push_back("grid path '" + path + "' must be a JSON pointer");
          continue;
        }
        // The path has to name a schema-known setting: set it to each value
        // and make sure the analyzer does not reject the key itself.
        bool known = true;
        for (const auto& v : values) {
          json probe = s.base;
          try {
            probe[json::json_pointer(path)] = v;
          } catch (const json::exception&) {
            known = false;
            break;
          }
          for (const auto& e : validate_config(probe).errors) {
            if (e.message.rfind("unknown field", 0) == 0 && path.rfind(e.path, 0) == 0) known = false;
          }
        }
        if (!known) {
          errors.push_back("grid path '" + path + "' is not a config setting");
          continue;
        }
        s.grid.push_back({path, values.get<std::vector<json>>()});
      }
    }
  }
  const auto n = grid_size(s);
  if (n > s.cap) errors.push_back("grid has " + std::to_string(n) + " points, cap is " + std::to_string(s.cap));
  if (s.baseline >= n) errors.push_back("baseline index out of range");
  if (!errors.empty()) {
    std::string msg;
    for (const auto& e : errors) msg += (msg.empty() ? "" : "; ") + e;
    throw Error(ErrorKind::InvalidConfig, msg);
  }
  return s;
}

std::size_t grid_size(const SweepSpec& spec) {
  std::size_t n = 1;
  for (const auto& a : spec.grid) n *= a.values.size();
  return n;
}

namespace {

json assignment_of(const SweepSpec& spec, std::size_t index) {
  json a = json::object();
  for (std::size_t k = spec.grid.size(); k-- > 0;) {
    const auto& axis = spec.grid[k];
    a[axis.path] = axis.values[index % axis.values.size()];
    index /= axis.values.size();
  }
  return a;
}

}  // namespace

json point_config(const SweepSpec& spec, std::size_t index) {
  json cfg = spec.base;
  const auto a = assignment_of(spec, index);
  for (const auto& [path, v] : a.items()) cfg[json::json_pointer(path)] = v;
  return cfg;
}

double report_metric(const json& report, const std::string& metric) {
  const json* v = nullptr;
  if (report.contains(metric)) {
    v = &report.at(metric);
  } else if (report.contains("derived") && report.at("derived").contains(metric)) {
    v = &report.at("derived").at(metric);
  } else if (metric == "retired" || metric == "ipc") {
    if (report.contains("totals")) v = &report.at("totals").at(metric);
  } else if (!metric.empty() && metric[0] == '/') {
    const json::json_pointer ptr(metric);
    if (report.contains(ptr)) v = &report.at(ptr);
  }
  if (!v || !v->is_number()) return std::numeric_limits<double>::quiet_NaN();
  return v->get<double>();
}

SweepResult run_sweep(const SweepSpec& spec) {
  const std::size_t n = grid_size(spec);
  SweepResult res;
  res.points.resize(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      auto& p = res.points[i];
      p.index = i;
      p.assignment = assignment_of(spec, i);
      try {
        Validation v;
        const auto cfg = parse_config(point_config(spec, i), &v);
        const auto prog = load_program(cfg, spec.program);
        System sys(cfg, prog);
        sys.set_record_trace(false);
        const auto st = sys.run();
        p.status = run_status_name(st);
        p.error = sys.error_message();
        p.report = sys.report();
      } catch (const Error& e) {
        p.status = e.kind() == ErrorKind::InvalidConfig ? "invalid" : "error";
        p.error = e.what();
      } catch (const std::exception& e) {
        p.status = "error";
        p.error = e.what();
      }
    }
  };
  unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const auto& base = res.points[spec.baseline];
  for (auto& p : res.points) {
    if (base.status == "halted" && p.status == "halted") p.speedup = speedup(base.report, p.report);
  }
  res.order.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.order[i] = i;
  auto key = [&](std::size_t i) {
    const auto& p = res.points[i];
    const double m = p.report.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                        : spec.sort_by == "speedup" ? p.speedup : report_metric(p.report, spec.sort_by);
    return m;
  };
  std::stable_sort(res.order.begin(), res.order.end(), [&](std::size_t a, std::size_t b) {
    const double ka = key(a), kb = key(b);
    if (std::isnan(kb)) return !std::isnan(ka);
    if (std::isnan(ka)) return false;
    return ka < kb;
  });
  return res;
}

json SweepResult::to_json() const {
  json pts = json::array();
  for (const auto& p : points) {
    json j = {{"index", p.index}, {"assignment", p.assignment}, {"status", p.status}};
    if (!p.error.empty()) j["error"] = p.error;
    if (!p.report.is_null()) {
      j["cycles"] = p.report.at("cycles");
      j["retired"] = p.report.at("totals").at("retired");
      j["derived"] = p.report.at("derived");
      j["speedup"] = p.speedup;
    }
    pts.push_back(j);
  }
  return {{"schema", "rvdse-sweep/1"}, {"points", pts}, {"order", order}};
}

std::string SweepResult::to_csv(const SweepSpec& spec) const {
  std::ostringstream os;
  os << "index";
  for (const auto& a : spec.grid) os << ',' << a.path;
  os << ",status,cycles,retired,ipc,l1i_miss_rate,l1d_miss_rate,l2_miss_rate,speedup\n";
  auto num = [&](const json& r, const char* key) -> std::string {
    const double v = report_metric(r, key);
    if (std::isnan(v)) return "";
    std::ostringstream s;
    if (v == std::floor(v) && std::abs(v) < 1e15) {
      s << static_cast<long long>(v);
    } else {
      s.precision(6);
      s << v;
    }
    return s.str();
  };
  for (const auto i : order) {
    const auto& p = points[i];
    os << p.index;
    for (const auto& a : spec.grid) {
      const auto& v = p.assignment.at(a.path);
      os << ',' << (v.is_string() ? v.get<std::string>() : v.dump());
    }
    os << ',' << p.status;
    if (p.report.is_null()) {
      os << ",,,,,,,,\n";
      continue;
    }
    os << ',' << num(p.report, "cycles") << ',' << num(p.report, "retired") << ',' << num(p.report, "ipc") << ','
       << num(p.report, "l1i_miss_rate") << ',' << num(p.report, "l1d_miss_rate") << ','
       << num(p.report, "l2_miss_rate") << ',' << p.speedup << '\n';
  }
  return os.str();
}

}  // namespace rvdse::sys
