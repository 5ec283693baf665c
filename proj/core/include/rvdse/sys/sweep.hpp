#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rvdse/sys/config.hpp"

namespace rvdse::sys {

// Sweep document:
//   { "base": <config>, "grid": { "/json/pointer": [v1, v2, ...], ... },
//     "cap": 256, "threads": 0, "sort_by": "cycles", "baseline": 0,
//     "program": "optional path overriding base.program" }
// Grid axes are JSON pointers into the config; points are the Cartesian
// product in axis order (last axis fastest).
struct GridAxis {
  std::string path;
  std::vector<nlohmann::json> values;
};

struct SweepSpec {
  nlohmann::json base;
  std::vector<GridAxis> grid;
  std::size_t cap = 256;
  unsigned threads = 0;  // 0: hardware concurrency
  std::string sort_by = "cycles";
  std::size_t baseline = 0;  // point index speedups are relative to
  std::string program;       // optional override
};

// Throws InvalidConfig listing every problem (bad axis path, grid over the
// cap, invalid base config).
SweepSpec parse_sweep(const nlohmann::json& j);

std::size_t grid_size(const SweepSpec& spec);
// Config document for point i.
nlohmann::json point_config(const SweepSpec& spec, std::size_t index);

struct SweepPoint {
  std::size_t index = 0;
  nlohmann::json assignment;  // path -> value
  std::string status;         // halted | cycle-limit | error | invalid
  std::string error;
  nlohmann::json report;      // empty for invalid points
  double speedup = 0;         // vs the baseline point, 0 when unknown
};

struct SweepResult {
  std::vector<SweepPoint> points;  // in grid order
  std::vector<std::size_t> order;  // points sorted by spec.sort_by
  nlohmann::json to_json() const;
  std::string to_csv(const SweepSpec& spec) const;
};

// Runs every point, `threads` at a time. A failing point is recorded and the
// sweep continues.
SweepResult run_sweep(const SweepSpec& spec);

// Numeric metric from a report: "cycles", "retired", "ipc", any key of
// "derived", or a JSON pointer. NaN when absent.
double report_metric(const nlohmann::json& report, const std::string& metric);

}  // namespace rvdse::sys
