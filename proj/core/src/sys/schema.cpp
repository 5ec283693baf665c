#include "rvdse/sys/config.hpp"
#include "rvdse/sys/system.hpp"

namespace rvdse::sys {

namespace {

const char* kSchema = R"json({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "rvdse-system-config/1",
  "title": "System configuration",
  "type": "object",
  "additionalProperties": false,
  "properties": {
    "name": {"type": "string"},
    "seed": {"type": "integer", "minimum": 0, "default": 1},
    "max_cycles": {"type": "integer", "minimum": 1, "default": 50000000},
    "stats_interval": {"type": "integer", "minimum": 0, "default": 0,
                       "description": "cycles between interval snapshots; 0 disables them"},
    "cores": {
      "oneOf": [
        {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/core"}},
        {"type": "object", "additionalProperties": false, "required": ["count", "template"],
         "properties": {"count": {"type": "integer", "minimum": 1, "maximum": 64},
                        "template": {"$ref": "#/$defs/core"}}}
      ],
      "default": [{"variant": "single-cycle"}]
    },
    "memory": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "kind": {"enum": ["async", "sync", "offchip"], "default": "sync"},
        "size_bytes": {"type": "integer", "minimum": 4, "multipleOf": 4, "default": 65536},
        "latency": {"type": "integer", "minimum": 0,
                    "description": "async 0, sync 1, offchip >= 2 (default 10)"},
        "address_bits": {"type": "integer", "minimum": 2, "maximum": 32, "default": 32},
        "layout": {"enum": ["unified", "separate"], "default": "unified"}
      }
    },
    "caches": {
      "oneOf": [
        {"type": "null"},
        {"type": "object", "additionalProperties": false,
         "properties": {
           "l1": {"$ref": "#/$defs/cache"},
           "l1i": {"$ref": "#/$defs/cache"},
           "l1d": {"$ref": "#/$defs/cache"},
           "l2": {"$ref": "#/$defs/cache"},
           "per_core": {"type": "array", "items": {"type": "object", "additionalProperties": false,
                        "properties": {"l1i": {"$ref": "#/$defs/cache"}, "l1d": {"$ref": "#/$defs/cache"}}}}
         }}
      ]
    },
    "interconnect": {
      "oneOf": [
        {"enum": ["none", "shared-bus", "noc"]},
        {"type": "object", "additionalProperties": false,
         "properties": {"kind": {"enum": ["none", "shared-bus", "noc"]}, "noc": {"$ref": "#/$defs/noc"}}}
      ]
    },
    "program": {
      "oneOf": [
        {"type": "string", "description": "path to a .vmh image or .s source"},
        {"type": "object", "additionalProperties": false,
         "properties": {"benchmark": {"enum": ["factorial", "prime", "prime_parallel", "mandelbrot"]},
                        "path": {"type": "string"},
                        "params": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}}}}
      ]
    },
    "kernel": {
      "type": "object",
      "additionalProperties": false,
      "properties": {"stack_pointer": {"type": "integer", "minimum": 0, "default": 16380},
                     "stack_size": {"type": "integer", "minimum": 0, "default": 1024}}
    }
  },
  "$defs": {
    "core": {
      "type": "object",
      "additionalProperties": false,
      "required": ["variant"],
      "properties": {
        "variant": {"enum": ["single-cycle", "5-stall", "5-bypass", "7-bypass", "ooo"]},
        "ooo": {"type": "object", "additionalProperties": false,
                "properties": {"queue_length": {"type": "integer", "minimum": 1, "default": 8},
                               "alus": {"type": "integer", "minimum": 1, "default": 1},
                               "alu_latency": {"oneOf": [{"type": "integer", "minimum": 1},
                                                          {"type": "array", "items": {"type": "integer", "minimum": 1}}],
                                               "default": 1},
                               "pipelined_alus": {"type": "boolean", "default": true},
                               "commit_capacity": {"type": "integer", "minimum": 1, "default": 8}}}
      }
    },
    "cache": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "index_bits": {"type": "integer", "minimum": 0, "maximum": 20, "default": 6},
        "offset_bits": {"type": "integer", "minimum": 0, "maximum": 8, "default": 2},
        "ways": {"type": "integer", "minimum": 1, "maximum": 64, "default": 4},
        "policy": {"enum": ["lru", "random"], "default": "lru"},
        "hit_latency": {"type": "integer", "minimum": 1, "default": 1},
        "seed": {"type": "integer", "minimum": 0}
      }
    },
    "noc": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "topology": {"enum": ["mesh", "ring", "custom"], "default": "mesh"},
        "width": {"type": "integer", "minimum": 1, "default": 2},
        "height": {"type": "integer", "minimum": 1, "default": 2},
        "nodes": {"type": "integer", "minimum": 2, "default": 4},
        "neighbours": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
        "tables": {"type": "array", "items": {"type": "object", "additionalProperties": {"type": "integer"}}},
        "routing": {"enum": ["dor", "table"]},
        "cluster_node": {"type": "integer", "minimum": 0, "default": 0},
        "router": {"type": "object", "additionalProperties": false,
                   "properties": {"kind": {"enum": ["single-cycle", "pipelined"], "default": "single-cycle"},
                                  "vcs": {"type": "integer", "minimum": 1, "default": 2},
                                  "vc_depth": {"type": "integer", "minimum": 1, "default": 8},
                                  "pipeline_stages": {"type": "integer", "minimum": 1, "default": 4},
                                  "buffered": {"type": "boolean", "default": true}}}
      }
    }
  }
})json";

constexpr const char* kStatsSchema = R"json({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "rvdse-stats/1",
  "title": "rvdse statistics report",
  "type": "object",
  "required": ["schema", "config", "status", "cycles", "program", "cores", "totals", "derived", "memory", "caches", "noc", "host"],
  "properties": {
    "schema": {"const": "rvdse-stats/1"},
    "config": {"type": "object"},
    "status": {"enum": ["halted", "cycle-limit", "error"]},
    "message": {"type": "string"},
    "cycles": {"type": "integer", "minimum": 0},
    "program": {"type": "object",
                "required": ["name", "entry", "image_words"],
                "properties": {"results": {"type": "array", "items": {"type": "integer", "minimum": 0}}}},
    "cores": {"type": "array", "items": {"$ref": "#/$defs/core"}},
    "totals": {"type": "object", "required": ["retired", "ipc"],
               "properties": {"retired": {"type": "integer", "minimum": 0}, "ipc": {"type": "number", "minimum": 0}}},
    "derived": {"type": "object",
                "properties": {"ipc": {"type": "number"}, "l1i_miss_rate": {"type": "number"},
                               "l1d_miss_rate": {"type": "number"}, "l2_miss_rate": {"type": "number"}}},
    "memory": {"type": "object"},
    "caches": {"type": ["object", "null"]},
    "noc": {"type": ["object", "null"]},
    "intervals": {"type": "array", "items": {"type": "object", "required": ["cycle"]}},
    "host": {"type": "object", "required": ["wall_seconds"]}
  },
  "$defs": {
    "core": {
      "type": "object",
      "required": ["hart", "variant", "halted", "halt_reason", "a0", "stats"],
      "properties": {
        "stats": {"type": "object",
                  "required": ["cycles", "retired", "cpi", "ipc", "stalls", "inserted_nops", "loads", "stores"],
                  "properties": {"cycles": {"type": "integer", "minimum": 0},
                                 "retired": {"type": "integer", "minimum": 0}}}
      }
    }
  }
})json";

}  // namespace

const nlohmann::json& stats_schema() {
  static const nlohmann::json schema = nlohmann::json::parse(kStatsSchema);
  return schema;
}

const nlohmann::json& config_schema() {
  static const nlohmann::json schema = nlohmann::json::parse(kSchema);
  return schema;
}

}  // namespace rvdse::sys
