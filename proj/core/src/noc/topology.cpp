#include "rvdse/noc/topology.hpp"

#include <deque>
#include <set>

#include "rvdse/error.hpp"

namespace rvdse::noc {

const char* topology_name(TopologyKind k) {
  switch (k) {
    case TopologyKind::Mesh: return "mesh";
    case TopologyKind::Ring: return "ring";
    case TopologyKind::Custom: return "custom";
  }
  return "mesh";
}

TopologyKind topology_from_name(const std::string& s) {
  if (s == "mesh") return TopologyKind::Mesh;
  if (s == "ring") return TopologyKind::Ring;
  if (s == "custom") return TopologyKind::Custom;
  throw Error(ErrorKind::InvalidConfig, "unknown topology '" + s + "'");
}

const char* routing_name(RoutingMode m) { return m == RoutingMode::DOR ? "dor" : "table"; }

RoutingMode routing_from_name(const std::string& s) {
  if (s == "dor") return RoutingMode::DOR;
  if (s == "table") return RoutingMode::Table;
  throw Error(ErrorKind::InvalidConfig, "unknown routing '" + s + "'");
}

unsigned Topology::link_count() const {
  unsigned n = 0;
  for (const auto& ports : out) {
    for (const auto& l : ports) n += l.has_value();
  }
  return n / 2;
}

namespace {

std::vector<unsigned> bfs_from(const Topology& t, unsigned dst) {
  // distances to dst along forward links
  const unsigned n = t.nodes();
  std::vector<std::vector<unsigned>> rev(n);
  for (unsigned u = 0; u < n; ++u) {
    for (const auto& l : t.out[u]) {
      if (l) rev[l->node].push_back(u);
    }
  }
  std::vector<unsigned> dist(n, ~0u);
  std::deque<unsigned> q{dst};
  dist[dst] = 0;
  while (!q.empty()) {
    const unsigned v = q.front();
    q.pop_front();
    for (unsigned u : rev[v]) {
      if (dist[u] == ~0u) {
        dist[u] = dist[v] + 1;
        q.push_back(u);
      }
    }
  }
  return dist;
}

}  // namespace

std::vector<RoutingTable> shortest_path_tables(const Topology& t) {
  const unsigned n = t.nodes();
  std::vector<RoutingTable> tables(n);
  for (unsigned d = 0; d < n; ++d) {
    const auto dist = bfs_from(t, d);
    for (unsigned u = 0; u < n; ++u) {
      if (u == d) {
        tables[u][d] = kLocal;
        continue;
      }
      if (dist[u] == ~0u) continue;
      for (unsigned p = 1; p < t.ports(u); ++p) {
        const auto& l = t.out[u][p];
        if (l && dist[l->node] + 1 == dist[u]) {
          tables[u][d] = p;
          break;
        }
      }
    }
  }
  return tables;
}

unsigned dor_route(unsigned width, unsigned node, unsigned dst) {
  const unsigned x = node % width, y = node / width;
  const unsigned dx = dst % width, dy = dst / width;
  if (dx > x) return kEast;
  if (dx < x) return kWest;
  if (dy > y) return kNorth;
  if (dy < y) return kSouth;
  return kLocal;
}

unsigned route_compute(const Topology& t, unsigned node, unsigned dst) {
  if (dst >= t.nodes()) {
    throw Error(ErrorKind::UnreachableDestination, "node " + std::to_string(dst) + " does not exist");
  }
  if (t.routing == RoutingMode::DOR) return dor_route(t.width, node, dst);
  const auto& tab = t.tables[node];
  const auto it = tab.find(dst);
  if (it == tab.end()) {
    throw Error(ErrorKind::UnreachableDestination,
                "router " + std::to_string(node) + " has no route to " + std::to_string(dst));
  }
  return it->second;
}

unsigned Topology::hops(unsigned src, unsigned dst) const {
  unsigned h = 1;
  unsigned at = src;
  while (at != dst) {
    const auto p = route_compute(*this, at, dst);
    at = out[at][p]->node;
    ++h;
  }
  return h;
}

void validate_tables(const Topology& t) {
  const unsigned n = t.nodes();
  for (unsigned s = 0; s < n; ++s) {
    for (unsigned d = 0; d < n; ++d) {
      unsigned at = s;
      for (unsigned step = 0;; ++step) {
        if (step > n) {
          throw Error(ErrorKind::InvalidTopology,
                      "routing loop from " + std::to_string(s) + " to " + std::to_string(d));
        }
        unsigned p;
        try {
          p = route_compute(t, at, d);
        } catch (const Error&) {
          throw Error(ErrorKind::InvalidTopology,
                      "router " + std::to_string(at) + " cannot reach " + std::to_string(d));
        }
        if (p == kLocal) {
          if (at != d) throw Error(ErrorKind::InvalidTopology, "packet for " + std::to_string(d) + " ejected early");
          break;
        }
        if (p >= t.ports(at) || !t.out[at][p]) {
          throw Error(ErrorKind::InvalidTopology,
                      "router " + std::to_string(at) + " routes through unconnected port " + std::to_string(p));
        }
        at = t.out[at][p]->node;
      }
    }
  }
}

Topology build_topology(const TopologyConfig& cfg) {
  Topology t;
  t.kind = cfg.kind;
  t.routing = cfg.routing;
  if (cfg.routing == RoutingMode::DOR && cfg.kind != TopologyKind::Mesh) {
    throw Error(ErrorKind::InvalidTopology, "dimension-order routing needs a mesh");
  }
  switch (cfg.kind) {
    case TopologyKind::Mesh: {
      if (cfg.width < 1 || cfg.height < 1) throw Error(ErrorKind::InvalidTopology, "mesh needs width, height >= 1");
      t.width = cfg.width;
      t.height = cfg.height;
      const unsigned n = cfg.width * cfg.height;
      t.out.assign(n, std::vector<std::optional<Link>>(5));
      for (unsigned id = 0; id < n; ++id) {
        const unsigned x = id % cfg.width, y = id / cfg.width;
        if (x + 1 < cfg.width) t.out[id][kEast] = Link{id + 1, kWest};
        if (x > 0) t.out[id][kWest] = Link{id - 1, kEast};
        if (y + 1 < cfg.height) t.out[id][kNorth] = Link{id + cfg.width, kSouth};
        if (y > 0) t.out[id][kSouth] = Link{id - cfg.width, kNorth};
      }
      break;
    }
    case TopologyKind::Ring: {
      if (cfg.nodes < 2) throw Error(ErrorKind::InvalidTopology, "ring needs at least 2 nodes");
      const unsigned n = cfg.nodes;
      t.width = n;
      t.height = 1;
      t.out.assign(n, std::vector<std::optional<Link>>(3));
      for (unsigned id = 0; id < n; ++id) {
        t.out[id][kCw] = Link{(id + 1) % n, kCcw};
        t.out[id][kCcw] = Link{(id + n - 1) % n, kCw};
      }
      break;
    }
    case TopologyKind::Custom: {
      const unsigned n = static_cast<unsigned>(cfg.neighbours.size());
      if (n < 1) throw Error(ErrorKind::InvalidTopology, "custom topology has no nodes");
      t.width = n;
      t.height = 1;
      t.out.resize(n);
      for (unsigned id = 0; id < n; ++id) {
        t.out[id].resize(cfg.neighbours[id].size() + 1);
        for (unsigned k = 0; k < cfg.neighbours[id].size(); ++k) {
          const unsigned v = cfg.neighbours[id][k];
          if (v >= n || v == id) throw Error(ErrorKind::InvalidTopology, "bad neighbour of node " + std::to_string(id));
          // input port at v: position of id in v's list
          const auto& back = cfg.neighbours[v];
          unsigned in = 0;
          for (unsigned j = 0; j < back.size(); ++j) {
            if (back[j] == id) in = j + 1;
          }
          if (!in) {
            throw Error(ErrorKind::InvalidTopology,
                        "link " + std::to_string(id) + "->" + std::to_string(v) + " has no reverse link");
          }
          t.out[id][k + 1] = Link{v, in};
        }
      }
      break;
    }
  }
  for (unsigned d = 0; d < t.nodes(); ++d) {
    const auto dist = bfs_from(t, d);
    for (unsigned u = 0; u < t.nodes(); ++u) {
      if (dist[u] == ~0u) throw Error(ErrorKind::InvalidTopology, "topology is disconnected");
    }
  }
  if (cfg.kind == TopologyKind::Custom && !cfg.tables.empty()) {
    if (cfg.tables.size() != t.nodes()) throw Error(ErrorKind::InvalidTopology, "one routing table per node required");
    t.tables = cfg.tables;
  } else {
    t.tables = shortest_path_tables(t);
  }
  validate_tables(t);
  return t;
}

}  // namespace rvdse::noc
