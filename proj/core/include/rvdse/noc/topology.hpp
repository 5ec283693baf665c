#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rvdse::noc {

enum class TopologyKind { Mesh, Ring, Custom };
enum class RoutingMode { DOR, Table };

const char* topology_name(TopologyKind k);
TopologyKind topology_from_name(const std::string& s);  // throws InvalidConfig
const char* routing_name(RoutingMode m);
RoutingMode routing_from_name(const std::string& s);

// Port 0 is always the local (inject/eject) port.
inline constexpr unsigned kLocal = 0;
// Mesh ports. North is +y; node id = y * width + x.
inline constexpr unsigned kEast = 1, kWest = 2, kNorth = 3, kSouth = 4;
// Ring ports. Clockwise goes to node + 1.
inline constexpr unsigned kCw = 1, kCcw = 2;

using RoutingTable = std::map<unsigned, unsigned>;  // destination -> output port

struct TopologyConfig {
  TopologyKind kind = TopologyKind::Mesh;
  unsigned width = 2, height = 2;  // mesh
  unsigned nodes = 4;              // ring
  // custom: neighbours[n] lists the nodes reached through ports 1, 2, ...
  std::vector<std::vector<unsigned>> neighbours;
  std::vector<RoutingTable> tables;  // custom only; generated when empty
  RoutingMode routing = RoutingMode::DOR;
};

struct Link {
  unsigned node = 0;  // downstream router
  unsigned port = 0;  // its input port
};

struct Topology {
  TopologyKind kind = TopologyKind::Mesh;
  RoutingMode routing = RoutingMode::DOR;
  unsigned width = 0, height = 0;
  std::vector<std::vector<std::optional<Link>>> out;  // [node][port]
  std::vector<RoutingTable> tables;

  unsigned nodes() const { return static_cast<unsigned>(out.size()); }
  unsigned ports(unsigned node) const { return static_cast<unsigned>(out[node].size()); }
  unsigned link_count() const;  // bidirectional links
  unsigned hops(unsigned src, unsigned dst) const;  // routers traversed, both ends included
};

// Throws InvalidTopology for DOR off a mesh, a disconnected or malformed
// graph, or tables that do not deliver every destination.
Topology build_topology(const TopologyConfig& cfg);

// Shortest-path tables; among equally short next hops the lowest port wins
// (clockwise on a ring, X before Y on a mesh).
std::vector<RoutingTable> shortest_path_tables(const Topology& t);

// Walks every (src, dst) pair through the tables. Throws InvalidTopology.
void validate_tables(const Topology& t);

// Output port at `node` for a packet to `dst`. Throws UnreachableDestination
// on a table miss.
unsigned route_compute(const Topology& t, unsigned node, unsigned dst);

// Pure dimension-order step on a width x height mesh.
unsigned dor_route(unsigned width, unsigned node, unsigned dst);

}  // namespace rvdse::noc
