#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rvdse/arbiter.hpp"
#include "rvdse/noc/topology.hpp"

namespace rvdse::noc {

enum class RouterKind { SingleCycle, Pipelined };
const char* router_kind_name(RouterKind k);
RouterKind router_kind_from_name(const std::string& s);

struct RouterParams {
  unsigned vcs = 2;
  unsigned vc_depth = 8;  // flits
  RouterKind kind = RouterKind::SingleCycle;
  unsigned pipeline_stages = 4;
  bool buffered = true;  // buffer-less: one flit per VC, held until credited

  unsigned per_hop_latency() const { return kind == RouterKind::SingleCycle ? 1 : pipeline_stages; }
  unsigned depth() const { return buffered ? vc_depth : 1; }
};

// Throws InvalidConfig.
void validate_router_params(const RouterParams& p);

enum class FlitKind : std::uint8_t { Head, Body, Tail, Single };

struct Flit {
  FlitKind kind = FlitKind::Single;
  unsigned src = 0;
  unsigned dst = 0;
  unsigned vc = 0;
  std::uint32_t payload = 0;
  std::uint64_t packet = 0;
  std::uint64_t inject_cycle = 0;  // of the head
  unsigned seq = 0;
  unsigned length = 1;
  std::uint32_t tag = 0;
};

struct Packet {
  std::uint64_t id = 0;
  unsigned src = 0;
  unsigned dst = 0;
  std::uint32_t tag = 0;  // side-band type bits carried by the head
  std::vector<std::uint32_t> payload;  // one word per flit
  std::uint64_t queued_cycle = 0;
  std::uint64_t inject_cycle = 0;  // head entered the source router
  std::uint64_t eject_cycle = 0;   // tail left the destination router

  std::uint64_t latency() const { return eject_cycle - inject_cycle; }
};

struct NocEvent {
  std::uint64_t cycle;
  unsigned router;
  unsigned in_port, in_vc;
  unsigned out_port, out_vc;
  std::uint64_t packet;
  unsigned seq;
  bool operator==(const NocEvent&) const = default;
};

struct RouterStats {
  std::uint64_t flits_forwarded = 0;
  std::vector<std::uint64_t> port_flits;         // per output port
  std::vector<std::uint64_t> occupancy_histogram;  // cycles with k buffered flits
};

class Network {
 public:
  Network(const Topology& topo, const RouterParams& params);

  const Topology& topology() const { return topo_; }
  const RouterParams& params() const { return params_; }
  unsigned nodes() const { return topo_.nodes(); }

  // Queues a packet of max(1, payload.size()) flits at src's interface.
  std::uint64_t send(unsigned src, unsigned dst, std::vector<std::uint32_t> payload, std::uint64_t now,
                     std::uint32_t tag = 0);
  std::optional<Packet> receive(unsigned node);
  bool has_delivery(unsigned node) const { return !delivered_[node].empty(); }

  void tick(std::uint64_t now);
  bool idle() const;

  std::uint64_t flits_injected() const { return flits_injected_; }
  std::uint64_t flits_ejected() const { return flits_ejected_; }
  std::uint64_t packets_delivered() const { return packets_delivered_; }
  std::uint64_t integrity_errors() const { return integrity_errors_; }
  const std::vector<std::string>& integrity_log() const { return integrity_log_; }
  const std::map<std::uint64_t, std::uint64_t>& latency_histogram() const { return latency_hist_; }
  const RouterStats& router_stats(unsigned node) const { return routers_[node].stats; }

  void set_event_log(bool on) { log_on_ = on; }
  const std::vector<NocEvent>& event_log() const { return events_; }

  nlohmann::json stats_json() const;

 private:
  struct Buffered {
    Flit f;
    std::uint64_t arrival;
  };
  struct InputVc {
    std::deque<Buffered> buf;
    std::optional<unsigned> out_port;
    std::optional<unsigned> out_vc;
  };
  struct OutputVc {
    unsigned credits = 0;
    bool owned = false;
  };
  struct Router {
    std::vector<std::vector<InputVc>> in;    // [port][vc]
    std::vector<std::vector<OutputVc>> out;  // [port][vc]; port 0 ejects through vc 0
    std::vector<RoundRobinArbiter> va_arb;   // per output port, over port*vcs+vc
    std::vector<RoundRobinArbiter> sa_in;    // per input port, over vcs
    std::vector<RoundRobinArbiter> sa_out;   // per output port, over input ports
    RouterStats stats;
  };
  struct Interface {
    std::deque<Flit> queue;  // flits not yet injected
    std::vector<unsigned> credits;  // toward router input port 0
    std::optional<unsigned> vc;     // VC of the packet being injected
    RoundRobinArbiter vc_arb{1};
    // reassembly
    std::optional<Packet> rx;
    unsigned rx_next = 0;
  };
  struct Delivery {
    enum class Kind { Flit, Credit, Eject, NiCredit } kind;
    unsigned node, port, vc;
    Flit f;
  };

  void inject(unsigned node, std::uint64_t now);
  void route(unsigned node, std::uint64_t now, std::vector<Delivery>& next);
  void eject(unsigned node, const Flit& f, std::uint64_t now);
  void integrity(unsigned node, const std::string& what);

  Topology topo_;
  RouterParams params_;
  std::vector<Router> routers_;
  std::vector<Interface> nis_;
  std::vector<std::optional<Link>> upstream_;  // [node * maxports + port] -> sending router/port
  unsigned max_ports_ = 0;
  std::vector<Delivery> pending_;
  std::vector<std::deque<Packet>> delivered_;
  std::map<std::uint64_t, Packet> in_flight_;  // by id, for payload reassembly
  std::uint64_t next_packet_ = 1;
  std::uint64_t flits_injected_ = 0;
  std::uint64_t flits_ejected_ = 0;
  std::uint64_t packets_delivered_ = 0;
  std::uint64_t integrity_errors_ = 0;
  std::vector<std::string> integrity_log_;
  std::map<std::uint64_t, std::uint64_t> latency_hist_;
  std::uint64_t buffered_ = 0;
  bool log_on_ = false;
  std::vector<NocEvent> events_;
};

}  // namespace rvdse::noc
