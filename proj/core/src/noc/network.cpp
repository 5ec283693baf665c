#include "rvdse/noc/network.hpp"

#include <algorithm>

#include "rvdse/error.hpp"

namespace rvdse::noc {

const char* router_kind_name(RouterKind k) { return k == RouterKind::SingleCycle ? "single-cycle" : "pipelined"; }

RouterKind router_kind_from_name(const std::string& s) {
  if (s == "single-cycle") return RouterKind::SingleCycle;
  if (s == "pipelined") return RouterKind::Pipelined;
  throw Error(ErrorKind::InvalidConfig, "unknown router kind '" + s + "'");
}

void validate_router_params(const RouterParams& p) {
  if (p.vcs < 1) throw Error(ErrorKind::InvalidConfig, "routers need at least one virtual channel");
  if (p.buffered && p.vc_depth < 1) throw Error(ErrorKind::InvalidConfig, "VC depth must be >= 1");
  if (p.kind == RouterKind::Pipelined && p.pipeline_stages < 1) {
    throw Error(ErrorKind::InvalidConfig, "pipelined routers need at least one stage");
  }
}

Network::Network(const Topology& topo, const RouterParams& params) : topo_(topo), params_(params) {
  validate_router_params(params_);
  const unsigned n = topo_.nodes();
  const unsigned V = params_.vcs;
  for (unsigned u = 0; u < n; ++u) max_ports_ = std::max(max_ports_, topo_.ports(u));
  upstream_.assign(static_cast<std::size_t>(n) * max_ports_, std::nullopt);
  routers_.resize(n);
  nis_.resize(n);
  delivered_.resize(n);
  for (unsigned u = 0; u < n; ++u) {
    const unsigned P = topo_.ports(u);
    auto& r = routers_[u];
    r.in.assign(P, std::vector<InputVc>(V));
    r.out.assign(P, std::vector<OutputVc>(V));
    for (unsigned o = 1; o < P; ++o) {
      for (auto& ovc : r.out[o]) ovc.credits = params_.depth();
    }
    r.va_arb.assign(P, RoundRobinArbiter(P * V));
    r.sa_in.assign(P, RoundRobinArbiter(V));
    r.sa_out.assign(P, RoundRobinArbiter(P));
    r.stats.port_flits.assign(P, 0);
    nis_[u].credits.assign(V, params_.depth());
    nis_[u].vc_arb = RoundRobinArbiter(V);
    for (unsigned p = 1; p < P; ++p) {
      if (const auto& l = topo_.out[u][p]) upstream_[l->node * max_ports_ + l->port] = Link{u, p};
    }
  }
}

std::uint64_t Network::send(unsigned src, unsigned dst, std::vector<std::uint32_t> payload, std::uint64_t now,
                            std::uint32_t tag) {
  if (src >= nodes() || dst >= nodes()) {
    throw Error(ErrorKind::UnreachableDestination,
                "packet " + std::to_string(src) + "->" + std::to_string(dst) + " names a missing node");
  }
  if (payload.empty()) payload.push_back(0);
  const std::uint64_t id = next_packet_++;
  const unsigned len = static_cast<unsigned>(payload.size());
  for (unsigned i = 0; i < len; ++i) {
    Flit f;
    f.kind = len == 1 ? FlitKind::Single : i == 0 ? FlitKind::Head : i + 1 == len ? FlitKind::Tail : FlitKind::Body;
    f.src = src;
    f.dst = dst;
    f.payload = payload[i];
    f.packet = id;
    f.seq = i;
    f.length = len;
    f.tag = tag;
    nis_[src].queue.push_back(f);
  }
  Packet p;
  p.id = id;
  p.src = src;
  p.dst = dst;
  p.tag = tag;
  p.payload = std::move(payload);
  p.queued_cycle = now;
  in_flight_.emplace(id, std::move(p));
  return id;
}

std::optional<Packet> Network::receive(unsigned node) {
  auto& q = delivered_[node];
  if (q.empty()) return std::nullopt;
  Packet p = std::move(q.front());
  q.pop_front();
  return p;
}

bool Network::idle() const {
  if (!pending_.empty() || buffered_ != 0) return false;
  for (const auto& ni : nis_) {
    if (!ni.queue.empty() || ni.rx) return false;
  }
  return true;
}

void Network::integrity(unsigned node, const std::string& what) {
  ++integrity_errors_;
  if (integrity_log_.size() < 32) integrity_log_.push_back("node " + std::to_string(node) + ": " + what);
}

void Network::inject(unsigned node, std::uint64_t now) {
  auto& ni = nis_[node];
  if (ni.queue.empty()) return;
  Flit& f = ni.queue.front();
  if (!ni.vc) {
    const auto v = ni.vc_arb.pick([&](unsigned k) { return ni.credits[k] > 0; });
    if (!v) return;
    ni.vc = *v;
  }
  const unsigned v = *ni.vc;
  if (ni.credits[v] == 0) return;
  if (f.kind == FlitKind::Head || f.kind == FlitKind::Single) {
    for (auto& g : ni.queue) {
      if (g.packet != f.packet) break;
      g.inject_cycle = now;
    }
  }
  f.vc = v;
  routers_[node].in[kLocal][v].buf.push_back({f, now});
  --ni.credits[v];
  ++flits_injected_;
  ++buffered_;
  if (f.kind == FlitKind::Tail || f.kind == FlitKind::Single) ni.vc.reset();
  ni.queue.pop_front();
}

void Network::route(unsigned node, std::uint64_t now, std::vector<Delivery>& next) {
  auto& r = routers_[node];
  const unsigned P = topo_.ports(node);
  const unsigned V = params_.vcs;
  const std::uint64_t delay = params_.per_hop_latency() - 1;

  // route compute
  for (unsigned p = 0; p < P; ++p) {
    for (auto& ivc : r.in[p]) {
      if (ivc.buf.empty() || ivc.out_port || ivc.buf.front().arrival > now) continue;
      const auto& f = ivc.buf.front().f;
      if (f.kind != FlitKind::Head && f.kind != FlitKind::Single) {
        integrity(node, "body flit at the front of an unrouted VC");
        continue;
      }
      const unsigned o = route_compute(topo_, node, f.dst);
      if (o >= P || (o != kLocal && !topo_.out[node][o])) {
        throw Error(ErrorKind::UnreachableDestination,
                    "router " + std::to_string(node) + " routes to missing port " + std::to_string(o));
      }
      ivc.out_port = o;
    }
  }

  // VC allocation
  for (unsigned o = 0; o < P; ++o) {
    const unsigned usable = o == kLocal ? 1 : V;
    std::vector<bool> granted(P * V, false);
    for (;;) {
      unsigned free_vc = usable;
      for (unsigned k = 0; k < usable; ++k) {
        if (!r.out[o][k].owned) {
          free_vc = k;
          break;
        }
      }
      if (free_vc == usable) break;
      const auto g = r.va_arb[o].pick([&](unsigned idx) {
        const auto& ivc = r.in[idx / V][idx % V];
        return !granted[idx] && ivc.out_port == o && !ivc.out_vc && !ivc.buf.empty() &&
               ivc.buf.front().arrival <= now;
      });
      if (!g) break;
      granted[*g] = true;
      r.in[*g / V][*g % V].out_vc = free_vc;
      r.out[o][free_vc].owned = true;
    }
  }

  // switch allocation: one VC per input, then one input per output
  std::vector<std::optional<unsigned>> choice(P);
  for (unsigned p = 0; p < P; ++p) {
    choice[p] = r.sa_in[p].pick([&](unsigned v) {
      const auto& ivc = r.in[p][v];
      if (ivc.buf.empty() || !ivc.out_vc || ivc.buf.front().arrival + delay > now) return false;
      return *ivc.out_port == kLocal || r.out[*ivc.out_port][*ivc.out_vc].credits > 0;
    });
  }
  for (unsigned o = 0; o < P; ++o) {
    const auto w = r.sa_out[o].pick([&](unsigned p) { return choice[p] && r.in[p][*choice[p]].out_port == o; });
    if (!w) continue;
    const unsigned p = *w;
    const unsigned v = *choice[p];
    auto& ivc = r.in[p][v];
    Flit f = ivc.buf.front().f;
    ivc.buf.pop_front();
    --buffered_;
    const unsigned ovc = *ivc.out_vc;
    f.vc = ovc;
    if (p == kLocal) {
      next.push_back({Delivery::Kind::NiCredit, node, kLocal, v, {}});
    } else {
      const auto& up = upstream_[node * max_ports_ + p];
      next.push_back({Delivery::Kind::Credit, up->node, up->port, v, {}});
    }
    if (o == kLocal) {
      next.push_back({Delivery::Kind::Eject, node, kLocal, 0, f});
    } else {
      const auto& l = *topo_.out[node][o];
      --r.out[o][ovc].credits;
      next.push_back({Delivery::Kind::Flit, l.node, l.port, ovc, f});
    }
    ++r.stats.flits_forwarded;
    ++r.stats.port_flits[o];
    if (log_on_) events_.push_back({now, node, p, v, o, ovc, f.packet, f.seq});
    if (f.kind == FlitKind::Tail || f.kind == FlitKind::Single) {
      r.out[o][ovc].owned = false;
      ivc.out_port.reset();
      ivc.out_vc.reset();
    }
  }
}

void Network::eject(unsigned node, const Flit& f, std::uint64_t now) {
  auto& ni = nis_[node];
  ++flits_ejected_;
  if (f.dst != node) integrity(node, "flit for node " + std::to_string(f.dst) + " ejected here");
  auto it = in_flight_.find(f.packet);
  if (it == in_flight_.end()) {
    integrity(node, "flit of unknown packet");
    return;
  }
  if (f.kind == FlitKind::Head || f.kind == FlitKind::Single) {
    if (ni.rx) integrity(node, "packet interleaved with " + std::to_string(ni.rx->id));
    ni.rx = it->second;
    ni.rx_next = 0;
  } else if (!ni.rx || ni.rx->id != f.packet) {
    integrity(node, "body flit outside its packet");
    return;
  }
  if (f.seq != ni.rx_next) integrity(node, "flit out of order");
  ++ni.rx_next;
  if (f.seq >= it->second.payload.size() || it->second.payload[f.seq] != f.payload) {
    integrity(node, "payload corrupted");
  }
  if (f.kind == FlitKind::Tail || f.kind == FlitKind::Single) {
    if (ni.rx_next != f.length) integrity(node, "packet lost flits");
    Packet p = std::move(it->second);
    in_flight_.erase(it);
    p.inject_cycle = f.inject_cycle;
    p.eject_cycle = now;
    ++latency_hist_[p.latency()];
    ++packets_delivered_;
    delivered_[node].push_back(std::move(p));
    ni.rx.reset();
  }
}

void Network::tick(std::uint64_t now) {
  std::vector<Delivery> arriving;
  arriving.swap(pending_);
  for (const auto& d : arriving) {
    switch (d.kind) {
      case Delivery::Kind::Flit:
        routers_[d.node].in[d.port][d.vc].buf.push_back({d.f, now});
        ++buffered_;
        break;
      case Delivery::Kind::Credit:
        ++routers_[d.node].out[d.port][d.vc].credits;
        break;
      case Delivery::Kind::NiCredit:
        ++nis_[d.node].credits[d.vc];
        break;
      case Delivery::Kind::Eject:
        eject(d.node, d.f, now);
        break;
    }
  }
  for (unsigned u = 0; u < nodes(); ++u) inject(u, now);
  for (unsigned u = 0; u < nodes(); ++u) route(u, now, pending_);
  for (unsigned u = 0; u < nodes(); ++u) {
    auto& r = routers_[u];
    std::size_t k = 0;
    for (const auto& port : r.in) {
      for (const auto& ivc : port) k += ivc.buf.size();
    }
    if (r.stats.occupancy_histogram.size() <= k) r.stats.occupancy_histogram.resize(k + 1, 0);
    ++r.stats.occupancy_histogram[k];
  }
}

nlohmann::json Network::stats_json() const {
  nlohmann::json routers = nlohmann::json::array();
  for (unsigned u = 0; u < nodes(); ++u) {
    const auto& s = routers_[u].stats;
    routers.push_back({{"node", u},
                       {"flits_forwarded", s.flits_forwarded},
                       {"port_flits", s.port_flits},
                       {"occupancy_histogram", s.occupancy_histogram}});
  }
  nlohmann::json hist = nlohmann::json::object();
  double sum = 0;
  std::uint64_t count = 0;
  for (const auto& [lat, n] : latency_hist_) {
    hist[std::to_string(lat)] = n;
    sum += static_cast<double>(lat) * static_cast<double>(n);
    count += n;
  }
  return {{"flits_injected", flits_injected_},
          {"flits_ejected", flits_ejected_},
          {"packets_delivered", packets_delivered_},
          {"integrity_errors", integrity_errors_},
          {"mean_packet_latency", count ? sum / static_cast<double>(count) : 0.0},
          {"packet_latency_histogram", hist},
          {"routers", routers}};
}

}  // namespace rvdse::noc
