#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ndg/demand.hpp"
#include "ndg/game.hpp"
#include "ndg/network.hpp"
#include "ndg/operator.hpp"
#include "ndg/scenario.hpp"

namespace fx {

using namespace ndg;

struct NetBuilder {
  std::vector<Node> nodes;
  std::vector<EdgeSpec> edges;

  NetBuilder& alt_node(const std::string& id, int region) {
    nodes.push_back({id, region, Layer::ALT});
    return *this;
  }
  NetBuilder& pt_node(const std::string& id, int region) {
    nodes.push_back({id, region, Layer::PT});
    return *this;
  }
  NetBuilder& alt(const std::string& id, const std::string& t, const std::string& h, double len,
                  double cap = 1000.0, double tt = -1.0) {
    EdgeSpec e;
    e.id = id;
    e.tail = t;
    e.head = h;
    e.kind = EdgeKind::ALT;
    e.length_km = len;
    e.existing_capacity = cap;
    e.travel_time_h = tt < 0.0 ? len / 60.0 : tt;
    edges.push_back(e);
    return *this;
  }
  /// ALT edges in both directions, ids id+"f" and id+"b".
  NetBuilder& alt2(const std::string& id, const std::string& a, const std::string& b, double len,
                   double cap = 1000.0) {
    alt(id + "f", a, b, len, cap);
    return alt(id + "b", b, a, len, cap);
  }
  NetBuilder& pt(const std::string& id, const std::string& t, const std::string& h, double len,
                 bool available = false, double cap = 0.0,
                 std::optional<std::vector<std::string>> subs = std::nullopt) {
    EdgeSpec e;
    e.id = id;
    e.tail = t;
    e.head = h;
    e.kind = EdgeKind::PT;
    e.length_km = len;
    e.existing_available = available;
    e.existing_capacity = cap;
    e.substitutes = std::move(subs);
    edges.push_back(e);
    return *this;
  }
  /// Transfers in both directions between an ALT node and a PT node.
  NetBuilder& transfer(const std::string& a, const std::string& p) {
    for (int dir = 0; dir < 2; ++dir) {
      EdgeSpec e;
      e.id = "t_" + (dir ? p + "_" + a : a + "_" + p);
      e.tail = dir ? p : a;
      e.head = dir ? a : p;
      e.kind = EdgeKind::Transfer;
      edges.push_back(e);
    }
    return *this;
  }
  MobilityNetwork build() const { return MobilityNetwork(nodes, edges); }
};

inline TravelRequest request(const MobilityNetwork& net, const std::string& id,
                             const std::string& o, const std::string& d, double trips) {
  TravelRequest r;
  r.id = id;
  r.origin = net.node_index(o);
  r.destination = net.node_index(d);
  r.trips = trips;
  return r;
}

/// Owns the pieces a GameContext points into.
struct Instance {
  std::shared_ptr<MobilityNetwork> net;
  DemandTable demand;
  std::vector<RoutePair> routes;
  std::vector<OperatorConfig> ops;
  EconomicParams econ;
  DesignParams design;

  GameContext context() const { return GameContext(*net, routes, demand, ops, econ, design); }
  NetworkState start() const { return NetworkState::from_network(*net); }

  Scenario scenario(std::size_t years, std::vector<std::vector<double>> betas) const {
    Scenario s;
    s.name = "fixture";
    s.network = net;
    s.demand = demand;
    s.operators = ops;
    s.years = years;
    s.beta_schedule = std::move(betas);
    s.econ = econ;
    s.design = design;
    s.system_optimal = false;
    return s;
  }
};

inline OperatorConfig make_operator(const MobilityNetwork& net, const std::string& id, int region,
                                    double budget, Weights w = {}) {
  OperatorConfig op;
  op.id = id;
  op.region = region;
  op.budget = budget;
  op.weights = w;
  op.controllable = region_pt_edges(net, region);
  return op;
}

/// Region 1 is a line A0..Ak with one forward candidate PT edge per hop whose
/// only substitute is the parallel forward ALT edge, so payoffs separate by
/// edge once the build set is fixed. Region 2 is a two-node stub.
inline Instance random_line(std::mt19937_64& rng, std::size_t k, std::size_t requests) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  NetBuilder b;
  for (std::size_t i = 0; i <= k; ++i) {
    b.alt_node("A" + std::to_string(i), 1).pt_node("P" + std::to_string(i), 1);
  }
  b.alt_node("B0", 2).alt_node("B1", 2);
  for (std::size_t i = 0; i < k; ++i) {
    const auto s = std::to_string(i);
    const auto n = std::to_string(i + 1);
    const double alt_len = uni(1.0, 6.0);
    b.alt2("a" + s, "A" + s, "A" + n, alt_len);
    b.pt("p" + s, "P" + s, "P" + n, alt_len * uni(0.6, 1.2), false, 0.0,
         std::vector<std::string>{"a" + s + "f"});
  }
  for (std::size_t i = 0; i <= k; ++i)
    b.transfer("A" + std::to_string(i), "P" + std::to_string(i));
  b.alt2("b", "B0", "B1", 2.0).alt2("x", "A0", "B0", 3.0);

  Instance inst;
  inst.net = std::make_shared<MobilityNetwork>(b.build());
  const auto& net = *inst.net;
  std::vector<TravelRequest> reqs;
  for (std::size_t r = 0; r < requests; ++r) {
    std::size_t o = static_cast<std::size_t>(u(rng) * static_cast<double>(k));
    std::size_t d = o + 1 + static_cast<std::size_t>(u(rng) * static_cast<double>(k - o));
    d = std::min(d, k);
    reqs.push_back(request(net, "r" + std::to_string(r), "A" + std::to_string(o),
                           "A" + std::to_string(d), uni(50.0, 1500.0)));
  }
  inst.demand = DemandTable(net, reqs);
  inst.routes = build_routes(net, inst.demand);
  inst.design.kappa = uni(40.0, 400.0);
  inst.design.s_max = uni(2.0, 20.0);
  Weights w{uni(0.0, 1.5), uni(0.0, 1.5), uni(0.2, 1.5)};
  inst.ops.push_back(make_operator(net, "R1", 1, uni(200.0, 5000.0), w));
  inst.ops.back().cost_freq = uni(5.0, 84.0);
  inst.ops.back().cost_base = uni(20.0, 120.0);
  return inst;
}

/// Two mirrored regions with the same local topology, joined by crossing
/// edges. `inter` adds symmetric inter-regional requests.
inline Instance mirrored(double budget, double intra_trips, double inter_trips,
                         Weights w = {}) {
  NetBuilder b;
  const char* side[2] = {"L", "R"};
  for (int r = 0; r < 2; ++r) {
    const std::string s = side[r];
    const int region = r + 1;
    for (int i = 0; i < 4; ++i) {
      b.alt_node(s + "A" + std::to_string(i), region).pt_node(s + "P" + std::to_string(i), region);
    }
    b.alt2(s + "a01", s + "A0", s + "A1", 3.0)
        .alt2(s + "a12", s + "A1", s + "A2", 4.0)
        .alt2(s + "a23", s + "A2", s + "A3", 2.5)
        .alt2(s + "a03", s + "A0", s + "A3", 12.0);
    b.pt(s + "p01", s + "P0", s + "P1", 3.0, true, 300.0)
        .pt(s + "p12", s + "P1", s + "P2", 4.0)
        .pt(s + "p23", s + "P2", s + "P3", 2.5)
        .pt(s + "p10", s + "P1", s + "P0", 3.0, true, 300.0)
        .pt(s + "p21", s + "P2", s + "P1", 4.0)
        .pt(s + "p32", s + "P3", s + "P2", 2.5);
    for (int i = 0; i < 4; ++i) b.transfer(s + "A" + std::to_string(i), s + "P" + std::to_string(i));
  }
  b.alt2("xa", "LA3", "RA3", 5.0);
  b.pt("xp_lr", "LP3", "RP3", 5.0).pt("xp_rl", "RP3", "LP3", 5.0);

  Instance inst;
  inst.net = std::make_shared<MobilityNetwork>(b.build());
  const auto& net = *inst.net;
  std::vector<TravelRequest> reqs;
  for (const char* s : {"L", "R"}) {
    const std::string p = s;
    reqs.push_back(request(net, p + "r03", p + "A0", p + "A3", intra_trips));
    reqs.push_back(request(net, p + "r30", p + "A3", p + "A0", intra_trips * 0.8));
    reqs.push_back(request(net, p + "r13", p + "A1", p + "A3", intra_trips * 0.6));
  }
  if (inter_trips > 0.0) {
    reqs.push_back(request(net, "xlr", "LA1", "RA1", inter_trips));
    reqs.push_back(request(net, "xrl", "RA1", "LA1", inter_trips));
  }
  inst.demand = DemandTable(net, reqs);
  inst.routes = build_routes(net, inst.demand);
  inst.design.kappa = 200.0;
  inst.ops.push_back(make_operator(net, "L", 1, budget, w));
  inst.ops.push_back(make_operator(net, "R", 2, budget, w));
  return inst;
}

/// Maps an edge id of the mirrored instance to its mirror image.
inline std::string mirror_id(const std::string& id) {
  std::string m = id;
  if (!m.empty() && (m[0] == 'L' || m[0] == 'R')) m[0] = m[0] == 'L' ? 'R' : 'L';
  return m;
}

}  // namespace fx
