#include "ndg/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <tuple>

#include "ndg/demand.hpp"
#include "ndg/errors.hpp"

namespace ndg {

int scope_region(Scope scope) noexcept {
  switch (scope) {
    case Scope::Region1: return 1;
    case Scope::Region2: return 2;
    case Scope::Crossing: return 0;
  }
  return 0;
}

const char* to_string(Layer layer) noexcept { return layer == Layer::PT ? "PT" : "ALT"; }

const char* to_string(EdgeKind kind) noexcept {
  switch (kind) {
    case EdgeKind::PT: return "PT";
    case EdgeKind::ALT: return "ALT";
    case EdgeKind::Transfer: return "TRANSFER";
  }
  return "?";
}

const char* to_string(Scope scope) noexcept {
  switch (scope) {
    case Scope::Region1: return "REGION1";
    case Scope::Region2: return "REGION2";
    case Scope::Crossing: return "CROSSING";
  }
  return "?";
}

namespace {

bool strongly_connected(const MobilityNetwork& net, const std::vector<std::size_t>& members,
                        const std::function<bool(const Edge&)>& allow) {
  if (members.size() <= 1) return true;
  std::vector<char> in_set(net.node_count(), 0);
  for (auto n : members) in_set[n] = 1;
  std::vector<std::vector<std::size_t>> fwd(net.node_count()), bwd(net.node_count());
  for (const auto& e : net.edges()) {
    if (!allow(e) || !in_set[e.tail] || !in_set[e.head]) continue;
    fwd[e.tail].push_back(e.head);
    bwd[e.head].push_back(e.tail);
  }
  auto reach_all = [&](const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<char> seen(net.node_count(), 0);
    std::vector<std::size_t> stack{members.front()};
    seen[members.front()] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      for (auto v : adj[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == members.size();
  };
  return reach_all(fwd) && reach_all(bwd);
}

// ALT node reached from a PT station through its transfer edges (smallest id wins).
std::optional<std::size_t> project_to_alt(const MobilityNetwork& net, std::size_t pt_node) {
  const Edge* best = nullptr;
  for (auto e : net.out_edges(pt_node)) {
    const auto& edge = net.edge(e);
    if (edge.kind != EdgeKind::Transfer) continue;
    if (net.node(edge.head).layer != Layer::ALT) continue;
    if (!best || edge.id < best->id) best = &edge;
  }
  if (!best) return std::nullopt;
  return best->head;
}

}  // namespace

MobilityNetwork::MobilityNetwork(std::vector<Node> nodes, std::vector<EdgeSpec> specs)
    : nodes_(std::move(nodes)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.id.empty()) throw InputError("node with empty id");
    if (n.region != 1 && n.region != 2)
      throw InputError("node '" + n.id + "': region must be 1 or 2");
    if (!node_ix_.emplace(n.id, i).second) throw InputError("duplicate node id '" + n.id + "'");
  }
  out_.assign(nodes_.size(), {});

  edges_.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    if (s.id.empty()) throw InputError("edge with empty id");
    if (!edge_ix_.emplace(s.id, i).second) throw InputError("duplicate edge id '" + s.id + "'");
    auto tail = find_node(s.tail);
    auto head = find_node(s.head);
    if (!tail) throw InputError("edge '" + s.id + "': dangling tail '" + s.tail + "'");
    if (!head) throw InputError("edge '" + s.id + "': dangling head '" + s.head + "'");
    if (*tail == *head) throw InputError("edge '" + s.id + "': self loop");
    const auto& tn = nodes_[*tail];
    const auto& hn = nodes_[*head];
    switch (s.kind) {
      case EdgeKind::PT:
        if (tn.layer != Layer::PT || hn.layer != Layer::PT)
          throw InputError("edge '" + s.id + "': PT edge must join two PT nodes");
        break;
      case EdgeKind::ALT:
        if (tn.layer != Layer::ALT || hn.layer != Layer::ALT)
          throw InputError("edge '" + s.id + "': ALT edge must join two ALT nodes");
        break;
      case EdgeKind::Transfer:
        if (tn.layer == hn.layer)
          throw InputError("edge '" + s.id + "': transfer edge must join different layers");
        break;
    }
    if (!std::isfinite(s.length_km) || s.length_km < 0.0)
      throw InputError("edge '" + s.id + "': length must be non-negative");
    if (s.kind != EdgeKind::Transfer && s.length_km <= 0.0)
      throw InputError("edge '" + s.id + "': length must be positive");
    if (!std::isfinite(s.existing_capacity) || s.existing_capacity < 0.0)
      throw InputError("edge '" + s.id + "': capacity must be non-negative");
    if (!std::isfinite(s.travel_time_h) || s.travel_time_h < 0.0)
      throw InputError("edge '" + s.id + "': travel time must be non-negative");
    if (s.kind == EdgeKind::PT && !s.existing_available && s.existing_capacity > 0.0)
      throw InputError("edge '" + s.id + "': capacity configured on an unavailable PT edge");
    if (s.kind != EdgeKind::PT && s.substitutes && !s.substitutes->empty())
      throw InputError("edge '" + s.id + "': only PT edges carry substitutes");

    Edge e;
    e.id = s.id;
    e.tail = *tail;
    e.head = *head;
    e.kind = s.kind;
    if (tn.region != hn.region)
      e.scope = Scope::Crossing;
    else
      e.scope = tn.region == 1 ? Scope::Region1 : Scope::Region2;
    // Transfer edges are free connectors.
    e.label.length_km = s.kind == EdgeKind::Transfer ? 0.0 : s.length_km;
    e.label.available = s.kind == EdgeKind::PT ? s.existing_available : true;
    e.label.capacity = s.existing_capacity;
    e.label.travel_time_h = s.kind == EdgeKind::Transfer ? 0.0 : s.travel_time_h;
    out_[e.tail].push_back(i);
    edges_.push_back(std::move(e));
  }
  for (auto& adj : out_) {
    std::sort(adj.begin(), adj.end(),
              [&](std::size_t a, std::size_t b) { return edges_[a].id < edges_[b].id; });
  }

  // ALT connectivity: whole layer and each region's part.
  auto is_alt = [](const Edge& e) { return e.kind == EdgeKind::ALT; };
  std::vector<std::size_t> alt_nodes, alt_r1, alt_r2;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].layer != Layer::ALT) continue;
    alt_nodes.push_back(i);
    (nodes_[i].region == 1 ? alt_r1 : alt_r2).push_back(i);
  }
  if (alt_nodes.empty()) throw InputError("network has no ALT nodes");
  if (!strongly_connected(*this, alt_nodes, is_alt))
    throw InputError("ALT layer is not strongly connected");
  if (!strongly_connected(*this, alt_r1, is_alt))
    throw InputError("ALT layer of region 1 is not strongly connected");
  if (!strongly_connected(*this, alt_r2, is_alt))
    throw InputError("ALT layer of region 2 is not strongly connected");

  // Substitutes: explicit, or the shortest ALT path between projected endpoints.
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].kind != EdgeKind::PT) continue;
    auto& e = edges_[i];
    if (specs[i].substitutes) {
      if (specs[i].substitutes->empty())
        throw InputError("PT edge '" + e.id + "' has no substitutes");
      for (const auto& sid : *specs[i].substitutes) {
        auto a = find_edge(sid);
        if (!a) throw InputError("PT edge '" + e.id + "': unknown substitute '" + sid + "'");
        if (edges_[*a].kind != EdgeKind::ALT)
          throw InputError("PT edge '" + e.id + "': substitute '" + sid + "' is not an ALT edge");
        e.substitutes.push_back(*a);
      }
    } else {
      auto from = project_to_alt(*this, e.tail);
      auto to = project_to_alt(*this, e.head);
      if (!from || !to)
        throw InputError("PT edge '" + e.id +
                         "' has no substitutes and an endpoint without a transfer to the ALT layer");
      auto path = shortest_path(*this, *from, *to, is_alt);
      if (!path || path->empty())
        throw InputError("PT edge '" + e.id + "' has no substitutes and none can be derived");
      e.substitutes = std::move(*path);
    }
    pt_edges_.push_back(i);
  }
  std::sort(pt_edges_.begin(), pt_edges_.end(),
            [&](std::size_t a, std::size_t b) { return edges_[a].id < edges_[b].id; });
}

std::optional<std::size_t> MobilityNetwork::find_node(const std::string& id) const {
  auto it = node_ix_.find(id);
  if (it == node_ix_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> MobilityNetwork::find_edge(const std::string& id) const {
  auto it = edge_ix_.find(id);
  if (it == edge_ix_.end()) return std::nullopt;
  return it->second;
}

std::size_t MobilityNetwork::node_index(const std::string& id) const {
  auto n = find_node(id);
  if (!n) throw InputError("unknown node '" + id + "'");
  return *n;
}

std::size_t MobilityNetwork::edge_index(const std::string& id) const {
  auto e = find_edge(id);
  if (!e) throw InputError("unknown edge '" + id + "'");
  return *e;
}

double MobilityNetwork::substitute_length(std::size_t pt_edge) const {
  double total = 0.0;
  for (auto a : edges_.at(pt_edge).substitutes) total += edges_[a].label.length_km;
  return total;
}

std::vector<std::size_t> MobilityNetwork::edges_in_scope(int region, EdgeKind kind) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (edges_[i].kind == kind && scope_region(edges_[i].scope) == region) out.push_back(i);
  }
  std::sort(out.begin(), out.end(),
            [&](std::size_t a, std::size_t b) { return edges_[a].id < edges_[b].id; });
  return out;
}

std::size_t MobilityNetwork::count_nodes(int region, Layer layer) const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [&](const Node& n) {
    return n.region == region && n.layer == layer;
  }));
}

std::optional<std::vector<std::size_t>> shortest_path(const MobilityNetwork& net, std::size_t from,
                                                      std::size_t to,
                                                      const std::function<bool(const Edge&)>& allow) {
  if (from == to) return std::vector<std::size_t>{};
  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto n = net.node_count();

  // Reverse Dijkstra from `to` on (length, hops).
  std::vector<std::vector<std::size_t>> in(n);
  for (std::size_t i = 0; i < net.edge_count(); ++i) {
    const auto& e = net.edge(i);
    if (allow(e)) in[e.head].push_back(i);
  }
  std::vector<double> dist(n, inf);
  std::vector<std::size_t> hops(n, std::numeric_limits<std::size_t>::max());
  using Key = std::tuple<double, std::size_t, std::size_t>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> pq;
  dist[to] = 0.0;
  hops[to] = 0;
  pq.emplace(0.0, 0, to);
  while (!pq.empty()) {
    auto [d, h, v] = pq.top();
    pq.pop();
    if (d != dist[v] || h != hops[v]) continue;
    for (auto ei : in[v]) {
      const auto& e = net.edge(ei);
      double nd = d + e.label.length_km;
      std::size_t nh = h + 1;
      if (nd < dist[e.tail] || (nd == dist[e.tail] && nh < hops[e.tail])) {
        dist[e.tail] = nd;
        hops[e.tail] = nh;
        pq.emplace(nd, nh, e.tail);
      }
    }
  }
  if (dist[from] == inf) return std::nullopt;

  // Forward walk along tight edges, picking the smallest id; hops strictly
  // decrease so the walk terminates.
  std::vector<std::size_t> path;
  std::size_t u = from;
  while (u != to) {
    const Edge* pick = nullptr;
    std::size_t pick_ix = 0;
    for (auto ei : net.out_edges(u)) {
      const auto& e = net.edge(ei);
      if (!allow(e) || dist[e.head] == inf) continue;
      if (hops[e.head] + 1 != hops[u]) continue;
      double via = e.label.length_km + dist[e.head];
      if (std::abs(via - dist[u]) > 1e-9 * std::max(1.0, dist[u])) continue;
      if (!pick || e.id < pick->id) {
        pick = &e;
        pick_ix = ei;
      }
    }
    if (!pick) throw InvariantError("shortest path reconstruction failed");
    path.push_back(pick_ix);
    u = pick->head;
  }
  return path;
}

std::vector<RoutePair> build_routes(const MobilityNetwork& net, const DemandTable& demand) {
  auto alt_only = [](const Edge& e) { return e.kind == EdgeKind::ALT; };
  auto pt_layer = [](const Edge& e) {
    return e.kind == EdgeKind::PT || e.kind == EdgeKind::Transfer;
  };
  std::vector<RoutePair> routes;
  routes.reserve(demand.size());
  for (const auto& r : demand.requests()) {
    RoutePair rp;
    rp.request_id = r.id;
    auto alt = shortest_path(net, r.origin, r.destination, alt_only);
    if (!alt)
      throw InputError("request '" + r.id + "': destination unreachable in the ALT layer");
    auto pt = shortest_path(net, r.origin, r.destination, pt_layer);
    if (!pt) throw InputError("request '" + r.id + "': destination unreachable in the PT layer");
    rp.alt_route = std::move(*alt);
    rp.pt_route = std::move(*pt);
    routes.push_back(std::move(rp));
  }
  return routes;
}

bool partition_holds(const MobilityNetwork& net) {
  for (const auto& e : net.edges()) {
    int rt = net.node(e.tail).region;
    int rh = net.node(e.head).region;
    bool in1 = rt == 1 && rh == 1;
    bool in2 = rt == 2 && rh == 2;
    bool inc = rt != rh;
    if (in1 + in2 + inc != 1) return false;
    Scope expect = inc ? Scope::Crossing : (in1 ? Scope::Region1 : Scope::Region2);
    if (e.scope != expect) return false;
  }
  return true;
}

bool is_path(const MobilityNetwork& net, const std::vector<std::size_t>& route, std::size_t from,
             std::size_t to) {
  std::size_t at = from;
  for (auto ei : route) {
    if (ei >= net.edge_count()) return false;
    const auto& e = net.edge(ei);
    if (e.tail != at) return false;
    at = e.head;
  }
  return at == to;
}

}  // namespace ndg
