#include "ndg/demand.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ndg/errors.hpp"

namespace ndg {

const char* to_string(TripType t) noexcept {
  switch (t) {
    case TripType::Intra1: return "INTRA_1";
    case TripType::Intra2: return "INTRA_2";
    case TripType::Inter1: return "INTER_1";
    case TripType::Inter2: return "INTER_2";
  }
  return "?";
}

TripType classify_trip(const MobilityNetwork& net, std::size_t origin, std::size_t destination) {
  int ro = net.node(origin).region;
  int rd = net.node(destination).region;
  if (ro == rd) return ro == 1 ? TripType::Intra1 : TripType::Intra2;
  return ro == 1 ? TripType::Inter1 : TripType::Inter2;
}

DemandTable::DemandTable(const MobilityNetwork& net, std::vector<TravelRequest> requests)
    : requests_(std::move(requests)) {
  std::set<std::string> ids;
  for (auto& r : requests_) {
    if (r.id.empty()) throw InputError("request with empty id");
    if (!ids.insert(r.id).second) throw InputError("duplicate request id '" + r.id + "'");
    if (r.origin >= net.node_count() || r.destination >= net.node_count())
      throw InputError("request '" + r.id + "': unknown node");
    if (net.node(r.origin).layer != Layer::ALT || net.node(r.destination).layer != Layer::ALT)
      throw InputError("request '" + r.id + "': origin and destination must be ALT nodes");
    if (!std::isfinite(r.trips) || r.trips < 0.0)
      throw InputError("request '" + r.id + "': trips must be non-negative");
    r.type = classify_trip(net, r.origin, r.destination);
  }
}

DemandTable DemandTable::scaled(double factor) const {
  DemandTable out = *this;
  for (auto& r : out.requests_) r.trips *= factor;
  return out;
}

DemandTable DemandTable::scaled_intra(double factor_region1, double factor_region2) const {
  DemandTable out = *this;
  for (auto& r : out.requests_) {
    if (r.type == TripType::Intra1) r.trips *= factor_region1;
    if (r.type == TripType::Intra2) r.trips *= factor_region2;
  }
  return out;
}

double DemandTable::total_trips() const {
  double t = 0.0;
  for (const auto& r : requests_) t += r.trips;
  return t;
}

double DemandTable::total_trips(TripType type) const {
  double t = 0.0;
  for (const auto& r : requests_)
    if (r.type == type) t += r.trips;
  return t;
}

void EconomicParams::validate() const {
  for (double v : {value_of_time, pt_fee, alt_fee, pt_emission, alt_emission}) {
    if (!std::isfinite(v) || v < 0.0) throw InputError("economic parameters must be non-negative");
  }
  if (!(pt_speed > 0.0) || !(alt_speed > 0.0) || !std::isfinite(pt_speed) ||
      !std::isfinite(alt_speed))
    throw InputError("speeds must be strictly positive");
}

NetworkState NetworkState::from_network(const MobilityNetwork& net) {
  NetworkState s;
  const auto n = net.edge_count();
  s.avail.assign(n, false);
  s.cap.assign(n, 0.0);
  s.frequency.assign(n, 0.0);
  s.new_build.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = net.edge(i);
    s.avail[i] = e.label.available;
    s.cap[i] = e.label.capacity;
  }
  return s;
}

NetworkState NetworkState::carried_forward() const {
  NetworkState s = *this;
  std::fill(s.frequency.begin(), s.frequency.end(), 0.0);
  std::fill(s.new_build.begin(), s.new_build.end(), false);
  return s;
}

double mode_share(double u_pt, double u_alt) noexcept {
  const double d = u_pt - u_alt;
  if (d >= 0.0) return 1.0 / (1.0 + std::exp(-d));
  const double e = std::exp(d);
  return e / (1.0 + e);
}

namespace {

double edge_pt_term(const MobilityNetwork& net, std::size_t e, const EconomicParams& p) {
  return -net.edge(e).label.length_km * p.pt_cost_per_km();
}

double edge_sub_term(const MobilityNetwork& net, std::size_t e, const EconomicParams& p) {
  return -net.substitute_length(e) * p.alt_cost_per_km();
}

}  // namespace

double utility_alt(const MobilityNetwork& net, const RoutePair& route, const EconomicParams& p) {
  double len = 0.0;
  for (auto e : route.alt_route) len += net.edge(e).label.length_km;
  return -len * p.alt_cost_per_km();
}

double utility_pt(const MobilityNetwork& net, const RoutePair& route, const NetworkState& state,
                  const EconomicParams& p) {
  double u = 0.0;
  for (auto e : route.pt_route) {
    if (net.edge(e).kind != EdgeKind::PT) continue;
    u += state.avail[e] ? edge_pt_term(net, e, p) : edge_sub_term(net, e, p);
  }
  return u;
}

double utility_pt_full(const MobilityNetwork& net, const RoutePair& route, const EconomicParams& p) {
  double u = 0.0;
  for (auto e : route.pt_route) {
    if (net.edge(e).kind != EdgeKind::PT) continue;
    u += edge_pt_term(net, e, p);
  }
  return u;
}

std::vector<double> max_share(const MobilityNetwork& net, const std::vector<RoutePair>& routes,
                              const EconomicParams& p) {
  std::vector<double> out;
  out.reserve(routes.size());
  for (const auto& r : routes) out.push_back(mode_share(utility_pt_full(net, r, p), utility_alt(net, r, p)));
  return out;
}

DemandModel::DemandModel(const MobilityNetwork& net, const std::vector<RoutePair>& routes,
                         const DemandTable& demand, const EconomicParams& p, AltFlowRule rule)
    : net_(&net), params_(p), rule_(rule) {
  if (routes.size() != demand.size())
    throw InvariantError("route table does not match demand table");
  const auto n = net.edge_count();
  alt_demand_.assign(n, 0.0);
  route_count_.assign(n, 0.0);
  terms_.reserve(routes.size());
  for (std::size_t m = 0; m < routes.size(); ++m) {
    const auto& r = routes[m];
    RouteTerms t;
    t.trips = demand.requests()[m].trips;
    t.u_alt = utility_alt(net, r, p);
    double u_full = 0.0;
    for (auto e : r.pt_route) {
      if (net.edge(e).kind != EdgeKind::PT) continue;
      t.pt_edges.push_back(e);
      t.built_term.push_back(edge_pt_term(net, e, p));
      t.unbuilt_term.push_back(edge_sub_term(net, e, p));
      u_full += t.built_term.back();
      route_count_[e] += 1.0;
    }
    t.p_hat = mode_share(u_full, t.u_alt);
    for (auto e : r.alt_route) alt_demand_[e] += t.trips * t.p_hat;
    terms_.push_back(std::move(t));
  }
}

double DemandModel::subtraction_multiplier(std::size_t pt_edge) const {
  return rule_ == AltFlowRule::PerRequest ? route_count_[pt_edge] : 1.0;
}

FlowField DemandModel::assign(const NetworkState& state) const {
  const auto& net = *net_;
  const auto n = net.edge_count();
  FlowField f;
  f.flow.assign(n, 0.0);
  f.pt_demand.assign(n, 0.0);
  f.alt_residual.assign(n, 0.0);
  f.pt_share.reserve(terms_.size());
  f.max_share.reserve(terms_.size());

  for (const auto& t : terms_) {
    double u = 0.0;
    for (std::size_t k = 0; k < t.pt_edges.size(); ++k)
      u += state.avail[t.pt_edges[k]] ? t.built_term[k] : t.unbuilt_term[k];
    const double p = mode_share(u, t.u_alt);
    f.pt_share.push_back(p);
    f.max_share.push_back(t.p_hat);
    for (auto e : t.pt_edges) f.pt_demand[e] += t.trips * p;
  }

  for (auto e : net.pt_edges()) {
    // Unavailable edges have zero capacity and carry nothing.
    const double cap = state.avail[e] ? state.cap[e] : 0.0;
    f.flow[e] = std::min(f.pt_demand[e], cap);
  }

  for (std::size_t e = 0; e < n; ++e) {
    if (net.edge(e).kind == EdgeKind::ALT) f.alt_residual[e] = alt_demand_[e];
  }
  for (auto a : net.pt_edges()) {
    const double served = f.flow[a] * subtraction_multiplier(a);
    if (served == 0.0) continue;
    for (auto e : net.edge(a).substitutes) f.alt_residual[e] -= served;
  }
  for (std::size_t e = 0; e < n; ++e) {
    if (net.edge(e).kind == EdgeKind::ALT) f.flow[e] = std::max(0.0, f.alt_residual[e]);
  }
  return f;
}

FlowField assign_flows(const MobilityNetwork& net, const std::vector<RoutePair>& routes,
                       const DemandTable& demand, const NetworkState& state,
                       const EconomicParams& p, AltFlowRule rule) {
  return DemandModel(net, routes, demand, p, rule).assign(state);
}

}  // namespace ndg
