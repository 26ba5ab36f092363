#include "ndg/operator.hpp"

#include <cmath>
#include <string>

#include "ndg/errors.hpp"

namespace ndg {

namespace {
bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
}  // namespace

void DesignParams::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InputError("kappa must be positive");
  if (!(s_max >= 1.0) || !std::isfinite(s_max)) throw InputError("s_max must be at least 1");
  if (!(omega > 0.0)) throw InputError("omega must be positive");
  if (!finite_nonneg(cost_base) || !finite_nonneg(cost_freq))
    throw InputError("unit costs must be non-negative");
}

void OperatorConfig::validate() const {
  if (id.empty()) throw InputError("operator with empty id");
  if (region != 1 && region != 2) throw InputError("operator '" + id + "': region must be 1 or 2");
  if (!finite_nonneg(budget)) throw InputError("operator '" + id + "': budget must be non-negative");
  if (!finite_nonneg(weights.emission) || !finite_nonneg(weights.cost) ||
      !finite_nonneg(weights.profit))
    throw InputError("operator '" + id + "': weights must be non-negative");
  if (!(coinvest_ratio >= 0.0 && coinvest_ratio <= 1.0))
    throw InputError("operator '" + id + "': beta must lie in [0, 1]");
  if (!finite_nonneg(cost_base) || !finite_nonneg(cost_freq))
    throw InputError("operator '" + id + "': unit costs must be non-negative");
}

std::vector<std::size_t> region_pt_edges(const MobilityNetwork& net, int region) {
  return net.edges_in_scope(region, EdgeKind::PT);
}

NetworkState apply_strategies(const MobilityNetwork& net, const NetworkState& base,
                              const std::vector<DesignStrategy>& strategies,
                              const DesignParams& design) {
  NetworkState out = base;
  std::vector<const EdgeDecision*> seen(net.edge_count(), nullptr);
  for (const auto& strategy : strategies) {
    for (const auto& [e, d] : strategy.decisions) {
      if (e >= net.edge_count() || net.edge(e).kind != EdgeKind::PT)
        throw InputError("strategy decision on a non-PT edge");
      const auto& id = net.edge(e).id;
      if (!d.build) {
        if (d.frequency != 0.0)
          throw InputError("edge '" + id + "': frequency assigned without construction");
        continue;
      }
      if (seen[e]) {
        if (*seen[e] == d) continue;
        throw InputError("edge '" + id + "': conflicting decisions from two strategies");
      }
      if (base.avail[e]) throw InputError("edge '" + id + "': build on an already available edge");
      if (!(d.frequency >= 1.0 - 1e-12) || d.frequency > design.s_max + 1e-12)
        throw InputError("edge '" + id + "': frequency of a built edge must lie in [1, s_max]");
      seen[e] = &d;
      out.avail[e] = true;
      out.new_build[e] = true;
      out.frequency[e] = d.frequency;
      out.cap[e] = base.cap[e] + design.kappa * d.frequency;
    }
  }
  return out;
}

double strategy_cost(const MobilityNetwork& net, const DesignStrategy& strategy, double cost_base,
                     double cost_freq) {
  double total = 0.0;
  for (const auto& [e, d] : strategy.decisions) {
    const double l = net.edge(e).label.length_km;
    total += cost_base * l * (d.build ? 1.0 : 0.0) + cost_freq * l * d.frequency;
  }
  return total;
}

double strategy_cost(const MobilityNetwork& net, const DesignStrategy& strategy,
                     const OperatorConfig& op) {
  return strategy_cost(net, strategy, op.cost_base, op.cost_freq);
}

PayoffBreakdown payoff(const OperatorConfig& op, const MobilityNetwork& net, const FlowField& flows,
                       const NetworkState& state, const EconomicParams& econ,
                       const DesignParams& design) {
  PayoffBreakdown b;
  const double pt_cost = econ.pt_cost_per_km();
  const double alt_cost = econ.alt_cost_per_km();
  double revenue = 0.0;
  double construction = 0.0;
  for (std::size_t e = 0; e < net.edge_count(); ++e) {
    const auto& edge = net.edge(e);
    if (scope_region(edge.scope) != op.region) continue;
    const double l = edge.label.length_km;
    const double y = flows.flow[e];
    if (edge.kind == EdgeKind::PT) {
      b.emissions += econ.pt_emission * l * y;
      b.travel_cost += l * y * pt_cost;
      revenue += econ.pt_fee * l * y;
      const bool charged = design.profit_cost_basis == ProfitCostBasis::Availability
                               ? static_cast<bool>(state.avail[e])
                               : static_cast<bool>(state.new_build[e]);
      construction += op.cost_base * l * (charged ? 1.0 : 0.0) + op.cost_freq * l * state.frequency[e];
    } else if (edge.kind == EdgeKind::ALT) {
      b.emissions += econ.alt_emission * l * y;
      b.travel_cost += l * y * alt_cost;
    }
  }
  b.profit = revenue - construction;
  b.total = -op.weights.emission * b.emissions - op.weights.cost * b.travel_cost +
            op.weights.profit * b.profit;
  return b;
}

ConvexityCertificate convexity_certificate(const OperatorConfig& op, const MobilityNetwork& net,
                                           const EconomicParams& econ) {
  ConvexityCertificate cert;
  const auto& w = op.weights;
  const double pt_coef = w.emission * econ.pt_emission + w.cost * econ.pt_cost_per_km() -
                         w.profit * econ.pt_fee;
  const double alt_coef = w.emission * econ.alt_emission + w.cost * econ.alt_cost_per_km();
  for (auto e : op.controllable) {
    ConvexityEntry entry;
    entry.edge = e;
    entry.delta = -net.edge(e).label.length_km * pt_coef + net.substitute_length(e) * alt_coef;
    entry.holds = entry.delta >= 0.0;
    cert.holds = cert.holds && entry.holds;
    cert.entries.push_back(entry);
  }
  return cert;
}

}  // namespace ndg
