#include "ndg/game.hpp"

#include <set>

#include "ndg/errors.hpp"

namespace ndg {

GameContext::GameContext(const MobilityNetwork& net, const std::vector<RoutePair>& routes,
                         const DemandTable& demand, std::vector<OperatorConfig> ops,
                         EconomicParams econ, DesignParams design)
    : net_(&net),
      model_(net, routes, demand, econ, design.alt_flow_rule),
      ops_(std::move(ops)),
      econ_(econ),
      design_(design),
      owner_(net.edge_count(), -1) {
  econ_.validate();
  design_.validate();
  std::set<int> regions;
  std::set<std::string> ids;
  for (const auto& op : ops_) {
    op.validate();
    if (!regions.insert(op.region).second)
      throw InputError("two operators control region " + std::to_string(op.region));
    if (!ids.insert(op.id).second) throw InputError("duplicate operator id '" + op.id + "'");
    for (auto e : op.controllable) {
      if (e >= net.edge_count() || net.edge(e).kind != EdgeKind::PT)
        throw InputError("operator '" + op.id + "': controllable edge is not a PT edge");
      if (scope_region(net.edge(e).scope) != op.region)
        throw InputError("operator '" + op.id + "': controllable edge '" + net.edge(e).id +
                         "' lies outside its region");
    }
  }
  for (std::size_t e = 0; e < net.edge_count(); ++e) {
    const int r = scope_region(net.edge(e).scope);
    for (std::size_t i = 0; i < ops_.size(); ++i)
      if (ops_[i].region == r) owner_[e] = static_cast<int>(i);
  }
}

double GameContext::base_cost_rate(std::size_t edge) const noexcept {
  const int o = owner_[edge];
  return o >= 0 ? ops_[static_cast<std::size_t>(o)].cost_base : design_.cost_base;
}

double GameContext::freq_cost_rate(std::size_t edge) const noexcept {
  const int o = owner_[edge];
  return o >= 0 ? ops_[static_cast<std::size_t>(o)].cost_freq : design_.cost_freq;
}

std::vector<PayoffBreakdown> GameContext::payoffs(const NetworkState& state,
                                                  const FlowField& flows) const {
  std::vector<PayoffBreakdown> out;
  out.reserve(ops_.size());
  for (const auto& op : ops_) out.push_back(payoff(op, *net_, flows, state, econ_, design_));
  return out;
}

std::vector<PayoffBreakdown> GameContext::evaluate(const NetworkState& state) const {
  return payoffs(state, flows(state));
}

double summed_payoff(const GameContext& ctx, const std::vector<std::size_t>& ops,
                     const NetworkState& state) {
  const auto flows = ctx.flows(state);
  double total = 0.0;
  for (auto i : ops)
    total += payoff(ctx.ops()[i], ctx.net(), flows, state, ctx.econ(), ctx.design()).total;
  return total;
}

}  // namespace ndg
