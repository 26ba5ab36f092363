#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ndg/demand.hpp"
#include "ndg/network.hpp"

namespace ndg {

/// Which construction cost the profit term charges every design year.
enum class ProfitCostBasis {
  Availability,  // c^b l_e x_e on every available PT edge
  NewBuild,      // c^b l_e only on edges built this year
};

struct DesignParams {
  double kappa = 60.0;       // seats per unit frequency
  double s_max = 20.0;       // maximum frequency
  double omega = 1e8;        // large number
  double cost_base = 91.0;   // CHF/day/km, used for edges without an owning operator
  double cost_freq = 84.0;   // CHF/day/km per unit frequency
  ProfitCostBasis profit_cost_basis = ProfitCostBasis::Availability;
  AltFlowRule alt_flow_rule = AltFlowRule::PerEdge;

  void validate() const;
};

struct Weights {
  double emission = 1.0;
  double cost = 1.0;
  double profit = 1.0;
};

struct OperatorConfig {
  std::string id;
  int region = 1;
  Weights weights;
  double budget = 0.0;          // B_i, CHF/day
  double coinvest_ratio = 0.0;  // beta_i
  bool share_surplus = true;    // epsilon_i
  std::vector<std::size_t> controllable;  // PT edge indices, ascending by id
  double cost_base = 91.0;
  double cost_freq = 84.0;

  void validate() const;
};

/// Controllable set for "region": every non-crossing PT edge of the operator's region.
std::vector<std::size_t> region_pt_edges(const MobilityNetwork& net, int region);

struct EdgeDecision {
  bool build = false;
  double frequency = 0.0;
  bool operator==(const EdgeDecision&) const = default;
};

/// Build/frequency decisions keyed by PT edge index. Built edges carry a
/// frequency in [1, s_max]; unbuilt edges carry none.
struct DesignStrategy {
  std::map<std::size_t, EdgeDecision> decisions;

  bool empty() const noexcept { return decisions.empty(); }
  bool operator==(const DesignStrategy&) const = default;
};

struct PayoffBreakdown {
  double emissions = 0.0;    // J^e, kg/day
  double travel_cost = 0.0;  // J^c, CHF/day
  double profit = 0.0;       // J^p, CHF/day
  double total = 0.0;        // f_i, CHF/day
};

/// Applies build/frequency decisions on top of `base`. Throws InputError when a
/// strategy rebuilds an available edge, assigns frequency without building, or
/// two strategies touch the same edge inconsistently.
NetworkState apply_strategies(const MobilityNetwork& net, const NetworkState& base,
                              const std::vector<DesignStrategy>& strategies,
                              const DesignParams& design);

/// b_i(h_i) = sum c^b l_e d_e + c^k l_e s_e.
double strategy_cost(const MobilityNetwork& net, const DesignStrategy& strategy, double cost_base,
                     double cost_freq);
double strategy_cost(const MobilityNetwork& net, const DesignStrategy& strategy,
                     const OperatorConfig& op);

PayoffBreakdown payoff(const OperatorConfig& op, const MobilityNetwork& net, const FlowField& flows,
                       const NetworkState& state, const EconomicParams& econ,
                       const DesignParams& design);

struct ConvexityEntry {
  std::size_t edge = 0;
  double delta = 0.0;
  bool holds = false;
};

struct ConvexityCertificate {
  std::vector<ConvexityEntry> entries;  // one per controllable PT edge
  bool holds = true;
};

/// Marginal payoff of moving one unit of flow from the substitutes onto each
/// controllable PT edge; the local problem is concave when all are >= 0.
ConvexityCertificate convexity_certificate(const OperatorConfig& op, const MobilityNetwork& net,
                                           const EconomicParams& econ);

}  // namespace ndg
