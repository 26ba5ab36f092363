#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "ndg/demand.hpp"
#include "ndg/network.hpp"
#include "ndg/operator.hpp"

namespace ndg {

/// Everything a payoff evaluation needs: network, routes, demand model,
/// operators (at most one per region) and parameters. Immutable; safe to share
/// between threads. The network must outlive the context.
class GameContext {
 public:
  GameContext(const MobilityNetwork& net, const std::vector<RoutePair>& routes,
              const DemandTable& demand, std::vector<OperatorConfig> ops, EconomicParams econ,
              DesignParams design);

  const MobilityNetwork& net() const noexcept { return *net_; }
  const DemandModel& model() const noexcept { return model_; }
  const std::vector<OperatorConfig>& ops() const noexcept { return ops_; }
  const EconomicParams& econ() const noexcept { return econ_; }
  const DesignParams& design() const noexcept { return design_; }

  /// Index of the operator owning the edge's region, or -1 (crossing edges,
  /// regions without an operator).
  int owner(std::size_t edge) const noexcept { return owner_[edge]; }
  /// Unit construction cost c^b and frequency cost c^k charged for an edge.
  double base_cost_rate(std::size_t edge) const noexcept;
  double freq_cost_rate(std::size_t edge) const noexcept;

  FlowField flows(const NetworkState& state) const { return model_.assign(state); }
  std::vector<PayoffBreakdown> payoffs(const NetworkState& state, const FlowField& flows) const;
  std::vector<PayoffBreakdown> evaluate(const NetworkState& state) const;

 private:
  const MobilityNetwork* net_;
  DemandModel model_;
  std::vector<OperatorConfig> ops_;
  EconomicParams econ_;
  DesignParams design_;
  std::vector<int> owner_;
};

struct SearchOptions {
  /// Build sets are enumerated exhaustively up to this many binary candidates;
  /// above it a depth-first branch-and-bound is used.
  std::size_t exhaustive_limit = 15;
  std::size_t max_nodes = 200000;
};

struct SolverStats {
  std::size_t nodes_explored = 0;
  std::size_t inner_iterations = 0;  // simplex pivots
  double bound_gap = 0.0;            // relative, >= 0
  bool global_optimality_unknown = false;
};

/// A design decision problem on top of `base`: choose which candidates to
/// build (frequency in [1, s_max]) and how much to raise the frequency of
/// available edges, within `budget`, maximizing the summed payoff of
/// `objective_ops`.
struct DesignProblem {
  NetworkState base;
  std::vector<std::size_t> build_candidates;
  std::vector<std::size_t> raise_candidates;
  std::vector<std::size_t> objective_ops;
  double budget = 0.0;
};

struct DesignSolution {
  NetworkState state;
  std::map<std::size_t, EdgeDecision> builds;
  std::map<std::size_t, double> raises;
  double objective = 0.0;
  double spend = 0.0;
  SolverStats stats;
};

/// Exact for a fixed build set (the frequency subproblem is a linear program
/// once frequencies are capped at demand saturation); build sets are
/// enumerated or branched on.
DesignSolution solve_design(const GameContext& ctx, const DesignProblem& problem,
                            const SearchOptions& options = {});

/// Summed payoff of the given operators in a state.
double summed_payoff(const GameContext& ctx, const std::vector<std::size_t>& ops,
                     const NetworkState& state);

}  // namespace ndg
