#pragma once

#include <cstddef>
#include <vector>

#include "ndg/demand.hpp"
#include "ndg/network.hpp"

namespace ndg {

struct UEConfig {
  double bpr_a = 0.15;
  double bpr_b = 4.0;
  double blocked_cost = 1e8;    // Omega, CHF
  double penalty_rho = 1e4;     // PT over-capacity penalty
  std::size_t max_iters = 20000;
  double gap_tol = 1e-4;
  unsigned threads = 1;

  void validate() const;
};

struct UEResult {
  std::vector<double> flows;  // per edge, pax/day
  std::vector<double> beckmann;  // objective after each iteration
  double relative_gap = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Generalized cost of one traversal at flow `flow`. ALT edges use the BPR
/// form, PT edges the availability cost with a quadratic over-capacity
/// penalty, transfer edges are free.
double edge_cost(const Edge& edge, double flow, const NetworkState& state, std::size_t index,
                 const EconomicParams& p, const UEConfig& cfg);

/// Conjugate Frank-Wolfe user equilibrium over the whole multimodal network, every
/// request routed from its origin to its destination ALT node.
UEResult solve_ue(const MobilityNetwork& net, const DemandTable& demand, const NetworkState& state,
                  const EconomicParams& p, const UEConfig& cfg = {});

}  // namespace ndg
