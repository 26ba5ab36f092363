#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "ndg/equilibrium.hpp"
#include "ndg/game.hpp"

namespace ndg {

struct CoInvestResult {
  std::map<std::size_t, EdgeDecision> builds;  // newly built edges with frequency
  std::map<std::size_t, double> raises;        // frequency increments on available edges
  NetworkState state;                          // network after Stage 2
  double total_payoff = 0.0;                   // sum of operator payoffs
  std::vector<PayoffBreakdown> per_operator;
  double pooled_budget = 0.0;
  double spend = 0.0;  // incremental Stage-2 cost
  double cir = 0.0;
  SolverStats stats;
};

/// Joint Stage-2 design over every PT edge (crossing edges included) on top of
/// the Stage-1 network, paid from the pooled contributions beta_i B_i.
CoInvestResult co_invest(const GameContext& ctx, const NetworkState& stage1_state,
                         const std::vector<double>& betas, const SearchOptions& search = {});

/// Same machinery with an explicit budget; used for the system-optimal planner.
CoInvestResult joint_design(const GameContext& ctx, const NetworkState& start, double budget,
                            const SearchOptions& search = {});

enum class WeightsMode { Symmetric, Contribution };

const char* to_string(WeightsMode m) noexcept;

/// Normalized bargaining weights. Contribution weights fall back to symmetric
/// when nobody contributes.
std::vector<double> bargaining_weights(WeightsMode mode, const std::vector<double>& contributions);

struct SharingInput {
  std::vector<double> disagreement;     // phi_i
  std::vector<double> stage1_payoff;    // F^S1_i
  std::vector<double> stage1_cost;      // b_i(h^S1_i)
  std::vector<double> coinvest_payoff;  // f_i(h^S2)
  std::vector<double> weights;          // alpha_i, normalized
  std::vector<bool> share;              // epsilon_i
};

struct SharingOutcome {
  std::vector<double> disagreement;
  std::vector<double> stage1_payoff;
  std::vector<double> stage1_cost;
  std::vector<double> pool;  // Q_i
  std::vector<double> bargaining_weight;
  std::vector<bool> share_flag;
  std::vector<double> allocation;     // q_i (zeros when infeasible)
  std::vector<double> final_payoff;   // v_i (phi_i when infeasible)
  double shareable = 0.0;             // sum eps_i Q_i
  double surplus = 0.0;               // sum v_i - sum phi_i at agreement
  bool feasible = false;
};

/// F^co + sum b_i > sum phi_i.
bool feasibility_check(double f_co, double stage1_cost_sum, double disagreement_sum);

/// Weighted Nash bargaining over a shareable amount: each operator keeps
/// `kept_i` and receives a transfer q_i with sum q_i = `shareable`. Transfers
/// may be negative. Returns q, or nullopt when the total surplus over the
/// disagreement point is not positive.
std::optional<std::vector<double>> nash_bargain(const std::vector<double>& kept, double shareable,
                                                const std::vector<double>& disagreement,
                                                const std::vector<double>& weights);

SharingOutcome share_payoff(const SharingInput& in);

/// Minimum relative gain (v - phi) / phi over sampled betas >= threshold.
/// Throws InputError when phi is zero or no sample reaches the threshold.
double analyze_mgr(const std::vector<std::pair<double, double>>& sweep, double phi,
                   double beta_threshold);

/// Smallest sampled beta after which every finite-difference slope is negative.
std::optional<double> detect_set(const std::vector<std::pair<double, double>>& sweep);

}  // namespace ndg
