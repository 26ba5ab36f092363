#pragma once

#include <cstddef>
#include <vector>

#include "ndg/game.hpp"

namespace ndg {

struct SolverOptions {
  double tol_s = 1e-4;    // frequency units
  double eps_dev = 1e-3;  // CHF/day
  std::size_t max_rounds = 50;
  SearchOptions search;
  unsigned threads = 1;
};

struct BestResponseResult {
  DesignStrategy strategy;
  PayoffBreakdown payoff;
  double cost = 0.0;
  SolverStats stats;
};

struct NeCertificate {
  bool passes = false;
  double max_gain = 0.0;
  std::vector<double> gains;  // per operator
};

struct EquilibriumResult {
  std::vector<DesignStrategy> profile;   // per operator, ctx order
  std::vector<PayoffBreakdown> payoffs;  // per operator
  std::vector<double> costs;             // b_i(h_i)
  std::vector<SolverStats> stats;        // last best response per operator
  NetworkState state;
  bool converged = false;
  bool cycle_detected = false;
  std::size_t rounds = 0;
  NeCertificate certificate;
};

/// Operator `op`'s optimal strategy against the other entries of `profile`,
/// building only on its controllable, currently unavailable edges.
BestResponseResult best_response(const GameContext& ctx, std::size_t op,
                                 const std::vector<DesignStrategy>& profile,
                                 const NetworkState& base, double budget_cap,
                                 const SearchOptions& search = {});

/// Gauss-Seidel best-response iteration in operator order. `budgets[i]` is the
/// Stage-1 cap (1 - beta_i) B_i.
EquilibriumResult solve_ne(const GameContext& ctx, const NetworkState& base,
                           const std::vector<double>& budgets, const SolverOptions& options = {});

NeCertificate verify_ne(const GameContext& ctx, const NetworkState& base,
                        const std::vector<double>& budgets,
                        const std::vector<DesignStrategy>& profile,
                        const SolverOptions& options = {});

/// Stage-1 budget caps (1 - beta_i) B_i for the context's operators.
std::vector<double> stage1_budgets(const GameContext& ctx, const std::vector<double>& betas);

}  // namespace ndg
