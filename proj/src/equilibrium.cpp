#include "ndg/equilibrium.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "ndg/errors.hpp"
#include "parallel.hpp"

namespace ndg {

namespace {

NetworkState state_without(const GameContext& ctx, const std::vector<DesignStrategy>& profile,
                           std::size_t skip, const NetworkState& base) {
  std::vector<DesignStrategy> others;
  for (std::size_t j = 0; j < profile.size(); ++j)
    if (j != skip) others.push_back(profile[j]);
  return apply_strategies(ctx.net(), base, others, ctx.design());
}

bool same_strategy(const DesignStrategy& a, const DesignStrategy& b, double tol_s) {
  if (a.decisions.size() != b.decisions.size()) return false;
  auto ia = a.decisions.begin();
  auto ib = b.decisions.begin();
  for (; ia != a.decisions.end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second.build != ib->second.build) return false;
    if (std::abs(ia->second.frequency - ib->second.frequency) > tol_s) return false;
  }
  return true;
}

std::string profile_key(const std::vector<DesignStrategy>& profile, double tol_s) {
  std::ostringstream os;
  for (const auto& s : profile) {
    for (const auto& [e, d] : s.decisions)
      os << e << ':' << std::llround(d.frequency / tol_s) << ',';
    os << '|';
  }
  return os.str();
}

double own_payoff(const GameContext& ctx, std::size_t op, const std::vector<DesignStrategy>& profile,
                  const NetworkState& base) {
  const auto st = apply_strategies(ctx.net(), base, profile, ctx.design());
  return summed_payoff(ctx, {op}, st);
}

}  // namespace

std::vector<double> stage1_budgets(const GameContext& ctx, const std::vector<double>& betas) {
  if (betas.size() != ctx.ops().size()) throw InputError("one beta per operator required");
  std::vector<double> out;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] >= 0.0 && betas[i] <= 1.0)) throw InputError("beta must lie in [0, 1]");
    out.push_back((1.0 - betas[i]) * ctx.ops()[i].budget);
  }
  return out;
}

BestResponseResult best_response(const GameContext& ctx, std::size_t op,
                                 const std::vector<DesignStrategy>& profile,
                                 const NetworkState& base, double budget_cap,
                                 const SearchOptions& search) {
  if (op >= ctx.ops().size()) throw InvariantError("operator index out of range");
  if (!(budget_cap >= 0.0)) throw InputError("budget cap must be non-negative");
  DesignProblem pb;
  pb.base = state_without(ctx, profile, op, base);
  for (auto e : ctx.ops()[op].controllable)
    if (!pb.base.avail[e]) pb.build_candidates.push_back(e);
  pb.objective_ops = {op};
  pb.budget = budget_cap;
  const auto sol = solve_design(ctx, pb, search);

  BestResponseResult br;
  for (const auto& [e, d] : sol.builds) br.strategy.decisions[e] = d;
  br.cost = strategy_cost(ctx.net(), br.strategy, ctx.ops()[op]);
  br.payoff = ctx.evaluate(sol.state)[op];
  br.stats = sol.stats;
  return br;
}

EquilibriumResult solve_ne(const GameContext& ctx, const NetworkState& base,
                           const std::vector<double>& budgets, const SolverOptions& options) {
  const std::size_t n = ctx.ops().size();
  if (n == 0) throw InputError("at least one operator is required");
  if (budgets.size() != n) throw InputError("one budget per operator required");

  EquilibriumResult res;
  res.profile.assign(n, DesignStrategy{});
  res.stats.assign(n, SolverStats{});
  std::set<std::string> seen{profile_key(res.profile, options.tol_s)};
  for (res.rounds = 1; res.rounds <= options.max_rounds; ++res.rounds) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      auto br = best_response(ctx, i, res.profile, base, budgets[i], options.search);
      res.stats[i] = br.stats;
      if (same_strategy(br.strategy, res.profile[i], options.tol_s)) continue;
      // Keep the incumbent on ties so the iteration cannot oscillate between
      // equally good responses.
      const double current = own_payoff(ctx, i, res.profile, base);
      if (br.payoff.total <= current + 1e-9 * std::max(1.0, std::abs(current))) continue;
      res.profile[i] = std::move(br.strategy);
      changed = true;
    }
    spdlog::debug("best-response round {} changed={}", res.rounds, changed);
    // A lone operator's response cannot be disturbed by anyone else.
    if (!changed || n == 1) {
      res.converged = true;
      break;
    }
    if (!seen.insert(profile_key(res.profile, options.tol_s)).second) {
      res.cycle_detected = true;
      spdlog::warn("best-response iteration revisited a profile after {} rounds", res.rounds);
      break;
    }
  }
  if (res.rounds > options.max_rounds) res.rounds = options.max_rounds;

  res.state = apply_strategies(ctx.net(), base, res.profile, ctx.design());
  res.payoffs = ctx.evaluate(res.state);
  for (std::size_t i = 0; i < n; ++i)
    res.costs.push_back(strategy_cost(ctx.net(), res.profile[i], ctx.ops()[i]));
  if (res.converged) res.certificate = verify_ne(ctx, base, budgets, res.profile, options);
  return res;
}

NeCertificate verify_ne(const GameContext& ctx, const NetworkState& base,
                        const std::vector<double>& budgets,
                        const std::vector<DesignStrategy>& profile, const SolverOptions& options) {
  const std::size_t n = ctx.ops().size();
  if (profile.size() != n || budgets.size() != n)
    throw InputError("profile and budgets must cover every operator");
  NeCertificate cert;
  cert.gains.assign(n, 0.0);
  detail::parallel_for(n, options.threads, [&](std::size_t i) {
    const auto br = best_response(ctx, i, profile, base, budgets[i], options.search);
    cert.gains[i] = br.payoff.total - own_payoff(ctx, i, profile, base);
  });
  cert.max_gain = 0.0;
  for (double g : cert.gains) cert.max_gain = std::max(cert.max_gain, g);
  cert.passes = cert.max_gain <= options.eps_dev;
  return cert;
}

}  // namespace ndg
