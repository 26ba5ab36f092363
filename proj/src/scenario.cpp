#include "ndg/scenario.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "ndg/errors.hpp"
#include "parallel.hpp"

namespace ndg {

void Scenario::validate() const {
  if (!network) throw InputError("scenario has no network");
  if (operators.empty()) throw InputError("scenario needs at least one operator");
  if (years < 1) throw InputError("horizon must cover at least one year");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw InputError("demand growth must be non-negative");
  for (const auto& op : operators) op.validate();
  for (std::size_t k = 0; k < beta_schedule.size(); ++k) {
    if (beta_schedule[k].size() != operators.size())
      throw InputError("beta schedule row " + std::to_string(k + 1) +
                       " must list one beta per operator");
    for (double b : beta_schedule[k])
      if (!(b >= 0.0 && b <= 1.0)) throw InputError("beta must lie in [0, 1]");
  }
  if (!epsilon.empty() && epsilon.size() != operators.size())
    throw InputError("epsilon must list one flag per operator");
  econ.validate();
  design.validate();
  if (!(solver.tol_s > 0.0) || !(solver.eps_dev > 0.0) || solver.max_rounds == 0)
    throw InputError("solver tolerances must be positive");
}

std::vector<double> Scenario::betas(std::size_t year) const {
  if (beta_schedule.empty()) return std::vector<double>(operators.size(), 0.0);
  return beta_schedule[std::min(year, beta_schedule.size()) - 1];
}

std::vector<bool> Scenario::share_flags() const {
  return epsilon.empty() ? std::vector<bool>(operators.size(), true) : epsilon;
}

double Scenario::demand_factor(std::size_t year) const {
  return std::pow(1.0 + tau, static_cast<double>(year - 1));
}

GameContext make_context(const Scenario& s, const std::vector<RoutePair>& routes,
                         std::size_t year) {
  return GameContext(*s.network, routes, s.demand.scaled(s.demand_factor(year)), s.operators,
                     s.econ, s.design);
}

namespace {

std::vector<double> totals(const std::vector<PayoffBreakdown>& p) {
  std::vector<double> out;
  for (const auto& b : p) out.push_back(b.total);
  return out;
}

PayoffBreakdown summed(const std::vector<PayoffBreakdown>& p) {
  PayoffBreakdown s;
  for (const auto& b : p) {
    s.emissions += b.emissions;
    s.travel_cost += b.travel_cost;
    s.profit += b.profit;
    s.total += b.total;
  }
  return s;
}

}  // namespace

YearResult run_year(const Scenario& s, const GameContext& ctx, std::size_t year,
                    const NetworkState& start, const std::vector<double>& betas,
                    const EquilibriumResult* disagreement) {
  YearResult r;
  r.year = year;
  r.demand_factor = s.demand_factor(year);
  r.betas = betas;
  try {
    r.stage1 = solve_ne(ctx, start, stage1_budgets(ctx, betas), s.solver);
    const bool no_coinvest =
        std::all_of(betas.begin(), betas.end(), [](double b) { return b == 0.0; });
    if (s.disagreement == DisagreementMode::Stage1 || no_coinvest)
      r.disagreement = r.stage1;
    else if (disagreement)
      r.disagreement = *disagreement;
    else
      r.disagreement = solve_ne(ctx, start, stage1_budgets(ctx, std::vector<double>(betas.size(), 0.0)),
                                s.solver);
    r.coinvest = co_invest(ctx, r.stage1.state, betas, s.solver.search);

    SharingInput in;
    in.disagreement = totals(r.disagreement.payoffs);
    in.stage1_payoff = totals(r.stage1.payoffs);
    in.stage1_cost = r.stage1.costs;
    in.coinvest_payoff = totals(r.coinvest.per_operator);
    std::vector<double> contributions;
    for (std::size_t i = 0; i < betas.size(); ++i)
      contributions.push_back(betas[i] * s.operators[i].budget);
    in.weights = bargaining_weights(s.weights_mode, contributions);
    in.share = s.share_flags();
    r.sharing = share_payoff(in);
  } catch (const InputError& e) {
    throw InputError("year " + std::to_string(year) + ": " + e.what());
  } catch (const InvariantError& e) {
    throw InvariantError("year " + std::to_string(year) + ": " + e.what());
  }
  r.end_state = r.coinvest.state.carried_forward();
  return r;
}

std::vector<ImprovementRow> improvement_report(const std::vector<YearResult>& treatment,
                                               const std::vector<YearResult>& baseline,
                                               const std::vector<SystemOptimalYear>& optimum) {
  if (treatment.size() != baseline.size())
    throw InvariantError("treatment and baseline cover different horizons");
  std::vector<ImprovementRow> rows;
  for (std::size_t k = 0; k < treatment.size(); ++k) {
    const auto t = summed(treatment[k].coinvest.per_operator);
    const auto b = summed(baseline[k].coinvest.per_operator);
    ImprovementRow row;
    row.year = treatment[k].year;
    row.d_emissions = t.emissions - b.emissions;
    row.d_travel_cost = t.travel_cost - b.travel_cost;
    row.d_profit = t.profit - b.profit;
    row.d_total = t.total - b.total;
    row.coinvest_spend = treatment[k].coinvest.pooled_budget;
    if (k < optimum.size()) {
      const auto o = summed(optimum[k].design.per_operator);
      auto pct = [&](double d, double d_opt) -> std::optional<double> {
        if (d_opt == 0.0) return std::nullopt;
        double v = 100.0 * d / d_opt;
        if (v > 100.0) {
          row.pct_clamped = true;
          v = 100.0;
        }
        return v;
      };
      row.pct_emissions = pct(row.d_emissions, o.emissions - b.emissions);
      row.pct_travel_cost = pct(row.d_travel_cost, o.travel_cost - b.travel_cost);
      row.pct_profit = pct(row.d_profit, o.profit - b.profit);
      row.pct_total = pct(row.d_total, o.total - b.total);
      if (row.pct_clamped)
        spdlog::warn("year {}: improvement exceeds the system-optimal delta; clamped to 100%",
                     row.year);
    }
    rows.push_back(row);
  }
  return rows;
}

ScenarioResult run_scenario(const Scenario& s) {
  s.validate();
  const auto routes = build_routes(*s.network, s.demand);
  const auto initial = NetworkState::from_network(*s.network);
  std::vector<GameContext> contexts;
  for (std::size_t k = 1; k <= s.years; ++k) contexts.push_back(make_context(s, routes, k));

  ScenarioResult res;
  const std::vector<double> zero(s.operators.size(), 0.0);
  // Treatment, baseline and system-optimal chains are independent.
  detail::parallel_for(3, s.solver.threads, [&](std::size_t chain) {
    NetworkState state = initial;
    for (std::size_t k = 1; k <= s.years; ++k) {
      const auto& ctx = contexts[k - 1];
      if (chain == 0) {
        res.years.push_back(run_year(s, ctx, k, state, s.betas(k)));
        state = res.years.back().end_state;
      } else if (chain == 1) {
        res.baseline.push_back(run_year(s, ctx, k, state, zero));
        state = res.baseline.back().end_state;
      } else if (s.system_optimal) {
        double pooled = 0.0;
        for (const auto& op : s.operators) pooled += op.budget;
        SystemOptimalYear y{k, joint_design(ctx, state, pooled, s.solver.search)};
        state = y.design.state.carried_forward();
        res.system_optimal.push_back(std::move(y));
      }
    }
  });

  for (const auto* chain : {&res.years, &res.baseline})
    for (const auto& y : *chain)
      res.all_converged = res.all_converged && y.stage1.converged && y.disagreement.converged;
  res.improvement = improvement_report(res.years, res.baseline, res.system_optimal);
  for (const auto& row : res.improvement) res.total_coinvest += row.coinvest_spend;
  if (res.total_coinvest > 0.0) res.roi = res.improvement.back().d_total / res.total_coinvest;
  return res;
}

std::vector<std::pair<std::string, Scenario>> heterogeneity_suite(const Scenario& base) {
  if (base.operators.size() != 2) throw InputError("heterogeneity suite needs two operators");
  std::size_t r1 = 0;
  std::size_t r2 = 1;
  if (base.operators[0].region != 1) std::swap(r1, r2);
  const double budget_total = base.operators[r1].budget + base.operators[r2].budget;
  const double intra1 = base.demand.total_trips(TripType::Intra1);
  const double intra2 = base.demand.total_trips(TripType::Intra2);
  const double intra_total = intra1 + intra2;
  if (!(intra1 > 0.0) || !(intra2 > 0.0))
    throw InputError("heterogeneity suite needs intra-regional demand in both regions");

  struct Config {
    const char* label;
    double b1, b2;  // budget ratio B_1:B_2
    double d1, d2;  // intra-regional demand ratio
  };
  static constexpr Config configs[] = {
      {"Homogeneous", 1, 1, 1, 1},
      {"Higher fund, Equal pop", 3, 2, 1, 1},
      {"Equal fund, Less pop", 1, 1, 2, 3},
      {"Higher fund, Higher pop", 3, 2, 3, 2},
      {"Equal fund, Higher pop", 1, 1, 3, 2},
      {"Higher fund, Less pop", 3, 2, 2, 3},
  };
  std::vector<std::pair<std::string, Scenario>> out;
  for (const auto& c : configs) {
    Scenario s = base;
    s.name = base.name.empty() ? c.label : base.name + ": " + c.label;
    s.operators[r1].budget = budget_total * c.b1 / (c.b1 + c.b2);
    s.operators[r2].budget = budget_total * c.b2 / (c.b1 + c.b2);
    const double target1 = intra_total * c.d1 / (c.d1 + c.d2);
    const double target2 = intra_total * c.d2 / (c.d1 + c.d2);
    s.demand = base.demand.scaled_intra(target1 / intra1, target2 / intra2);
    out.emplace_back(c.label, std::move(s));
  }
  return out;
}

SweepResult sweep_cir(const Scenario& s, const std::vector<double>& grid,
                      std::optional<std::size_t> vary, double mgr_threshold) {
  s.validate();
  const std::size_t n = s.operators.size();
  if (vary && *vary >= n) throw InputError("swept operator index out of range");
  for (double b : grid)
    if (!(b >= 0.0 && b <= 1.0)) throw InputError("sweep grid values must lie in [0, 1]");
  const auto routes = build_routes(*s.network, s.demand);
  const auto ctx = make_context(s, routes, 1);
  const auto start = NetworkState::from_network(*s.network);

  std::optional<EquilibriumResult> full_ne;
  if (s.disagreement == DisagreementMode::FullBudgetNe)
    full_ne = solve_ne(ctx, start, stage1_budgets(ctx, std::vector<double>(n, 0.0)), s.solver);

  SweepResult res;
  res.rows.resize(grid.size());
  auto inner = s;
  inner.solver.threads = 1;
  detail::parallel_for(grid.size(), s.solver.threads, [&](std::size_t g) {
    std::vector<double> betas = vary ? s.betas(1) : std::vector<double>(n, grid[g]);
    if (vary) betas[*vary] = grid[g];
    const auto y = run_year(inner, ctx, 1, start, betas, full_ne ? &*full_ne : nullptr);
    auto& row = res.rows[g];
    row.betas = betas;
    row.cir = y.coinvest.cir;
    row.f_co = y.coinvest.total_payoff;
    row.v = y.sharing.final_payoff;
    row.phi = y.sharing.disagreement;
    row.feasible = y.sharing.feasible;
  });

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, double>> curve;
    for (const auto& row : res.rows) curve.emplace_back(row.betas[i], row.v[i]);
    std::optional<double> mgr;
    if (!res.rows.empty() && res.rows.front().phi[i] != 0.0) {
      // phi is shared by all rows unless it follows the Stage-1 outcome.
      bool ok = false;
      double m = 0.0;
      for (const auto& row : res.rows) {
        if (row.betas[i] < mgr_threshold || row.phi[i] == 0.0) continue;
        const double rel = analyze_mgr({{row.betas[i], row.v[i]}}, row.phi[i], mgr_threshold);
        m = ok ? std::min(m, rel) : rel;
        ok = true;
      }
      if (ok) mgr = m;
    }
    res.mgr.push_back(mgr);
    res.set.push_back(detect_set(curve));
  }
  return res;
}

}  // namespace ndg
