#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ndg/cooperation.hpp"
#include "ndg/equilibrium.hpp"
#include "ndg/network.hpp"

namespace ndg {

/// Which non-cooperative outcome serves as the bargaining fallback.
enum class DisagreementMode {
  FullBudgetNe,  // NE with beta = 0 on the same start network
  Stage1,        // the reduced-budget Stage-1 NE itself
};

struct Scenario {
  std::string name;
  std::vector<std::filesystem::path> sources;  // files read while loading
  std::shared_ptr<const MobilityNetwork> network;
  DemandTable demand;
  std::vector<OperatorConfig> operators;
  std::size_t years = 1;
  double tau = 0.015;  // yearly demand growth as a fraction
  /// beta_schedule[k][i]: operator i's ratio in year k+1. Shorter schedules
  /// repeat their last row; an empty schedule means beta = 0.
  std::vector<std::vector<double>> beta_schedule;
  std::vector<bool> epsilon;  // per operator; defaults to all true
  WeightsMode weights_mode = WeightsMode::Symmetric;
  DisagreementMode disagreement = DisagreementMode::FullBudgetNe;
  bool system_optimal = true;
  EconomicParams econ;
  DesignParams design;
  SolverOptions solver;

  void validate() const;  // throws InputError
  std::vector<double> betas(std::size_t year) const;  // 1-based year
  std::vector<bool> share_flags() const;
  double demand_factor(std::size_t year) const;  // (1 + tau)^(year - 1)
};

struct YearResult {
  std::size_t year = 0;
  double demand_factor = 1.0;
  std::vector<double> betas;
  EquilibriumResult stage1;
  EquilibriumResult disagreement;
  CoInvestResult coinvest;
  SharingOutcome sharing;
  NetworkState end_state;  // carried into the next year
};

struct SystemOptimalYear {
  std::size_t year = 0;
  CoInvestResult design;
};

struct ImprovementRow {
  std::size_t year = 0;
  double d_emissions = 0.0;    // kg/day, treatment minus baseline
  double d_travel_cost = 0.0;  // CHF/day
  double d_profit = 0.0;       // CHF/day
  double d_total = 0.0;        // CHF/day
  double coinvest_spend = 0.0;  // sum beta_i B_i in this year
  /// Percent of the system-optimal delta reached per metric; empty without a
  /// system-optimal run or when its delta is zero.
  std::optional<double> pct_emissions, pct_travel_cost, pct_profit, pct_total;
  bool pct_clamped = false;
};

struct ScenarioResult {
  std::vector<YearResult> years;
  std::vector<YearResult> baseline;
  std::vector<SystemOptimalYear> system_optimal;
  std::vector<ImprovementRow> improvement;
  double total_coinvest = 0.0;  // sum over years of sum beta_i B_i
  double roi = 0.0;             // last-year delta total / total_coinvest
  bool all_converged = true;
};

/// Game context for one year, demand scaled by the growth factor.
GameContext make_context(const Scenario& s, const std::vector<RoutePair>& routes, std::size_t year);

/// Stage 1, disagreement, Stage 2 and sharing for one year. A precomputed
/// disagreement NE may be passed to skip re-solving it.
YearResult run_year(const Scenario& s, const GameContext& ctx, std::size_t year,
                    const NetworkState& start, const std::vector<double>& betas,
                    const EquilibriumResult* disagreement = nullptr);

ScenarioResult run_scenario(const Scenario& s);

std::vector<ImprovementRow> improvement_report(const std::vector<YearResult>& treatment,
                                               const std::vector<YearResult>& baseline,
                                               const std::vector<SystemOptimalYear>& optimum);

/// The six budget/demand ratio configurations, holding total budget and total
/// intra-regional demand fixed.
std::vector<std::pair<std::string, Scenario>> heterogeneity_suite(const Scenario& base);

struct SweepRow {
  std::vector<double> betas;
  double cir = 0.0;
  double f_co = 0.0;
  std::vector<double> v;
  std::vector<double> phi;
  bool feasible = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::optional<double>> mgr;  // per operator (threshold applied)
  std::vector<std::optional<double>> set;  // per operator
};

/// CIR sweep on the first design year. With `vary` empty every operator takes
/// the grid value; otherwise only operator `*vary` does and the others keep
/// their first-year schedule value.
SweepResult sweep_cir(const Scenario& s, const std::vector<double>& grid,
                      std::optional<std::size_t> vary, double mgr_threshold);

}  // namespace ndg
