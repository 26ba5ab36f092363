#include "ndg/cooperation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ndg/errors.hpp"

namespace ndg {

CoInvestResult joint_design(const GameContext& ctx, const NetworkState& start, double budget,
                            const SearchOptions& search) {
  DesignProblem pb;
  pb.base = start;
  for (auto e : ctx.net().pt_edges()) {
    if (start.avail[e])
      pb.raise_candidates.push_back(e);
    else
      pb.build_candidates.push_back(e);
  }
  pb.objective_ops.resize(ctx.ops().size());
  std::iota(pb.objective_ops.begin(), pb.objective_ops.end(), std::size_t{0});
  pb.budget = budget;
  auto sol = solve_design(ctx, pb, search);

  CoInvestResult r;
  r.builds = std::move(sol.builds);
  r.raises = std::move(sol.raises);
  r.state = std::move(sol.state);
  r.per_operator = ctx.evaluate(r.state);
  for (const auto& p : r.per_operator) r.total_payoff += p.total;
  r.pooled_budget = budget;
  r.spend = sol.spend;
  r.stats = sol.stats;
  return r;
}

CoInvestResult co_invest(const GameContext& ctx, const NetworkState& stage1_state,
                         const std::vector<double>& betas, const SearchOptions& search) {
  if (betas.size() != ctx.ops().size()) throw InputError("one beta per operator required");
  double pooled = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] >= 0.0 && betas[i] <= 1.0)) throw InputError("beta must lie in [0, 1]");
    pooled += betas[i] * ctx.ops()[i].budget;
    total += ctx.ops()[i].budget;
  }
  auto r = joint_design(ctx, stage1_state, pooled, search);
  r.cir = total > 0.0 ? pooled / total : 0.0;
  return r;
}

const char* to_string(WeightsMode m) noexcept {
  return m == WeightsMode::Symmetric ? "symmetric" : "contribution";
}

std::vector<double> bargaining_weights(WeightsMode mode, const std::vector<double>& contributions) {
  const std::size_t n = contributions.size();
  if (n == 0) throw InputError("bargaining needs at least one operator");
  const double sum = std::accumulate(contributions.begin(), contributions.end(), 0.0);
  if (mode == WeightsMode::Symmetric || !(sum > 0.0))
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
  std::vector<double> w;
  for (double c : contributions) {
    if (c < 0.0) throw InputError("negative co-investment contribution");
    w.push_back(c / sum);
  }
  return w;
}

bool feasibility_check(double f_co, double stage1_cost_sum, double disagreement_sum) {
  return f_co + stage1_cost_sum > disagreement_sum;
}

namespace {

// v_i = phi_i + alpha_i T maximizes the weighted product for any T > 0; the
// transfer q_i follows from v_i = kept_i + q_i.
std::vector<double> split_surplus(const std::vector<double>& kept,
                                  const std::vector<double>& disagreement,
                                  const std::vector<double>& weights, double surplus) {
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<double> q(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i)
    q[i] = disagreement[i] - kept[i] + weights[i] / wsum * surplus;
  return q;
}

void check_bargaining(const std::vector<double>& kept, const std::vector<double>& disagreement,
                      const std::vector<double>& weights) {
  const std::size_t n = kept.size();
  if (disagreement.size() != n || weights.size() != n || n == 0)
    throw InputError("bargaining vectors must have equal, non-zero length");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("bargaining weights must be non-negative");
    wsum += w;
  }
  if (!(wsum > 0.0)) throw InputError("bargaining weights must not all be zero");
}

}  // namespace

std::optional<std::vector<double>> nash_bargain(const std::vector<double>& kept, double shareable,
                                                const std::vector<double>& disagreement,
                                                const std::vector<double>& weights) {
  check_bargaining(kept, disagreement, weights);
  double surplus = shareable;
  for (std::size_t i = 0; i < kept.size(); ++i) surplus += kept[i] - disagreement[i];
  if (!(surplus > 0.0)) return std::nullopt;
  return split_surplus(kept, disagreement, weights, surplus);
}

SharingOutcome share_payoff(const SharingInput& in) {
  const std::size_t n = in.disagreement.size();
  if (n == 0 || in.stage1_payoff.size() != n || in.stage1_cost.size() != n ||
      in.coinvest_payoff.size() != n || in.weights.size() != n || in.share.size() != n)
    throw InputError("sharing inputs must cover every operator");
  SharingOutcome out;
  out.disagreement = in.disagreement;
  out.stage1_payoff = in.stage1_payoff;
  out.stage1_cost = in.stage1_cost;
  out.bargaining_weight = in.weights;
  out.share_flag = in.share;

  std::vector<double> kept(n);
  double f_co = 0.0;
  double cost_sum = 0.0;
  double phi_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = in.coinvest_payoff[i] - in.stage1_payoff[i] + in.stage1_cost[i];
    out.pool.push_back(q);
    if (in.share[i])
      out.shareable += q;
    kept[i] = in.stage1_payoff[i] + (in.share[i] ? 0.0 : q);
    f_co += in.coinvest_payoff[i];
    cost_sum += in.stage1_cost[i];
    phi_sum += in.disagreement[i];
  }

  check_bargaining(kept, in.disagreement, in.weights);
  // kept + shareable sums to F^co + sum b, so the gate is the surplus sign.
  if (!feasibility_check(f_co, cost_sum, phi_sum)) {
    out.feasible = false;
    out.allocation.assign(n, 0.0);
    out.final_payoff = in.disagreement;
    return out;
  }
  out.feasible = true;
  out.allocation = split_surplus(kept, in.disagreement, in.weights, (f_co + cost_sum) - phi_sum);
  for (std::size_t i = 0; i < n; ++i) {
    out.final_payoff.push_back(kept[i] + out.allocation[i]);
    out.surplus += out.final_payoff[i] - in.disagreement[i];
  }
  return out;
}

double analyze_mgr(const std::vector<std::pair<double, double>>& sweep, double phi,
                   double beta_threshold) {
  if (phi == 0.0) throw InputError("undefined relative return: disagreement payoff is zero");
  bool any = false;
  double best = 0.0;
  for (const auto& [beta, v] : sweep) {
    if (beta < beta_threshold) continue;
    const double rel = (v - phi) / std::abs(phi);
    best = any ? std::min(best, rel) : rel;
    any = true;
  }
  if (!any) throw InputError("no sampled beta reaches the threshold");
  return best;
}

std::optional<double> detect_set(const std::vector<std::pair<double, double>>& sweep) {
  auto pts = sweep;
  std::sort(pts.begin(), pts.end());
  if (pts.size() < 2) return std::nullopt;
  std::size_t k = pts.size() - 1;
  while (k > 0) {
    const double slope = (pts[k].second - pts[k - 1].second) / (pts[k].first - pts[k - 1].first);
    if (!(slope < 0.0)) break;
    --k;
  }
  if (k == pts.size() - 1) return std::nullopt;
  return pts[k].first;
}

}  // namespace ndg
