#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

#include "ndg/errors.hpp"
#include "ndg/game.hpp"
#include "simplex.hpp"

namespace ndg {

namespace {

constexpr double kRelTol = 1e-9;

double tol_for(double v) { return kRelTol * std::max(1.0, std::abs(v)); }

enum class ColKind { Build, Raise, Relaxed };

struct Column {
  std::size_t edge;
  ColKind kind;
  double room_s;  // remaining frequency room above the state's frequency
};

struct InnerResult {
  double value = 0.0;  // exact objective (or bound when relaxed columns exist)
  NetworkState state;
  double freq_spend = 0.0;
  std::size_t pivots = 0;
};

class Searcher {
 public:
  Searcher(const GameContext& ctx, const DesignProblem& problem, const SearchOptions& options)
      : ctx_(ctx), pb_(problem), opt_(options) {
    const auto& net = ctx.net();
    in_objective_.assign(ctx.ops().size(), false);
    for (auto i : pb_.objective_ops) {
      if (i >= ctx.ops().size()) throw InvariantError("objective operator out of range");
      in_objective_[i] = true;
    }
    for (auto e : pb_.build_candidates) {
      if (net.edge(e).kind != EdgeKind::PT || pb_.base.avail[e])
        throw InvariantError("build candidate must be an unavailable PT edge");
    }
    for (auto e : pb_.raise_candidates) {
      if (net.edge(e).kind != EdgeKind::PT || !pb_.base.avail[e])
        throw InvariantError("frequency candidate must be an available PT edge");
    }
    build_fixed_cost_.resize(pb_.build_candidates.size());
    for (std::size_t k = 0; k < pb_.build_candidates.size(); ++k) {
      const auto e = pb_.build_candidates[k];
      const double l = net.edge(e).label.length_km;
      build_fixed_cost_[k] = (ctx.base_cost_rate(e) + ctx.freq_cost_rate(e)) * l;
    }
  }

  DesignSolution run() {
    if (pb_.build_candidates.size() <= opt_.exhaustive_limit)
      enumerate();
    else
      branch_and_bound();
    if (!best_) throw InvariantError("design search found no feasible design");
    return finish();
  }

 private:
  bool owned_by_objective(std::size_t e) const {
    const int o = ctx_.owner(e);
    return o >= 0 && in_objective_[static_cast<std::size_t>(o)];
  }

  const OperatorConfig* owner_op(std::size_t e) const {
    const int o = ctx_.owner(e);
    return o >= 0 ? &ctx_.ops()[static_cast<std::size_t>(o)] : nullptr;
  }

  // decision[k]: 1 build, 0 leave, -1 undecided (relaxed, bound mode only).
  std::optional<InnerResult> inner(const std::vector<std::int8_t>& decision) {
    const auto& net = ctx_.net();
    const auto& design = ctx_.design();
    NetworkState st = pb_.base;
    double budget = pb_.budget;
    double addback = 0.0;
    std::vector<Column> cols;
    for (std::size_t k = 0; k < decision.size(); ++k) {
      const auto e = pb_.build_candidates[k];
      if (decision[k] == 0) continue;
      st.avail[e] = true;
      st.new_build[e] = true;
      if (decision[k] > 0) {
        st.frequency[e] = 1.0;
        st.cap[e] = pb_.base.cap[e] + design.kappa;
        budget -= build_fixed_cost_[k];
        cols.push_back({e, ColKind::Build, design.s_max - 1.0});
      } else {
        // Optimistic relaxation: the edge is open for demand, its base cost is
        // neither charged nor budgeted, frequency may start at 0.
        const auto* op = owner_op(e);
        if (op && owned_by_objective(e))
          addback += op->weights.profit * op->cost_base * net.edge(e).label.length_km;
        cols.push_back({e, ColKind::Relaxed, design.s_max});
      }
    }
    if (budget < -tol_for(pb_.budget)) return std::nullopt;
    budget = std::max(0.0, budget);
    for (auto e : pb_.raise_candidates)
      cols.push_back({e, ColKind::Raise, std::max(0.0, design.s_max - pb_.base.frequency[e])});

    const auto flows0 = ctx_.flows(st);
    const auto pay0 = ctx_.payoffs(st, flows0);
    double f0 = addback;
    for (auto i : pb_.objective_ops) f0 += pay0[i].total;

    // Frequencies beyond demand saturation only cost money, so cap each column
    // there; within that range served flow is linear in frequency.
    const auto& econ = ctx_.econ();
    std::vector<std::size_t> active;
    std::vector<double> room;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const auto e = cols[j].edge;
      const double r = std::min(cols[j].room_s,
                                (flows0.pt_demand[e] - st.cap[e]) / design.kappa);
      if (r > 1e-12) {
        active.push_back(j);
        room.push_back(r);
      }
    }

    InnerResult res;
    if (active.empty()) {
      res.value = f0;
      res.state = std::move(st);
      return res;
    }

    std::vector<double> c;
    std::vector<double> cost_row;
    for (auto j : active) {
      const auto e = cols[j].edge;
      const double l = net.edge(e).label.length_km;
      double coef = 0.0;
      if (owned_by_objective(e)) {
        const auto& w = owner_op(e)->weights;
        const double served = l * (w.profit * econ.pt_fee - w.emission * econ.pt_emission -
                                   w.cost * econ.pt_cost_per_km());
        coef = design.kappa * served - w.profit * owner_op(e)->cost_freq * l;
      }
      c.push_back(coef);
      cost_row.push_back(ctx_.freq_cost_rate(e) * l);
    }

    // Hinge terms: an owned ALT substitute with positive residual sheds
    // min(r, kappa * sum M s') of flow, each unit saving its weight.
    struct Hinge {
      double residual;
      double weight;
      std::vector<double> coef;  // per active column
    };
    std::vector<Hinge> hinges;
    std::vector<std::int64_t> hinge_of(net.edge_count(), -1);
    for (std::size_t a = 0; a < active.size(); ++a) {
      const auto pe = cols[active[a]].edge;
      const double mult = ctx_.model().subtraction_multiplier(pe);
      for (auto se : net.edge(pe).substitutes) {
        if (!owned_by_objective(se)) continue;
        const double r = flows0.alt_residual[se];
        if (!(r > 0.0)) continue;
        if (hinge_of[se] < 0) {
          const auto& w = owner_op(se)->weights;
          const double l = net.edge(se).label.length_km;
          hinge_of[se] = static_cast<std::int64_t>(hinges.size());
          hinges.push_back({r,
                            l * (w.emission * econ.alt_emission + w.cost * econ.alt_cost_per_km()),
                            std::vector<double>(active.size(), 0.0)});
        }
        hinges[static_cast<std::size_t>(hinge_of[se])].coef[a] += design.kappa * mult;
      }
    }

    const std::size_t ns = active.size();
    const std::size_t nv = ns + hinges.size();
    for (const auto& h : hinges) c.push_back(h.weight);
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (std::size_t a = 0; a < ns; ++a) {
      std::vector<double> row(nv, 0.0);
      row[a] = 1.0;
      rows.push_back(std::move(row));
      rhs.push_back(room[a]);
    }
    {
      std::vector<double> row(nv, 0.0);
      bool any = false;
      for (std::size_t a = 0; a < ns; ++a) {
        row[a] = cost_row[a];
        any = any || cost_row[a] > 0.0;
      }
      if (any) {
        rows.push_back(std::move(row));
        rhs.push_back(budget);
      }
    }
    for (std::size_t h = 0; h < hinges.size(); ++h) {
      std::vector<double> cap_row(nv, 0.0);
      cap_row[ns + h] = 1.0;
      rows.push_back(std::move(cap_row));
      rhs.push_back(hinges[h].residual);
      std::vector<double> link(nv, 0.0);
      link[ns + h] = 1.0;
      for (std::size_t a = 0; a < ns; ++a) link[a] = -hinges[h].coef[a];
      rows.push_back(std::move(link));
      rhs.push_back(0.0);
    }
    const auto lp = detail::solve_lp(c, rows, rhs);
    res.pivots = lp.pivots;

    for (std::size_t a = 0; a < ns; ++a) {
      const double s = std::clamp(lp.x[a], 0.0, room[a]);
      if (s <= 0.0) continue;
      const auto e = cols[active[a]].edge;
      st.frequency[e] += s;
      st.cap[e] += design.kappa * s;
      res.freq_spend += cost_row[a] * s;
    }
    const bool relaxed = std::any_of(decision.begin(), decision.end(),
                                     [](std::int8_t d) { return d < 0; });
    // Exact designs are re-evaluated with the full model; the LP value is the
    // bound in relaxed mode.
    res.value = relaxed ? f0 + lp.objective : summed_payoff(ctx_, pb_.objective_ops, st);
    res.state = std::move(st);
    return res;
  }

  struct Incumbent {
    std::vector<std::int8_t> decision;
    InnerResult inner;
  };

  static bool preferred(const std::vector<std::int8_t>& a, const std::vector<std::int8_t>& b) {
    const auto ca = std::count(a.begin(), a.end(), 1);
    const auto cb = std::count(b.begin(), b.end(), 1);
    if (ca != cb) return ca < cb;
    return a > b;  // lower-indexed candidates first
  }

  void offer(const std::vector<std::int8_t>& decision, InnerResult&& r) {
    if (!best_ || r.value > best_->inner.value + tol_for(best_->inner.value) ||
        (r.value >= best_->inner.value - tol_for(best_->inner.value) &&
         preferred(decision, best_->decision))) {
      best_ = Incumbent{decision, std::move(r)};
    }
  }

  void evaluate_leaf(const std::vector<std::int8_t>& decision) {
    ++stats_.nodes_explored;
    auto r = inner(decision);
    if (!r) return;
    stats_.inner_iterations += r->pivots;
    offer(decision, std::move(*r));
  }

  void enumerate() {
    const std::size_t n = pb_.build_candidates.size();
    std::vector<std::int8_t> d(n, 0);
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      double fixed = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        d[k] = static_cast<std::int8_t>((mask >> k) & 1U);
        if (d[k]) fixed += build_fixed_cost_[k];
      }
      if (fixed > pb_.budget + tol_for(pb_.budget)) continue;
      evaluate_leaf(d);
    }
  }

  void branch_and_bound() {
    const std::size_t n = pb_.build_candidates.size();
    struct Node {
      std::vector<std::int8_t> decision;
      std::size_t depth;
      double fixed;
      double parent_bound;
    };
    std::vector<Node> stack;
    stack.push_back({std::vector<std::int8_t>(n, -1), 0, 0.0,
                     std::numeric_limits<double>::infinity()});
    {
      std::vector<std::int8_t> zero(n, 0);
      evaluate_leaf(zero);
    }
    double open_bound = -std::numeric_limits<double>::infinity();
    while (!stack.empty()) {
      if (stats_.nodes_explored >= opt_.max_nodes) {
        for (const auto& nd : stack) open_bound = std::max(open_bound, nd.parent_bound);
        limit_hit_ = true;
        break;
      }
      Node node = std::move(stack.back());
      stack.pop_back();
      if (best_ && node.parent_bound <= best_->inner.value + tol_for(best_->inner.value)) continue;
      ++stats_.nodes_explored;
      auto bound = inner(node.decision);
      if (!bound) continue;
      stats_.inner_iterations += bound->pivots;
      if (best_ && bound->value <= best_->inner.value + tol_for(best_->inner.value)) continue;
      if (node.depth == n) continue;
      // Children: leave the next candidate closed, or build it (explored first).
      Node closed = node;
      closed.decision[node.depth] = 0;
      closed.depth = node.depth + 1;
      closed.parent_bound = bound->value;
      Node open = closed;
      open.decision[node.depth] = 1;
      open.fixed = node.fixed + build_fixed_cost_[node.depth];
      stack.push_back(std::move(closed));
      if (open.fixed <= pb_.budget + tol_for(pb_.budget)) {
        // Incumbent from completing this partial design with no further builds.
        std::vector<std::int8_t> leaf = open.decision;
        for (auto& v : leaf)
          if (v < 0) v = 0;
        evaluate_leaf(leaf);
        stack.push_back(std::move(open));
      }
    }
    if (limit_hit_ && best_) {
      const double inc = best_->inner.value;
      stats_.bound_gap = std::max(0.0, open_bound - inc) / std::max(1.0, std::abs(inc));
    }
  }

  bool certified() const {
    const auto& net = ctx_.net();
    for (auto i : pb_.objective_ops) {
      if (!convexity_certificate(ctx_.ops()[i], net, ctx_.econ()).holds) return false;
    }
    return true;
  }

  DesignSolution finish() {
    DesignSolution sol;
    auto& inc = *best_;
    sol.state = inc.inner.state;
    sol.objective = inc.inner.value;
    const auto& net = ctx_.net();
    for (std::size_t k = 0; k < inc.decision.size(); ++k) {
      if (inc.decision[k] != 1) continue;
      const auto e = pb_.build_candidates[k];
      sol.builds[e] = EdgeDecision{true, sol.state.frequency[e]};
      sol.spend += ctx_.base_cost_rate(e) * net.edge(e).label.length_km;
    }
    for (auto e : pb_.raise_candidates) {
      const double ds = sol.state.frequency[e] - pb_.base.frequency[e];
      if (ds > 0.0) sol.raises[e] = ds;
    }
    for (std::size_t e = 0; e < net.edge_count(); ++e) {
      const double ds = sol.state.frequency[e] - pb_.base.frequency[e];
      if (ds > 0.0) sol.spend += ctx_.freq_cost_rate(e) * net.edge(e).label.length_km * ds;
    }
    sol.stats = stats_;
    const bool searched = pb_.build_candidates.size() > opt_.exhaustive_limit;
    sol.stats.global_optimality_unknown = searched && (limit_hit_ || !certified());
    return sol;
  }

  const GameContext& ctx_;
  const DesignProblem& pb_;
  const SearchOptions& opt_;
  std::vector<bool> in_objective_;
  std::vector<double> build_fixed_cost_;
  std::optional<Incumbent> best_;
  SolverStats stats_;
  bool limit_hit_ = false;
};

}  // namespace

DesignSolution solve_design(const GameContext& ctx, const DesignProblem& problem,
                            const SearchOptions& options) {
  if (!(problem.budget >= 0.0) || !std::isfinite(problem.budget))
    throw InputError("design budget must be a finite non-negative number");
  Searcher s(ctx, problem, options);
  return s.run();
}

}  // namespace ndg
