#include "ndg/ue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include <spdlog/spdlog.h>

#include "ndg/errors.hpp"
#include "parallel.hpp"

namespace ndg {

void UEConfig::validate() const {
  if (!(bpr_a >= 0.0)) throw InputError("bpr_a must be non-negative");
  if (!(bpr_b >= 1.0)) throw InputError("bpr_b must be at least 1");
  if (!(gap_tol > 0.0)) throw InputError("gap_tol must be positive");
  if (!(blocked_cost > 0.0)) throw InputError("blocked cost must be positive");
  if (!(penalty_rho >= 0.0)) throw InputError("penalty rho must be non-negative");
}

namespace {

double pt_base_cost(const Edge& edge, bool avail, const EconomicParams& p, const UEConfig& cfg) {
  return avail ? edge.label.length_km * p.pt_cost_per_km() : cfg.blocked_cost;
}

double excess(double flow, double cap) {
  if (cap <= 0.0) return flow > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return std::max(0.0, flow / cap - 1.0);
}

// Integral of edge_cost from 0 to `flow`.
double cost_integral(const Edge& edge, double flow, const NetworkState& state, std::size_t i,
                     const EconomicParams& p, const UEConfig& cfg) {
  switch (edge.kind) {
    case EdgeKind::Transfer:
      return 0.0;
    case EdgeKind::ALT: {
      const double c = state.cap[i];
      if (c <= 0.0) return cfg.blocked_cost * flow;
      const double t = p.value_of_time * edge.label.travel_time_h;
      return t * (flow + cfg.bpr_a * c * std::pow(flow / c, cfg.bpr_b + 1.0) / (cfg.bpr_b + 1.0)) +
             edge.label.length_km * p.alt_fee * flow;
    }
    case EdgeKind::PT: {
      const double base = pt_base_cost(edge, state.avail[i], p, cfg);
      const double c = state.cap[i];
      if (c <= 0.0) return cfg.blocked_cost * flow;
      const double x = excess(flow, c);
      return base * (flow + cfg.penalty_rho * c * x * x * x / 3.0);
    }
  }
  return 0.0;
}

// d edge_cost / d flow, the diagonal Hessian entry of the Beckmann objective.
double cost_slope(const Edge& edge, double flow, const NetworkState& state, std::size_t i,
                  const EconomicParams& p, const UEConfig& cfg) {
  const double c = state.cap[i];
  if (edge.kind == EdgeKind::Transfer || c <= 0.0) return 0.0;
  if (edge.kind == EdgeKind::ALT) {
    if (cfg.bpr_a == 0.0 || flow <= 0.0) return 0.0;
    return p.value_of_time * edge.label.travel_time_h * cfg.bpr_a * cfg.bpr_b *
           std::pow(flow / c, cfg.bpr_b - 1.0) / c;
  }
  return pt_base_cost(edge, state.avail[i], p, cfg) * cfg.penalty_rho * 2.0 * excess(flow, c) / c;
}

struct Tree {
  std::vector<double> dist;
  std::vector<std::size_t> pred_edge;
};

Tree dijkstra(const MobilityNetwork& net, std::size_t source, const std::vector<double>& cost) {
  constexpr auto none = std::numeric_limits<std::size_t>::max();
  Tree t{std::vector<double>(net.node_count(), std::numeric_limits<double>::infinity()),
         std::vector<std::size_t>(net.node_count(), none)};
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  t.dist[source] = 0.0;
  pq.emplace(0.0, source);
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > t.dist[u]) continue;
    for (auto e : net.out_edges(u)) {
      const auto v = net.edge(e).head;
      const double nd = d + cost[e];
      if (nd < t.dist[v]) {
        t.dist[v] = nd;
        t.pred_edge[v] = e;
        pq.emplace(nd, v);
      }
    }
  }
  return t;
}

}  // namespace

double edge_cost(const Edge& edge, double flow, const NetworkState& state, std::size_t index,
                 const EconomicParams& p, const UEConfig& cfg) {
  switch (edge.kind) {
    case EdgeKind::Transfer:
      return 0.0;
    case EdgeKind::ALT: {
      const double c = state.cap[index];
      if (c <= 0.0) return cfg.blocked_cost;
      return p.value_of_time * edge.label.travel_time_h *
                 (1.0 + cfg.bpr_a * std::pow(flow / c, cfg.bpr_b)) +
             edge.label.length_km * p.alt_fee;
    }
    case EdgeKind::PT: {
      const double base = pt_base_cost(edge, state.avail[index], p, cfg);
      const double c = state.cap[index];
      if (c <= 0.0) return cfg.blocked_cost;
      const double x = excess(flow, c);
      return base * (1.0 + cfg.penalty_rho * x * x);
    }
  }
  return 0.0;
}

UEResult solve_ue(const MobilityNetwork& net, const DemandTable& demand, const NetworkState& state,
                  const EconomicParams& p, const UEConfig& cfg) {
  cfg.validate();
  p.validate();
  const std::size_t m = net.edge_count();
  if (state.cap.size() != m || state.avail.size() != m)
    throw InputError("network state does not match the network");

  // Requests grouped by origin; one shortest-path tree per origin per iteration.
  std::map<std::size_t, std::vector<std::pair<std::size_t, double>>> by_origin;
  for (const auto& r : demand.requests())
    if (r.trips > 0.0 && r.origin != r.destination)
      by_origin[r.origin].emplace_back(r.destination, r.trips);
  std::vector<std::size_t> origins;
  for (const auto& [o, _] : by_origin) origins.push_back(o);

  auto costs_at = [&](const std::vector<double>& y) {
    std::vector<double> c(m);
    for (std::size_t e = 0; e < m; ++e) c[e] = edge_cost(net.edge(e), y[e], state, e, p, cfg);
    return c;
  };
  // All-or-nothing loading; also returns the shortest-path total cost.
  auto all_or_nothing = [&](const std::vector<double>& cost, double& sptt) {
    std::vector<std::vector<double>> partial(origins.size(), std::vector<double>(m, 0.0));
    std::vector<double> spt(origins.size(), 0.0);
    detail::parallel_for(origins.size(), cfg.threads, [&](std::size_t k) {
      const auto tree = dijkstra(net, origins[k], cost);
      for (const auto& [dest, trips] : by_origin.at(origins[k])) {
        if (!std::isfinite(tree.dist[dest]))
          throw InputError("destination unreachable in assignment network");
        spt[k] += trips * tree.dist[dest];
        for (auto v = dest; v != origins[k];) {
          const auto e = tree.pred_edge[v];
          partial[k][e] += trips;
          v = net.edge(e).tail;
        }
      }
    });
    std::vector<double> y(m, 0.0);
    sptt = 0.0;
    for (std::size_t k = 0; k < origins.size(); ++k) {
      sptt += spt[k];
      for (std::size_t e = 0; e < m; ++e) y[e] += partial[k][e];
    }
    return y;
  };
  auto beckmann = [&](const std::vector<double>& y) {
    double z = 0.0;
    for (std::size_t e = 0; e < m; ++e) z += cost_integral(net.edge(e), y[e], state, e, p, cfg);
    return z;
  };

  UEResult res;
  double sptt = 0.0;
  res.flows = all_or_nothing(costs_at(std::vector<double>(m, 0.0)), sptt);
  res.beckmann.push_back(beckmann(res.flows));
  // Conjugate Frank-Wolfe: the search target mixes the new all-or-nothing
  // load with the previous target so that successive directions are
  // conjugate under the diagonal Hessian. The target stays a convex
  // combination of all-or-nothing loads.
  std::vector<double> prev_target;
  for (res.iterations = 1; res.iterations <= cfg.max_iters; ++res.iterations) {
    const auto cost = costs_at(res.flows);
    const auto aon = all_or_nothing(cost, sptt);
    double tstt = 0.0;
    for (std::size_t e = 0; e < m; ++e) tstt += cost[e] * res.flows[e];
    res.relative_gap = tstt > 0.0 ? std::max(0.0, (tstt - sptt) / tstt) : 0.0;
    if (res.relative_gap <= cfg.gap_tol) {
      res.converged = true;
      break;
    }
    std::vector<double> target = aon;
    if (!prev_target.empty()) {
      double num = 0.0;
      double den = 0.0;
      for (std::size_t e = 0; e < m; ++e) {
        const double h = cost_slope(net.edge(e), res.flows[e], state, e, p, cfg);
        const double back = prev_target[e] - res.flows[e];
        num += back * h * (aon[e] - res.flows[e]);
        den += back * h * (aon[e] - prev_target[e]);
      }
      const double mix = den != 0.0 ? std::clamp(num / den, 0.0, 0.99) : 0.0;
      for (std::size_t e = 0; e < m; ++e) target[e] = mix * prev_target[e] + (1.0 - mix) * aon[e];
    }
    std::vector<double> dir(m);
    auto set_dir = [&] {
      for (std::size_t e = 0; e < m; ++e) dir[e] = target[e] - res.flows[e];
    };
    // Exact line search: the directional derivative of the Beckmann objective
    // is monotone in the step, so bisect on its sign.
    auto slope = [&](double lambda) {
      double s = 0.0;
      for (std::size_t e = 0; e < m; ++e) {
        if (dir[e] == 0.0) continue;
        s += edge_cost(net.edge(e), res.flows[e] + lambda * dir[e], state, e, p, cfg) * dir[e];
      }
      return s;
    };
    set_dir();
    if (slope(0.0) >= 0.0 && target != aon) {
      target = aon;
      set_dir();
    }
    double lo = 0.0;
    double hi = 1.0;
    if (slope(1.0) <= 0.0) {
      lo = 1.0;
    } else {
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (slope(mid) < 0.0)
          lo = mid;
        else
          hi = mid;
      }
    }
    const double step = lo;
    if (step <= 0.0) {
      spdlog::debug("UE line search stalled at iteration {}", res.iterations);
      break;
    }
    for (std::size_t e = 0; e < m; ++e) res.flows[e] += step * dir[e];
    res.beckmann.push_back(beckmann(res.flows));
    // A full step lands on the target; restart from a plain direction.
    if (step >= 1.0)
      prev_target.clear();
    else
      prev_target = std::move(target);
  }
  if (res.iterations > cfg.max_iters) res.iterations = cfg.max_iters;
  return res;
}

}  // namespace ndg
