#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "ndg/ue.hpp"

using namespace ndg;

TEST_CASE("edge costs") {
  fx::NetBuilder b;
  b.alt_node("a", 1).alt_node("b", 1).alt_node("z", 2).pt_node("pa", 1).pt_node("pb", 1);
  b.alt("ab", "a", "b", 10.0, 500.0, 0.2).alt("ba", "b", "a", 10.0, 500.0, 0.2);
  b.alt2("bz", "b", "z", 1.0);
  b.pt("p", "pa", "pb", 10.0);
  b.transfer("a", "pa").transfer("b", "pb");
  const auto net = b.build();
  const EconomicParams p;
  const UEConfig cfg;
  auto st = NetworkState::from_network(net);
  const auto ab = net.edge_index("ab");
  const auto& e = net.edge(ab);
  CHECK(edge_cost(e, 0.0, st, ab, p, cfg) == doctest::Approx(30.0 * 0.2 + 10.0 * 0.65));
  CHECK(edge_cost(e, 500.0, st, ab, p, cfg) == doctest::Approx(30.0 * 0.2 * 1.15 + 10.0 * 0.65));
  const auto pi = net.edge_index("p");
  CHECK(edge_cost(net.edge(pi), 0.0, st, pi, p, cfg) == 1e8);
  st.avail[pi] = true;
  st.cap[pi] = 100.0;
  CHECK(edge_cost(net.edge(pi), 50.0, st, pi, p, cfg) == doctest::Approx(10.0 * p.pt_cost_per_km()));
  CHECK(edge_cost(net.edge(pi), 200.0, st, pi, p, cfg) ==
        doctest::Approx(10.0 * p.pt_cost_per_km() * (1.0 + 1e4)));
  const auto t = net.edge_index("t_a_pa");
  CHECK(edge_cost(net.edge(t), 10.0, st, t, p, cfg) == 0.0);
}

TEST_CASE("single path carries all demand") {
  fx::NetBuilder b;
  b.alt_node("a", 1).alt_node("b", 1).alt_node("z", 2);
  b.alt2("ab", "a", "b", 5.0).alt2("bz", "b", "z", 1.0);
  const auto net = b.build();
  DemandTable d(net, {fx::request(net, "r", "a", "b", 400.0)});
  const auto r = solve_ue(net, d, NetworkState::from_network(net), EconomicParams{});
  CHECK(r.converged);
  CHECK(r.iterations <= 1);
  CHECK(r.relative_gap == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.flows[net.edge_index("abf")] == doctest::Approx(400.0));
}

TEST_CASE("two equal parallel routes split evenly") {
  fx::NetBuilder b;
  b.alt_node("s", 1).alt_node("m1", 1).alt_node("m2", 1).alt_node("t", 1).alt_node("z", 2);
  b.alt2("u1", "s", "m1", 3.0, 300.0).alt2("u2", "m1", "t", 3.0, 300.0);
  b.alt2("v1", "s", "m2", 3.0, 300.0).alt2("v2", "m2", "t", 3.0, 300.0);
  b.alt2("tz", "t", "z", 1.0);
  const auto net = b.build();
  const double alpha = 900.0;
  DemandTable d(net, {fx::request(net, "r", "s", "t", alpha)});
  UEConfig cfg;
  cfg.gap_tol = 1e-8;
  const auto r = solve_ue(net, d, NetworkState::from_network(net), EconomicParams{}, cfg);
  CHECK(std::abs(r.flows[net.edge_index("u1f")] - alpha / 2) <= 1e-3 * alpha);
  CHECK(std::abs(r.flows[net.edge_index("v1f")] - alpha / 2) <= 1e-3 * alpha);
  for (std::size_t k = 1; k < r.beckmann.size(); ++k)
    CHECK(r.beckmann[k] <= r.beckmann[k - 1] + 1e-9 * std::abs(r.beckmann[k - 1]));
}

TEST_CASE("Braess network equalizes used path costs") {
  // s->a and b->t congest; a->t and s->b are effectively constant; a->b is short.
  fx::NetBuilder b;
  b.alt_node("s", 1).alt_node("a", 1).alt_node("b", 1).alt_node("t", 1).alt_node("z", 2);
  const double cap = 200.0, t0 = 0.1, len = 1.0;
  b.alt("sa", "s", "a", len, cap, t0).alt("bt", "b", "t", len, cap, t0);
  b.alt("at", "a", "t", 2.0, 1e9, 0.5).alt("sb", "s", "b", 2.0, 1e9, 0.5);
  b.alt("ab", "a", "b", 0.01, 1e9, 0.001);
  // Return links keep the layer strongly connected; no demand uses them.
  b.alt("ts", "t", "s", 50.0).alt("ba", "b", "a", 50.0).alt2("tz", "t", "z", 1.0);
  const auto net = b.build();
  const double demand = 600.0;
  DemandTable d(net, {fx::request(net, "r", "s", "t", demand)});
  UEConfig cfg;
  cfg.gap_tol = 1e-9;
  cfg.max_iters = 200000;
  const EconomicParams p;
  const auto r = solve_ue(net, d, NetworkState::from_network(net), p, cfg);

  // By symmetry both outer paths carry x and the zig-zag z; with all three in
  // use, f(x + z) + K = 2 f(x + z) + eps, i.e. f(y) = K - eps for y = x + z.
  const double vot = p.value_of_time, fee = p.alt_fee;
  const double K = vot * 0.5 + 2.0 * fee;
  const double eps = vot * 0.001 + 0.01 * fee;
  const double target = K - eps - len * fee;  // vot t0 (1 + 0.15 (y/c)^4)
  const double y = cap * std::pow((target / (vot * t0) - 1.0) / 0.15, 0.25);
  REQUIRE(y < demand);
  REQUIRE(2.0 * y > demand);
  CHECK(r.flows[net.edge_index("sa")] == doctest::Approx(y).epsilon(1e-3));
  CHECK(r.flows[net.edge_index("bt")] == doctest::Approx(y).epsilon(1e-3));
  CHECK(r.flows[net.edge_index("ab")] == doctest::Approx(2.0 * y - demand).epsilon(5e-3));
  CHECK(r.flows[net.edge_index("at")] == doctest::Approx(demand - y).epsilon(5e-3));
}

TEST_CASE("Beckmann objective never increases") {
  auto inst = fx::mirrored(0.0, 900.0, 400.0);
  auto st = inst.start();
  const auto r = solve_ue(*inst.net, inst.demand, st, inst.econ);
  REQUIRE(r.beckmann.size() >= 2);
  for (std::size_t k = 1; k < r.beckmann.size(); ++k)
    CHECK(r.beckmann[k] <= r.beckmann[k - 1] + 1e-9 * std::abs(r.beckmann[k - 1]));
  CHECK(r.converged);
}
