#include <doctest.h>

#include "fixtures.hpp"
#include "ndg/errors.hpp"

using namespace ndg;

namespace {

struct Single {
  MobilityNetwork net;
  std::size_t pt, alt;
};

// One PT edge (l = 1 km or 2 km) with a parallel ALT substitute.
Single single(double pt_len = 1.0, double sub_len = 1.0) {
  fx::NetBuilder b;
  b.alt_node("a", 1).alt_node("b", 1).alt_node("z", 2).pt_node("pa", 1).pt_node("pb", 1);
  b.alt2("ab", "a", "b", sub_len).alt2("bz", "b", "z", 1.0);
  b.pt("p", "pa", "pb", pt_len);
  b.transfer("a", "pa").transfer("b", "pb");
  auto net = b.build();
  const auto pt = net.edge_index("p");
  const auto alt = net.edge_index("abf");
  return {std::move(net), pt, alt};
}

}  // namespace

TEST_CASE("applying a strategy") {
  auto s = single();
  DesignParams design;
  const auto base = NetworkState::from_network(s.net);

  DesignStrategy h;
  h.decisions[s.pt] = {true, 10.0};
  const auto st = apply_strategies(s.net, base, {h}, design);
  CHECK(st.avail[s.pt]);
  CHECK(st.cap[s.pt] == doctest::Approx(600.0));
  CHECK(st.new_build[s.pt]);

  CHECK(apply_strategies(s.net, base, {DesignStrategy{}}, design) == base);

  DesignStrategy bad;
  bad.decisions[s.pt] = {false, 3.0};
  CHECK_THROWS_AS(apply_strategies(s.net, base, {bad}, design), InputError);

  DesignStrategy too_fast;
  too_fast.decisions[s.pt] = {true, design.s_max + 1.0};
  CHECK_THROWS_AS(apply_strategies(s.net, base, {too_fast}, design), InputError);
}

TEST_CASE("strategy cost") {
  auto s = single(2.0);
  DesignStrategy h;
  h.decisions[s.pt] = {true, 5.0};
  CHECK(strategy_cost(s.net, h, 91.0, 84.0) == doctest::Approx(1022.0));
  CHECK(strategy_cost(s.net, DesignStrategy{}, 91.0, 84.0) == 0.0);
  DesignStrategy h10 = h;
  h10.decisions[s.pt].frequency = 10.0;
  CHECK(strategy_cost(s.net, h10, 91.0, 84.0) - strategy_cost(s.net, h, 91.0, 84.0) ==
        doctest::Approx(84.0 * 2.0 * 5.0));
}

TEST_CASE("payoff components") {
  auto s = single();
  OperatorConfig op = fx::make_operator(s.net, "o", 1, 0.0);
  const EconomicParams econ;
  const DesignParams design;
  auto st = NetworkState::from_network(s.net);
  FlowField f;
  f.flow.assign(s.net.edge_count(), 0.0);

  const auto zero = payoff(op, s.net, f, st, econ, design);
  CHECK(zero.emissions == 0.0);
  CHECK(zero.travel_cost == 0.0);
  CHECK(zero.profit == 0.0);
  CHECK(zero.total == 0.0);

  st.avail[s.pt] = true;
  f.flow[s.pt] = 1000.0;
  op.cost_base = 0.0;
  auto pt = payoff(op, s.net, f, st, econ, design);
  CHECK(pt.profit == doctest::Approx(92.0));

  f.flow[s.pt] = 0.0;
  f.flow[s.alt] = 1000.0;
  CHECK(payoff(op, s.net, f, st, econ, design).emissions == doctest::Approx(148.0));

  SUBCASE("base cost basis") {
    op.cost_base = 91.0;
    f.flow[s.alt] = 0.0;
    CHECK(payoff(op, s.net, f, st, econ, design).profit == doctest::Approx(-91.0));
    DesignParams nb = design;
    nb.profit_cost_basis = ProfitCostBasis::NewBuild;
    CHECK(payoff(op, s.net, f, st, econ, nb).profit == 0.0);
    st.new_build[s.pt] = true;
    CHECK(payoff(op, s.net, f, st, econ, nb).profit == doctest::Approx(-91.0));
  }
}

TEST_CASE("convexity certificate") {
  const EconomicParams econ;
  SUBCASE("unit edge with unit substitute") {
    auto s = single();
    const auto op = fx::make_operator(s.net, "o", 1, 0.0);
    const auto c = convexity_certificate(op, s.net, econ);
    REQUIRE(c.entries.size() == 1);
    CHECK(c.entries[0].delta == doctest::Approx(0.698).epsilon(1e-12));
    CHECK(c.holds);
  }
  SUBCASE("profit-only weights always hold") {
    auto s = single(3.0, 0.5);
    const auto op = fx::make_operator(s.net, "o", 1, 0.0, {0.0, 0.0, 1.0});
    const auto c = convexity_certificate(op, s.net, econ);
    CHECK(c.entries[0].delta == doctest::Approx(3.0 * econ.pt_fee));
    CHECK(c.holds);
  }
  SUBCASE("negligible substitute without profit weight fails") {
    auto s = single(2.0, 1e-9);
    const auto op = fx::make_operator(s.net, "o", 1, 0.0, {1.0, 1.0, 0.0});
    const auto c = convexity_certificate(op, s.net, econ);
    CHECK(c.entries[0].delta < 0.0);
    CHECK_FALSE(c.holds);
    CHECK_FALSE(c.entries[0].holds);
  }
}
