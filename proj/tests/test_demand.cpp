#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"

using namespace ndg;

namespace {

// Two ALT hops X->Y->Z (10 km each), parallel PT hops, region 2 stub.
fx::Instance two_hop(bool first_built, double cap = 0.0) {
  fx::NetBuilder b;
  b.alt_node("X", 1).alt_node("Y", 1).alt_node("Z", 1).alt_node("W", 2);
  b.pt_node("PX", 1).pt_node("PY", 1).pt_node("PZ", 1);
  b.alt2("xy", "X", "Y", 10.0).alt2("yz", "Y", "Z", 10.0).alt2("zw", "Z", "W", 1.0);
  b.pt("pxy", "PX", "PY", 10.0, first_built, first_built ? cap : 0.0);
  b.pt("pyz", "PY", "PZ", 10.0);
  b.transfer("X", "PX").transfer("Y", "PY").transfer("Z", "PZ");
  fx::Instance inst;
  inst.net = std::make_shared<MobilityNetwork>(b.build());
  return inst;
}

}  // namespace

TEST_CASE("alternative-mode utility") {
  auto inst = two_hop(false);
  const auto& net = *inst.net;
  EconomicParams p;
  RoutePair one{"r", {}, {net.edge_index("xyf")}};
  CHECK(utility_alt(net, one, p) == doctest::Approx(-11.5).epsilon(1e-12));
  RoutePair none{"o", {}, {}};
  CHECK(utility_alt(net, none, p) == 0.0);
  RoutePair two{"r2", {}, {net.edge_index("xyf"), net.edge_index("yzf")}};
  CHECK(utility_alt(net, two, p) == doctest::Approx(2 * utility_alt(net, one, p)));
}

TEST_CASE("PT utility mixes built edges and substitutes") {
  auto inst = two_hop(true, 100.0);
  const auto& net = *inst.net;
  EconomicParams p;
  const auto st = NetworkState::from_network(net);
  RoutePair built{"b", {net.edge_index("pxy")}, {}};
  CHECK(utility_pt(net, built, st, p) == doctest::Approx(-6.92).epsilon(1e-12));
  RoutePair unbuilt{"u", {net.edge_index("pyz")}, {net.edge_index("yzf")}};
  CHECK(utility_pt(net, unbuilt, st, p) == doctest::Approx(utility_alt(net, unbuilt, p)));
  RoutePair mixed{"m", {net.edge_index("pxy"), net.edge_index("pyz")}, {}};
  CHECK(utility_pt(net, mixed, st, p) == doctest::Approx(-18.42).epsilon(1e-12));
}

TEST_CASE("logit share") {
  CHECK(mode_share(-3.0, -3.0) == 0.5);
  CHECK(mode_share(std::log(3.0), 0.0) == doctest::Approx(0.75).epsilon(1e-15));
  const double tiny = mode_share(-1000.0, 0.0);
  CHECK(tiny >= 0.0);
  CHECK(tiny < 1e-300);
  CHECK(mode_share(1000.0, 0.0) == 1.0);
  // 10 km route, all PT available.
  CHECK(mode_share(-6.92, -11.5) == doctest::Approx(1.0 / (1.0 + std::exp(-(11.5 - 6.92)))));
  CHECK(mode_share(-6.92, -11.5) == doctest::Approx(0.9898).epsilon(1e-4));
}

TEST_CASE("PT flow is clipped by capacity") {
  auto inst = two_hop(true, 100.0);
  const auto& net = *inst.net;
  // p-hat = 0.9898 on the one-hop request; choose trips so demand is 120.
  const double p_hat = mode_share(-6.92, -11.5);
  DemandTable d(net, {fx::request(net, "r", "X", "Y", 120.0 / p_hat)});
  const auto routes = build_routes(net, d);
  const auto f = assign_flows(net, routes, d, NetworkState::from_network(net), EconomicParams{});
  const auto e = net.edge_index("pxy");
  CHECK(f.pt_demand[e] == doctest::Approx(120.0));
  CHECK(f.flow[e] == doctest::Approx(100.0));
}

TEST_CASE("with every PT edge available the share equals its maximum") {
  auto inst = two_hop(true, 1e6);
  const auto& net = *inst.net;
  DemandTable d(net, {fx::request(net, "a", "X", "Z", 300.0), fx::request(net, "b", "Y", "Z", 200.0)});
  const auto routes = build_routes(net, d);
  auto st = NetworkState::from_network(net);
  const auto pyz = net.edge_index("pyz");
  st.avail[pyz] = true;
  st.cap[pyz] = 1e6;
  const auto f = assign_flows(net, routes, d, st, EconomicParams{});
  for (std::size_t m = 0; m < d.size(); ++m) CHECK(f.pt_share[m] == doctest::Approx(f.max_share[m]));
  const double alt_yz = 300.0 * f.max_share[0] + 200.0 * f.max_share[1];
  CHECK(f.flow[net.edge_index("yzf")] ==
        doctest::Approx(std::max(0.0, alt_yz - f.flow[pyz])));
}

TEST_CASE("three requests with one unbuilt edge match a term-by-term expansion") {
  auto inst = two_hop(true, 150.0);
  const auto& net = *inst.net;
  const EconomicParams p;
  DemandTable d(net, {fx::request(net, "a", "X", "Z", 300.0), fx::request(net, "b", "X", "Y", 250.0),
                      fx::request(net, "c", "Y", "Z", 120.0)});
  const auto routes = build_routes(net, d);
  const auto st = NetworkState::from_network(net);
  const auto pxy = net.edge_index("pxy");
  const auto pyz = net.edge_index("pyz");
  const auto xyf = net.edge_index("xyf");
  const auto yzf = net.edge_index("yzf");

  // Hand expansion: utilities per request, then flows per edge.
  const double kp = 30.0 / 50.0 + 0.092;
  const double ka = 30.0 / 60.0 + 0.65;
  const double ua[3] = {-20.0 * ka, -10.0 * ka, -10.0 * ka};
  const double up_all[3] = {-20.0 * kp, -10.0 * kp, -10.0 * kp};
  const double up[3] = {-10.0 * kp - 10.0 * ka, -10.0 * kp, -10.0 * ka};
  const double trips[3] = {300.0, 250.0, 120.0};
  double phat[3], pm[3];
  for (int m = 0; m < 3; ++m) {
    phat[m] = 1.0 / (1.0 + std::exp(ua[m] - up_all[m]));
    pm[m] = 1.0 / (1.0 + std::exp(ua[m] - up[m]));
  }
  const double d_xy = trips[0] * pm[0] + trips[1] * pm[1];
  const double y_xy = std::min(d_xy, 150.0);
  const double alt_xy = trips[0] * phat[0] + trips[1] * phat[1] - y_xy;
  const double alt_yz = trips[0] * phat[0] + trips[2] * phat[2];

  const auto f = assign_flows(net, routes, d, st, p);
  CHECK(f.pt_demand[pxy] == doctest::Approx(d_xy).epsilon(1e-12));
  CHECK(f.flow[pxy] == doctest::Approx(y_xy).epsilon(1e-12));
  CHECK(f.flow[pyz] == 0.0);
  CHECK(f.flow[xyf] == doctest::Approx(std::max(0.0, alt_xy)).epsilon(1e-12));
  CHECK(f.flow[yzf] == doctest::Approx(alt_yz).epsilon(1e-12));

  SUBCASE("term-by-term subtraction counts each request using the PT edge") {
    const auto g = assign_flows(net, routes, d, st, p, AltFlowRule::PerRequest);
    const double literal = trips[0] * phat[0] + trips[1] * phat[1] - 2.0 * y_xy;
    CHECK(g.alt_residual[xyf] == doctest::Approx(literal).epsilon(1e-12));
    CHECK(g.flow[xyf] == doctest::Approx(std::max(0.0, literal)));
  }
}

TEST_CASE("maximum share responds to relative cost") {
  auto inst = two_hop(false);
  const auto& net = *inst.net;
  DemandTable d(net, {fx::request(net, "r", "X", "Y", 1.0)});
  const auto routes = build_routes(net, d);
  EconomicParams p;
  CHECK(max_share(net, routes, p)[0] > 0.5);
  p.pt_fee = p.alt_fee;
  p.pt_speed = p.alt_speed;
  CHECK(max_share(net, routes, p)[0] == doctest::Approx(0.5));
  CHECK(max_share(net, routes, EconomicParams{})[0] == doctest::Approx(0.9898).epsilon(1e-4));
}

TEST_CASE("precomputed demand model reproduces direct assignment") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = fx::random_line(rng, 5, 6);
    const auto& net = *inst.net;
    for (auto rule : {AltFlowRule::PerEdge, AltFlowRule::PerRequest}) {
      DemandModel model(net, inst.routes, inst.demand, inst.econ, rule);
      auto st = inst.start();
      std::bernoulli_distribution coin(0.5);
      for (auto e : net.pt_edges()) {
        if (coin(rng)) {
          st.avail[e] = true;
          st.cap[e] = 50.0 + 10.0 * static_cast<double>(e);
        }
      }
      const auto a = model.assign(st);
      const auto b = assign_flows(net, inst.routes, inst.demand, st, inst.econ, rule);
      for (std::size_t e = 0; e < net.edge_count(); ++e)
        CHECK(a.flow[e] == doctest::Approx(b.flow[e]).epsilon(1e-12));
    }
  }
}

TEST_CASE("scaling demand") {
  auto inst = fx::mirrored(1000.0, 100.0, 40.0);
  const auto total = inst.demand.total_trips();
  CHECK(inst.demand.scaled(1.015 * 1.015).total_trips() == doctest::Approx(total * 1.015 * 1.015));
  const auto s = inst.demand.scaled_intra(2.0, 1.0);
  CHECK(s.total_trips(TripType::Intra1) == doctest::Approx(2.0 * inst.demand.total_trips(TripType::Intra1)));
  CHECK(s.total_trips(TripType::Intra2) == doctest::Approx(inst.demand.total_trips(TripType::Intra2)));
}
