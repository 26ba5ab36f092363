#include <doctest.h>

#include <filesystem>

#include "fixtures.hpp"
#include "ndg/errors.hpp"
#include "ndg/io.hpp"

using namespace ndg;

namespace {

fx::NetBuilder minimal() {
  fx::NetBuilder b;
  b.alt_node("a1", 1).alt_node("a2", 2).pt_node("p1", 1).pt_node("p2", 2);
  b.alt("e12", "a1", "a2", 4.0).alt("e21", "a2", "a1", 4.0);
  b.pt("pt12", "p1", "p2", 4.0);
  b.transfer("a1", "p1").transfer("a2", "p2");
  return b;
}

}  // namespace

TEST_CASE("minimal two-region document derives scopes and substitutes") {
  auto b = minimal();
  b.alt_node("a3", 2).alt("e23", "a2", "a3", 1.0).alt("e32", "a3", "a2", 1.0);
  const auto net = b.build();
  CHECK(net.pt_edges().size() == 1);
  CHECK(net.edges_in_scope(0, EdgeKind::ALT).size() == 2);
  CHECK(net.edges_in_scope(2, EdgeKind::ALT).size() == 2);
  const auto& pt = net.edge(net.edge_index("pt12"));
  CHECK(pt.scope == Scope::Crossing);
  REQUIRE(pt.substitutes.size() == 1);
  CHECK(net.edge(pt.substitutes[0]).id == "e12");
  CHECK(net.edge(net.edge_index("e23")).scope == Scope::Region2);
  CHECK(partition_holds(net));
}

TEST_CASE("explicit empty substitute list is rejected") {
  auto b = minimal();
  b.edges[2].substitutes = std::vector<std::string>{};
  CHECK_THROWS_AS(b.build(), InputError);
}

TEST_CASE("structural errors are input errors") {
  SUBCASE("dangling endpoint") {
    auto b = minimal();
    b.alt("bad", "a1", "nowhere", 1.0);
    CHECK_THROWS_AS(b.build(), InputError);
  }
  SUBCASE("PT edge between ALT nodes") {
    auto b = minimal();
    b.pt("bad", "a1", "a2", 1.0);
    CHECK_THROWS_AS(b.build(), InputError);
  }
  SUBCASE("ALT layer not strongly connected") {
    auto b = minimal();
    b.edges.erase(b.edges.begin() + 1);
    CHECK_THROWS_AS(b.build(), InputError);
  }
  SUBCASE("capacity on an unavailable PT edge") {
    auto b = minimal();
    b.edges[2].existing_capacity = 10.0;
    CHECK_THROWS_AS(b.build(), InputError);
  }
}

TEST_CASE("Sioux Falls bundle has the expected regions") {
  const auto net = io::load_network(std::filesystem::path(NDG_DATA_DIR) / "sioux_falls" /
                                    "network.json");
  CHECK(net.count_nodes(1, Layer::ALT) == 11);
  CHECK(net.count_nodes(2, Layer::ALT) == 13);
  std::size_t alt = 0;
  for (const auto& e : net.edges()) alt += e.kind == EdgeKind::ALT;
  CHECK(alt == 76);
  CHECK(net.pt_edges().size() == 76);
  // Every PT link names its parallel road link as substitute.
  for (auto e : net.pt_edges())
    CHECK(net.substitute_length(e) == doctest::Approx(net.edge(e).label.length_km));
  CHECK(partition_holds(net));
}

TEST_CASE("routes on a line graph") {
  fx::NetBuilder b;
  for (const char* n : {"A", "B", "C"}) b.alt_node(n, 1).pt_node(std::string("P") + n, 1);
  b.alt_node("Z", 2);
  b.alt2("ab", "A", "B", 2.0).alt2("bc", "B", "C", 3.0).alt2("cz", "C", "Z", 1.0);
  b.pt("AB_pt", "PA", "PB", 2.0).pt("BC_pt", "PB", "PC", 3.0);
  for (const char* n : {"A", "B", "C"}) b.transfer(n, std::string("P") + n);
  const auto net = b.build();
  DemandTable d(net, {fx::request(net, "r", "A", "C", 10.0), fx::request(net, "o", "B", "B", 5.0)});
  const auto routes = build_routes(net, d);

  std::vector<std::string> pt_ids;
  for (auto e : routes[0].pt_route)
    if (net.edge(e).kind == EdgeKind::PT) pt_ids.push_back(net.edge(e).id);
  CHECK(pt_ids == std::vector<std::string>{"AB_pt", "BC_pt"});
  std::vector<std::string> alt_ids;
  for (auto e : routes[0].alt_route) alt_ids.push_back(net.edge(e).id);
  CHECK(alt_ids == std::vector<std::string>{"abf", "bcf"});
  CHECK(is_path(net, routes[0].pt_route, net.node_index("A"), net.node_index("C")));

  CHECK(routes[1].pt_route.empty());
  CHECK(routes[1].alt_route.empty());
  const auto flows = assign_flows(net, routes, d, NetworkState::from_network(net), EconomicParams{});
  CHECK(flows.flow[net.edge_index("abf")] == doctest::Approx(10.0 * flows.max_share[0]));
  CHECK(flows.flow[net.edge_index("cz" "f")] == 0.0);
}

TEST_CASE("equal-length ALT paths pick the smaller edge-id sequence") {
  fx::NetBuilder b;
  b.alt_node("s", 1).alt_node("m1", 1).alt_node("m2", 1).alt_node("t", 1).alt_node("z", 2);
  b.alt2("x1", "s", "m1", 1.0).alt2("x2", "m1", "t", 1.0);
  b.alt2("w1", "s", "m2", 1.0).alt2("w2", "m2", "t", 1.0);
  b.alt2("tz", "t", "z", 1.0);
  const auto net = b.build();
  const auto path = shortest_path(net, net.node_index("s"), net.node_index("t"),
                                  [](const Edge& e) { return e.kind == EdgeKind::ALT; });
  REQUIRE(path);
  // Both paths: {w1f, w2f} and {x1f, x2f}; compare as sequences.
  std::vector<std::string> ids;
  for (auto e : *path) ids.push_back(net.edge(e).id);
  CHECK(ids == std::vector<std::string>{"w1f", "w2f"});
}

TEST_CASE("substitute length sums the substitutes") {
  fx::NetBuilder b;
  b.alt_node("a", 1).alt_node("b", 1).alt_node("c", 1).alt_node("z", 2);
  b.pt_node("pa", 1).pt_node("pc", 1);
  b.alt2("a1", "a", "b", 2.0).alt2("a2", "b", "c", 3.0).alt2("cz", "c", "z", 1.0);
  b.pt("two", "pa", "pc", 4.0, false, 0.0, std::vector<std::string>{"a1f", "a2f"});
  b.pt("one", "pc", "pa", 1.0, false, 0.0, std::vector<std::string>{"a2b"});
  b.transfer("a", "pa").transfer("c", "pc");
  const auto net = b.build();
  CHECK(net.substitute_length(net.edge_index("two")) == doctest::Approx(5.0));
  CHECK(net.substitute_length(net.edge_index("one")) == doctest::Approx(3.0));
}
