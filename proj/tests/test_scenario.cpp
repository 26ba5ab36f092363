#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "ndg/errors.hpp"
#include "ndg/scenario.hpp"

using namespace ndg;

namespace {

YearResult fake_year(std::size_t year, double total, double pooled) {
  YearResult y;
  y.year = year;
  PayoffBreakdown p;
  p.emissions = total / 2;
  p.travel_cost = total / 4;
  p.profit = total / 4;
  p.total = total;
  y.coinvest.per_operator = {p};
  y.coinvest.pooled_budget = pooled;
  return y;
}

}  // namespace

TEST_CASE("scenario validation") {
  auto s = fx::mirrored(1000.0, 500.0, 100.0).scenario(2, {{0.2, 0.2}});
  CHECK_NOTHROW(s.validate());
  auto bad = s;
  bad.years = 0;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = s;
  bad.beta_schedule = {{0.2, 1.5}};
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = s;
  bad.tau = -0.01;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = s;
  bad.beta_schedule = {{0.2}};
  CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("beta schedule repeats its last row") {
  auto s = fx::mirrored(1000.0, 500.0, 100.0).scenario(3, {{0.1, 0.2}, {0.3, 0.4}});
  CHECK(s.betas(1) == std::vector<double>{0.1, 0.2});
  CHECK(s.betas(2) == std::vector<double>{0.3, 0.4});
  CHECK(s.betas(3) == std::vector<double>{0.3, 0.4});
  s.beta_schedule.clear();
  CHECK(s.betas(2) == std::vector<double>{0.0, 0.0});
}

TEST_CASE("demand grows geometrically") {
  auto inst = fx::mirrored(1000.0, 500.0, 100.0);
  auto s = inst.scenario(3, {});
  CHECK(s.demand_factor(1) == 1.0);
  CHECK(s.demand_factor(3) == doctest::Approx(1.015 * 1.015).epsilon(1e-15));
  const auto routes = build_routes(*s.network, s.demand);
  const auto ctx = make_context(s, routes, 3);
  auto reqs = s.demand.requests();
  for (auto& r : reqs) r.trips *= 1.015 * 1.015;
  const DemandTable d3(*s.network, reqs);
  const auto start = inst.start();
  const auto want = assign_flows(*s.network, routes, d3, start, s.econ);
  const auto got = ctx.flows(start);
  for (std::size_t e = 0; e < want.flow.size(); ++e)
    CHECK(got.flow[e] == doctest::Approx(want.flow[e]).epsilon(1e-12));
}

TEST_CASE("no co-investment means no improvement") {
  auto s = fx::mirrored(1500.0, 700.0, 200.0).scenario(1, {{0.0, 0.0}});
  const auto r = run_scenario(s);
  REQUIRE(r.improvement.size() == 1);
  const auto& row = r.improvement[0];
  CHECK(row.d_emissions == 0.0);
  CHECK(row.d_travel_cost == 0.0);
  CHECK(row.d_profit == 0.0);
  CHECK(row.d_total == 0.0);
  CHECK(r.total_coinvest == 0.0);
  CHECK(r.roi == 0.0);
  CHECK(r.all_converged);
}

TEST_CASE("mirrored scenario pays both operators equally") {
  // The pooled budget never binds here, so Stage 2 has a unique optimum. A
  // binding pool may split between mirror-equivalent edges either way.
  auto s = fx::mirrored(20000.0, 800.0, 500.0).scenario(3, {{0.5, 0.5}});
  const auto r = run_scenario(s);
  REQUIRE(r.years.size() == 3);
  for (const auto& y : r.years) {
    CHECK(y.coinvest.spend < y.coinvest.pooled_budget);
    CHECK(y.sharing.final_payoff[0] ==
          doctest::Approx(y.sharing.final_payoff[1]).epsilon(1e-9));
    CHECK(y.stage1.payoffs[0].total == doctest::Approx(y.stage1.payoffs[1].total).epsilon(1e-9));
  }
}

TEST_CASE("multi-year ledger") {
  auto s = fx::mirrored(2400.0, 800.0, 500.0).scenario(3, {{0.25, 0.25}, {0.1, 0.4}});
  const auto r = run_scenario(s);
  REQUIRE(r.years.size() == 3);
  double spend = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& y = r.years[k];
    const auto caps = std::vector<double>{(1.0 - y.betas[0]) * 2400.0, (1.0 - y.betas[1]) * 2400.0};
    for (std::size_t i = 0; i < 2; ++i) CHECK(y.stage1.costs[i] <= caps[i] + 1e-9);
    CHECK(y.coinvest.spend <= y.coinvest.pooled_budget + 1e-9);
    CHECK(y.coinvest.pooled_budget == doctest::Approx(2400.0 * (y.betas[0] + y.betas[1])));
    spend += y.coinvest.pooled_budget;
    if (k > 0) {
      // Built edges persist from one year to the next.
      const auto& prev = r.years[k - 1].end_state;
      for (std::size_t e = 0; e < prev.avail.size(); ++e)
        if (prev.avail[e]) CHECK(y.coinvest.state.avail[e]);
    }
  }
  CHECK(r.total_coinvest == doctest::Approx(spend));
  CHECK(r.roi == doctest::Approx(r.improvement.back().d_total / spend));
}

TEST_CASE("baseline reruns are identical") {
  auto s = fx::mirrored(2000.0, 800.0, 300.0).scenario(2, {{0.2, 0.2}});
  const auto a = run_scenario(s);
  const auto b = run_scenario(s);
  for (std::size_t k = 0; k < a.baseline.size(); ++k) {
    CHECK(a.baseline[k].end_state == b.baseline[k].end_state);
    CHECK(a.baseline[k].coinvest.total_payoff == b.baseline[k].coinvest.total_payoff);
  }
}

TEST_CASE("heterogeneity configurations") {
  auto inst = fx::mirrored(1000.0, 600.0, 100.0);
  inst.ops[0].budget = 1300.0;
  inst.ops[1].budget = 700.0;
  const auto base = inst.scenario(1, {});
  const auto suite = heterogeneity_suite(base);
  REQUIRE(suite.size() == 6);
  const double intra = base.demand.total_trips(TripType::Intra1) +
                       base.demand.total_trips(TripType::Intra2);
  const double inter = base.demand.total_trips(TripType::Inter1) +
                       base.demand.total_trips(TripType::Inter2);

  struct Want {
    const char* label;
    double b, d;  // share of region 1
  };
  const Want want[] = {{"Homogeneous", 0.5, 0.5},           {"Higher fund, Equal pop", 0.6, 0.5},
                       {"Equal fund, Less pop", 0.5, 0.4},  {"Higher fund, Higher pop", 0.6, 0.6},
                       {"Equal fund, Higher pop", 0.5, 0.6}, {"Higher fund, Less pop", 0.6, 0.4}};
  for (std::size_t c = 0; c < 6; ++c) {
    const auto& [label, s] = suite[c];
    CHECK(label == want[c].label);
    CHECK(s.operators[0].budget + s.operators[1].budget == doctest::Approx(2000.0));
    CHECK(s.operators[0].budget == doctest::Approx(2000.0 * want[c].b));
    CHECK(s.demand.total_trips(TripType::Intra1) == doctest::Approx(intra * want[c].d));
    CHECK(s.demand.total_trips(TripType::Intra2) == doctest::Approx(intra * (1.0 - want[c].d)));
    CHECK(s.demand.total_trips(TripType::Inter1) + s.demand.total_trips(TripType::Inter2) ==
          doctest::Approx(inter));
  }
}

TEST_CASE("improvement accounting") {
  SUBCASE("baseline against itself") {
    const std::vector<YearResult> base{fake_year(1, 100.0, 0.0), fake_year(2, 120.0, 0.0)};
    for (const auto& row : improvement_report(base, base, {})) {
      CHECK(row.d_total == 0.0);
      CHECK(row.d_emissions == 0.0);
      CHECK_FALSE(row.pct_total.has_value());
    }
  }
  SUBCASE("percent of the optimum is clamped") {
    const std::vector<YearResult> base{fake_year(1, 100.0, 0.0)};
    const std::vector<YearResult> treat{fake_year(1, 160.0, 500.0)};
    SystemOptimalYear opt;
    opt.year = 1;
    opt.design.per_operator = fake_year(1, 150.0, 0.0).coinvest.per_operator;
    const auto rows = improvement_report(treat, base, {opt});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].d_total == doctest::Approx(60.0));
    CHECK(*rows[0].pct_total == 100.0);
    CHECK(rows[0].pct_clamped);
    CHECK(rows[0].coinvest_spend == 500.0);
  }
  SUBCASE("percent below the optimum") {
    const std::vector<YearResult> base{fake_year(1, 100.0, 0.0)};
    const std::vector<YearResult> treat{fake_year(1, 125.0, 50.0)};
    SystemOptimalYear opt;
    opt.design.per_operator = fake_year(1, 200.0, 0.0).coinvest.per_operator;
    const auto rows = improvement_report(treat, base, {opt});
    CHECK(*rows[0].pct_total == doctest::Approx(25.0));
    CHECK(*rows[0].pct_emissions == doctest::Approx(25.0));
    CHECK_FALSE(rows[0].pct_clamped);
  }
  SUBCASE("mismatched horizons") {
    CHECK_THROWS_AS(improvement_report({fake_year(1, 1.0, 0.0)}, {}, {}), InvariantError);
  }
}

TEST_CASE("sweep rows follow the grid") {
  auto s = fx::mirrored(2000.0, 700.0, 400.0).scenario(1, {{0.0, 0.0}});
  std::vector<double> grid;
  for (int k = 0; k <= 4; ++k) grid.push_back(0.25 * k);
  const auto sw = sweep_cir(s, grid, std::nullopt, 0.0);
  REQUIRE(sw.rows.size() == 5);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    CHECK(sw.rows[g].betas == std::vector<double>{grid[g], grid[g]});
    CHECK(sw.rows[g].v.size() == 2);
    if (sw.rows[g].feasible) {
      for (std::size_t i = 0; i < 2; ++i) CHECK(sw.rows[g].v[i] >= sw.rows[g].phi[i] - 1e-9);
    }
  }
  CHECK_THROWS_AS(sweep_cir(s, {1.5}, std::nullopt, 0.0), InputError);
  CHECK_THROWS_AS(sweep_cir(s, grid, std::size_t{5}, 0.0), InputError);
}
