#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ndg/network.hpp"

namespace ndg {

enum class TripType { Intra1, Intra2, Inter1, Inter2 };

const char* to_string(TripType t) noexcept;

struct TravelRequest {
  std::string id;
  std::size_t origin = 0;       // ALT node
  std::size_t destination = 0;  // ALT node
  double trips = 0.0;           // trips/day
  TripType type = TripType::Intra1;
};

/// Request ids are unique; origins and destinations are ALT nodes.
class DemandTable {
 public:
  DemandTable() = default;
  /// Validates against the network and derives each request's trip type.
  DemandTable(const MobilityNetwork& net, std::vector<TravelRequest> requests);

  const std::vector<TravelRequest>& requests() const noexcept { return requests_; }
  std::size_t size() const noexcept { return requests_.size(); }

  /// Copy with every request's trips multiplied by `factor`.
  DemandTable scaled(double factor) const;
  /// Copy with intra-regional trips of region 1 and 2 scaled separately.
  DemandTable scaled_intra(double factor_region1, double factor_region2) const;

  double total_trips() const;
  double total_trips(TripType t) const;

 private:
  std::vector<TravelRequest> requests_;
};

/// Classifies a request from its endpoint regions.
TripType classify_trip(const MobilityNetwork& net, std::size_t origin, std::size_t destination);

struct EconomicParams {
  double value_of_time = 30.0;   // CHF/h
  double pt_fee = 0.092;         // CHF/km/pax
  double alt_fee = 0.65;         // CHF/km/pax
  double pt_speed = 50.0;        // km/h
  double alt_speed = 60.0;       // km/h
  double pt_emission = 0.0;      // kg/km/pax
  double alt_emission = 0.148;   // kg/km/pax

  /// Generalized cost per km on PT and on the alternative mode.
  double pt_cost_per_km() const noexcept { return value_of_time / pt_speed + pt_fee; }
  double alt_cost_per_km() const noexcept { return value_of_time / alt_speed + alt_fee; }

  void validate() const;  // throws InputError
};

/// How served PT flow is removed from the ALT edges that substitute for it.
enum class AltFlowRule {
  /// Each PT edge's served flow is subtracted once from each of its substitutes.
  PerEdge,
  /// Term-by-term form: for every request whose PT route contains the PT edge,
  /// the edge's full served flow is subtracted again.
  PerRequest,
};

/// Per-PT-edge availability and capacity after design decisions.
/// `frequency` is the service frequency decided in the current design year and
/// `new_build` marks edges built in the current design year.
struct NetworkState {
  std::vector<bool> avail;
  std::vector<double> cap;
  std::vector<double> frequency;
  std::vector<bool> new_build;

  /// Existing network configuration (x-hat, c-hat) read from edge labels.
  static NetworkState from_network(const MobilityNetwork& net);
  /// Same availability and capacity, with this year's decisions folded into
  /// the existing configuration (frequency 0, no new builds).
  NetworkState carried_forward() const;

  bool operator==(const NetworkState&) const = default;
};

struct FlowField {
  std::vector<double> flow;       // y_e for every edge (0 for transfer edges)
  std::vector<double> pt_demand;  // uncapped PT demand per PT edge (0 elsewhere)
  std::vector<double> alt_residual;  // ALT flow before clamping at 0 (0 elsewhere)
  std::vector<double> pt_share;   // p_m per request
  std::vector<double> max_share;  // p-hat_m per request
};

/// Numerically stable logit share exp(u_pt) / (exp(u_alt) + exp(u_pt)).
double mode_share(double u_pt, double u_alt) noexcept;

double utility_alt(const MobilityNetwork& net, const RoutePair& route, const EconomicParams& p);
double utility_pt(const MobilityNetwork& net, const RoutePair& route, const NetworkState& state,
                  const EconomicParams& p);
/// u^P with every PT edge on the route treated as available.
double utility_pt_full(const MobilityNetwork& net, const RoutePair& route, const EconomicParams& p);

std::vector<double> max_share(const MobilityNetwork& net, const std::vector<RoutePair>& routes,
                              const EconomicParams& p);

FlowField assign_flows(const MobilityNetwork& net, const std::vector<RoutePair>& routes,
                       const DemandTable& demand, const NetworkState& state,
                       const EconomicParams& p, AltFlowRule rule = AltFlowRule::PerEdge);

/// Precomputed utility terms for repeated flow evaluation over many states.
/// Produces results identical to assign_flows.
class DemandModel {
 public:
  DemandModel(const MobilityNetwork& net, const std::vector<RoutePair>& routes,
              const DemandTable& demand, const EconomicParams& p, AltFlowRule rule);

  FlowField assign(const NetworkState& state) const;

  /// Per PT edge, the number of requests whose PT route uses it.
  const std::vector<double>& pt_route_count() const noexcept { return route_count_; }
  /// Multiplier applied to served PT flow when subtracted from substitutes.
  double subtraction_multiplier(std::size_t pt_edge) const;

  const MobilityNetwork& network() const noexcept { return *net_; }
  const EconomicParams& params() const noexcept { return params_; }
  AltFlowRule rule() const noexcept { return rule_; }

 private:
  struct RouteTerms {
    double u_alt = 0.0;
    double p_hat = 0.5;
    double trips = 0.0;
    std::vector<std::size_t> pt_edges;
    std::vector<double> built_term;    // utility contribution if available
    std::vector<double> unbuilt_term;  // utility contribution via substitutes
  };
  const MobilityNetwork* net_;
  EconomicParams params_;
  AltFlowRule rule_;
  std::vector<RouteTerms> terms_;
  std::vector<double> alt_demand_;   // sum of alpha * p-hat over ALT routes, per edge
  std::vector<double> route_count_;  // per edge
};

}  // namespace ndg
