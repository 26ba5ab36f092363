#pragma once

#include <cstddef>
#include <map>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ndg {

class DemandTable;

enum class Layer { PT, ALT };
enum class EdgeKind { PT, ALT, Transfer };
enum class Scope { Region1, Region2, Crossing };

/// Region index (1 or 2) owning an edge scope, or 0 for crossing edges.
int scope_region(Scope scope) noexcept;

const char* to_string(Layer layer) noexcept;
const char* to_string(EdgeKind kind) noexcept;
const char* to_string(Scope scope) noexcept;

struct Node {
  std::string id;
  int region = 1;  // 1 or 2
  Layer layer = Layer::ALT;
};

struct EdgeLabel {
  bool available = false;      // x_e
  double capacity = 0.0;       // c_e, pax/day
  double length_km = 0.0;      // l_e
  double travel_time_h = 0.0;  // t_e, free-flow time for UE assignment
};

struct Edge {
  std::string id;
  std::size_t tail = 0;
  std::size_t head = 0;
  EdgeKind kind = EdgeKind::ALT;
  Scope scope = Scope::Region1;
  EdgeLabel label;
  /// ALT edges travelled instead of this PT edge when it is not available.
  std::vector<std::size_t> substitutes;
};

/// Raw edge description as it appears in an input document. Scope is derived on
/// construction of the network; `substitutes` empty-optional means "derive".
struct EdgeSpec {
  std::string id;
  std::string tail;
  std::string head;
  EdgeKind kind = EdgeKind::ALT;
  double length_km = 0.0;
  bool existing_available = false;
  double existing_capacity = 0.0;
  double travel_time_h = 0.0;
  std::optional<std::vector<std::string>> substitutes;
};

/// Two-region multimodal network. Immutable after construction; every
/// invariant (layers, derived scopes, substitutes, ALT connectivity) is
/// checked by the constructor, which throws InputError on violation.
class MobilityNetwork {
 public:
  MobilityNetwork(std::vector<Node> nodes, std::vector<EdgeSpec> edges);

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Node& node(std::size_t i) const { return nodes_.at(i); }
  const Edge& edge(std::size_t i) const { return edges_.at(i); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::optional<std::size_t> find_node(const std::string& id) const;
  std::optional<std::size_t> find_edge(const std::string& id) const;
  std::size_t node_index(const std::string& id) const;  // throws InputError
  std::size_t edge_index(const std::string& id) const;  // throws InputError

  const std::vector<std::size_t>& out_edges(std::size_t node) const { return out_.at(node); }

  /// PT edge indices, ascending by edge id.
  const std::vector<std::size_t>& pt_edges() const noexcept { return pt_edges_; }

  /// Sum of substitute lengths for a PT edge.
  double substitute_length(std::size_t pt_edge) const;

  /// Edges whose scope belongs to the given region (1, 2) or crossing (0).
  std::vector<std::size_t> edges_in_scope(int region, EdgeKind kind) const;

  /// Number of nodes of a layer in a region.
  std::size_t count_nodes(int region, Layer layer) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::map<std::string, std::size_t> node_ix_;
  std::map<std::string, std::size_t> edge_ix_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::size_t> pt_edges_;
};

/// Shortest path by length over the edges accepted by `allow`, ties broken by
/// fewer hops and then the lexicographically smallest edge-id sequence.
/// Returns std::nullopt if `to` is unreachable; an empty path when from == to.
std::optional<std::vector<std::size_t>> shortest_path(
    const MobilityNetwork& net, std::size_t from, std::size_t to,
    const std::function<bool(const Edge&)>& allow);

/// Routes of one travel request. `pt_route` holds the PT-prioritized path
/// (PT edges plus the transfer connectors); `alt_route` only ALT edges.
struct RoutePair {
  std::string request_id;
  std::vector<std::size_t> pt_route;
  std::vector<std::size_t> alt_route;
};

/// One RoutePair per request, in DemandTable order. PT routes are computed over
/// the full candidate PT layer and do not depend on availability.
std::vector<RoutePair> build_routes(const MobilityNetwork& net, const DemandTable& demand);

/// Checks the partition identity E = E^1 u E^2 u E^c against node regions.
bool partition_holds(const MobilityNetwork& net);

/// Checks that every edge in `route` continues where the previous one ended and
/// that the route starts at `from` and ends at `to`.
bool is_path(const MobilityNetwork& net, const std::vector<std::size_t>& route, std::size_t from,
             std::size_t to);

}  // namespace ndg
