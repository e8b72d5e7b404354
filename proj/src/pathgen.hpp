#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "netgraph.hpp"

namespace routesim {

struct Route {
  std::vector<EdgeIndex> edges;
  std::string origin;
  std::string dest;
  double fftime = 0.0;  // s

  bool operator==(const Route&) const = default;
};

/// Action space of one OD pair. Routes are distinct, sorted by free-flow
/// time (ties by edge-id sequence), and within the detour bound.
struct RouteSet {
  std::string origin;
  std::string dest;
  std::vector<Route> routes;

  bool operator==(const RouteSet&) const = default;
};

struct RouteGenParams {
  std::size_t k = 3;
  double penalty = 1.3;
  double max_detour = 2.0;
};

/// Iterative penalty method: repeatedly take the shortest path on working
/// weights and inflate the weights of its edges by `penalty`.
RouteSet generate_routes(const Network& net, std::string_view origin,
                         std::string_view dest, const RouteGenParams& params);

Route make_route(const Network& net, std::vector<EdgeIndex> edges);

/// Structural check: incidence, simplicity, endpoints, fftime sum.
bool is_valid_route(const Network& net, const Route& route);

std::string edge_sequence(const Network& net, const Route& route);

void write_route_sets(std::ostream& out, const Network& net,
                      std::span<const RouteSet> sets);
std::vector<RouteSet> read_route_sets(std::istream& in, const Network& net);

}  // namespace routesim
