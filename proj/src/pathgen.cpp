#include "pathgen.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "csv.hpp"
#include "error.hpp"

namespace routesim {

namespace {

std::vector<std::string_view> edge_ids(const Network& net, const Route& r) {
  std::vector<std::string_view> ids;
  ids.reserve(r.edges.size());
  for (EdgeIndex e : r.edges) ids.push_back(net.edge(e).id);
  return ids;
}

}  // namespace

Route make_route(const Network& net, std::vector<EdgeIndex> edges) {
  if (edges.empty()) fail(ErrorCode::invalid_argument, "route must contain at least one edge");
  Route r;
  r.origin = net.node(net.tail(edges.front())).id;
  r.dest = net.node(net.head(edges.back())).id;
  for (EdgeIndex e : edges) r.fftime += net.edge(e).free_flow_time();
  r.edges = std::move(edges);
  return r;
}

bool is_valid_route(const Network& net, const Route& route) {
  if (route.edges.empty()) return false;
  for (EdgeIndex e : route.edges)
    if (e >= net.edges().size()) return false;
  if (net.node(net.tail(route.edges.front())).id != route.origin) return false;
  if (net.node(net.head(route.edges.back())).id != route.dest) return false;
  std::set<NodeIndex> visited{net.tail(route.edges.front())};
  double fftime = 0.0;
  for (std::size_t i = 0; i < route.edges.size(); ++i) {
    const EdgeIndex e = route.edges[i];
    if (i > 0 && net.tail(e) != net.head(route.edges[i - 1])) return false;
    if (!visited.insert(net.head(e)).second) return false;
    fftime += net.edge(e).free_flow_time();
  }
  return fftime == route.fftime;
}

RouteSet generate_routes(const Network& net, std::string_view origin,
                         std::string_view dest, const RouteGenParams& params) {
  if (params.k < 1) fail(ErrorCode::invalid_argument, "route generation: k must be >= 1");
  if (!(params.penalty > 1.0))
    fail(ErrorCode::invalid_argument, "route generation: penalty must be > 1");
  if (!(params.max_detour >= 1.0))
    fail(ErrorCode::invalid_argument, "route generation: max_detour must be >= 1");

  const NodeIndex o = net.node_index(origin);
  const NodeIndex d = net.node_index(dest);
  std::vector<double> working = net.free_flow_times();

  RouteSet set{std::string(origin), std::string(dest), {}};
  std::set<std::vector<EdgeIndex>> seen;
  double base = 0.0;
  const std::size_t max_iterations = 10 * params.k;
  for (std::size_t it = 0; it < max_iterations && set.routes.size() < params.k; ++it) {
    auto path = shortest_path(net, o, d, working);
    for (EdgeIndex e : path) working[e] *= params.penalty;
    if (!seen.insert(path).second) continue;
    Route route = make_route(net, std::move(path));
    // The first path is found on pure free-flow weights, so it is the fastest.
    if (set.routes.empty()) base = route.fftime;
    if (route.fftime / base > params.max_detour) continue;
    set.routes.push_back(std::move(route));
  }

  std::sort(set.routes.begin(), set.routes.end(), [&](const Route& a, const Route& b) {
    if (a.fftime != b.fftime) return a.fftime < b.fftime;
    return edge_ids(net, a) < edge_ids(net, b);
  });
  return set;
}

std::string edge_sequence(const Network& net, const Route& route) {
  std::string out;
  for (std::size_t i = 0; i < route.edges.size(); ++i) {
    if (i) out += ';';
    out += net.edge(route.edges[i]).id;
  }
  return out;
}

void write_route_sets(std::ostream& out, const Network& net,
                      std::span<const RouteSet> sets) {
  out << "origin,dest,route_index,edge_sequence,fftime\n";
  for (const auto& set : sets) {
    for (std::size_t i = 0; i < set.routes.size(); ++i) {
      out << set.origin << ',' << set.dest << ',' << i << ','
          << edge_sequence(net, set.routes[i]) << ','
          << csv::format_number(set.routes[i].fftime) << '\n';
    }
  }
}

std::vector<RouteSet> read_route_sets(std::istream& in, const Network& net) {
  csv::LineReader reader(in);
  auto header = reader.next();
  if (!header || csv::split_row(*header) !=
                     std::vector<std::string>{"origin", "dest", "route_index",
                                              "edge_sequence", "fftime"}) {
    fail(ErrorCode::parse,
         "route file must start with header 'origin,dest,route_index,edge_sequence,fftime'");
  }
  std::vector<RouteSet> sets;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  while (auto line = reader.next()) {
    const std::string where = "routes line " + std::to_string(reader.line_number());
    auto f = csv::split_row(*line);
    if (f.size() != 5) fail(ErrorCode::parse, where + ": expected 5 fields");
    auto key = std::make_pair(f[0], f[1]);
    auto [it, inserted] = index.emplace(key, sets.size());
    if (inserted) sets.push_back(RouteSet{f[0], f[1], {}});
    auto& set = sets[it->second];
    const auto route_index = csv::parse_int(f[2], where + " route_index");
    if (route_index != static_cast<std::int64_t>(set.routes.size()))
      fail(ErrorCode::parse, where + ": route_index out of sequence");

    std::vector<EdgeIndex> edges;
    std::string_view seq = f[3];
    while (!seq.empty()) {
      auto cut = seq.find(';');
      auto id = seq.substr(0, cut);
      auto e = net.find_edge(id);
      if (!e) fail(ErrorCode::validation, where + ": unknown edge '" + std::string(id) + "'");
      edges.push_back(*e);
      seq = cut == std::string_view::npos ? std::string_view{} : seq.substr(cut + 1);
    }
    if (edges.empty()) fail(ErrorCode::parse, where + ": empty edge sequence");
    Route route = make_route(net, std::move(edges));
    if (route.origin != set.origin || route.dest != set.dest || !is_valid_route(net, route))
      fail(ErrorCode::validation, where + ": edge sequence is not a simple path for its OD pair");
    const double stated = csv::parse_double(f[4], where + " fftime");
    if (std::abs(stated - route.fftime) > 1e-9 * std::max(1.0, route.fftime))
      fail(ErrorCode::validation, where + ": fftime does not match the edge sequence");
    for (const auto& existing : set.routes)
      if (existing.edges == route.edges)
        fail(ErrorCode::duplicate_id, where + ": duplicate route");
    set.routes.push_back(std::move(route));
  }
  return sets;
}

}  // namespace routesim
