#include "netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <queue>

#include "csv.hpp"
#include "error.hpp"

namespace routesim {

Network::Network(std::vector<Node> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  for (NodeIndex i = 0; i < nodes_.size(); ++i) {
    const auto& id = nodes_[i].id;
    if (id.empty()) fail(ErrorCode::validation, "node with empty id");
    if (!node_lookup_.emplace(id, i).second)
      fail(ErrorCode::duplicate_id, "duplicate node id '" + id + "'");
  }
  adjacency_.resize(nodes_.size());
  tails_.reserve(edges_.size());
  heads_.reserve(edges_.size());
  for (EdgeIndex e = 0; e < edges_.size(); ++e) {
    const auto& edge = edges_[e];
    if (edge.id.empty()) fail(ErrorCode::validation, "edge with empty id");
    if (!edge_lookup_.emplace(edge.id, e).second)
      fail(ErrorCode::duplicate_id, "duplicate edge id '" + edge.id + "'");
    auto from = find_node(edge.from);
    auto to = find_node(edge.to);
    if (!from || !to) {
      fail(ErrorCode::validation,
           "edge '" + edge.id + "' references undefined node '" +
               (from ? edge.to : edge.from) + "'");
    }
    if (!(edge.length > 0.0) || !(edge.speed > 0.0) || !(edge.capacity > 0.0)) {
      fail(ErrorCode::validation,
           "edge '" + edge.id + "' must have positive length, speed and capacity");
    }
    if (!std::isfinite(edge.free_flow_time()) || !std::isfinite(edge.capacity)) {
      fail(ErrorCode::validation, "edge '" + edge.id + "' has a non-finite attribute");
    }
    tails_.push_back(*from);
    heads_.push_back(*to);
    adjacency_[*from].push_back(e);
  }

  std::vector<EdgeIndex> order(edges_.size());
  std::iota(order.begin(), order.end(), EdgeIndex{0});
  std::sort(order.begin(), order.end(), [&](EdgeIndex a, EdgeIndex b) {
    return edges_[a].id < edges_[b].id;
  });
  ranks_.resize(edges_.size());
  for (std::uint32_t r = 0; r < order.size(); ++r) ranks_[order[r]] = r;
}

std::optional<NodeIndex> Network::find_node(std::string_view id) const {
  auto it = node_lookup_.find(std::string(id));
  if (it == node_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeIndex> Network::find_edge(std::string_view id) const {
  auto it = edge_lookup_.find(std::string(id));
  if (it == edge_lookup_.end()) return std::nullopt;
  return it->second;
}

NodeIndex Network::node_index(std::string_view id) const {
  auto n = find_node(id);
  if (!n) fail(ErrorCode::not_found, "unknown node '" + std::string(id) + "'");
  return *n;
}

EdgeIndex Network::edge_index(std::string_view id) const {
  auto e = find_edge(id);
  if (!e) fail(ErrorCode::not_found, "unknown edge '" + std::string(id) + "'");
  return *e;
}

std::vector<double> Network::free_flow_times() const {
  std::vector<double> t;
  t.reserve(edges_.size());
  for (const auto& e : edges_) t.push_back(e.free_flow_time());
  return t;
}

Network parse_network(std::istream& in) {
  csv::LineReader reader(in);
  std::vector<Node> nodes;
  std::vector<Edge> edges;

  auto where = [&] { return "network line " + std::to_string(reader.line_number()); };

  auto header = reader.next();
  if (!header || csv::split_row(*header) != std::vector<std::string>{"node", "id", "x", "y"}) {
    fail(ErrorCode::parse, "network file must start with header 'node,id,x,y'");
  }

  enum class Section { nodes, edges } section = Section::nodes;
  while (auto line = reader.next()) {
    auto f = csv::split_row(*line);
    if (f.size() >= 2 && f[1] == "id") {
      if (f == std::vector<std::string>{"edge", "id", "from", "to", "length", "speed", "capacity"} &&
          section == Section::nodes) {
        section = Section::edges;
        continue;
      }
      fail(ErrorCode::parse, where() + ": unexpected header row");
    }
    if (section == Section::nodes) {
      if (f[0] != "node" || f.size() < 2 || f.size() > 4)
        fail(ErrorCode::parse, where() + ": malformed node row");
      Node n{f[1], std::nullopt, std::nullopt};
      if (f.size() > 2 && !f[2].empty()) n.x = csv::parse_double(f[2], where() + " x");
      if (f.size() > 3 && !f[3].empty()) n.y = csv::parse_double(f[3], where() + " y");
      nodes.push_back(std::move(n));
    } else {
      if (f[0] != "edge" || f.size() != 7)
        fail(ErrorCode::parse, where() + ": malformed edge row");
      edges.push_back(Edge{f[1], f[2], f[3], csv::parse_double(f[4], where() + " length"),
                           csv::parse_double(f[5], where() + " speed"),
                           csv::parse_double(f[6], where() + " capacity")});
    }
  }
  return Network(std::move(nodes), std::move(edges));
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open network file '" + path.string() + "'");
  return parse_network(in);
}

void write_network(std::ostream& out, const Network& net) {
  out << "node,id,x,y\n";
  for (const auto& n : net.nodes()) {
    out << "node," << n.id << ',' << (n.x ? csv::format_number(*n.x) : "") << ','
        << (n.y ? csv::format_number(*n.y) : "") << '\n';
  }
  out << "edge,id,from,to,length,speed,capacity\n";
  for (const auto& e : net.edges()) {
    out << "edge," << e.id << ',' << e.from << ',' << e.to << ','
        << csv::format_number(e.length) << ',' << csv::format_number(e.speed) << ','
        << csv::format_number(e.capacity) << '\n';
  }
}

namespace {

// Dijkstra label: total weight, then edge-rank sequence for tie-breaking.
// Extending a label never makes it smaller, so label-setting stays exact.
struct Label {
  double weight = 0.0;
  std::vector<std::uint32_t> ranks;
  std::vector<EdgeIndex> edges;
  NodeIndex node = 0;

  bool operator<(const Label& o) const {
    if (weight != o.weight) return weight < o.weight;
    return ranks < o.ranks;
  }
};

struct LabelAfter {
  bool operator()(const Label& a, const Label& b) const { return b < a; }
};

}  // namespace

std::vector<EdgeIndex> shortest_path(const Network& net, NodeIndex origin,
                                     NodeIndex dest,
                                     std::span<const double> weights) {
  if (origin >= net.nodes().size() || dest >= net.nodes().size())
    fail(ErrorCode::not_found, "shortest_path: node index out of range");
  if (origin == dest)
    fail(ErrorCode::invalid_argument, "shortest_path: origin equals destination");
  if (weights.size() != net.edges().size())
    fail(ErrorCode::invalid_argument, "shortest_path: one weight per edge required");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      fail(ErrorCode::invalid_argument, "shortest_path: weights must be finite and >= 0");
  }

  std::vector<std::optional<Label>> best(net.nodes().size());
  std::vector<bool> settled(net.nodes().size(), false);
  std::priority_queue<Label, std::vector<Label>, LabelAfter> queue;
  best[origin] = Label{0.0, {}, {}, origin};
  queue.push(*best[origin]);

  while (!queue.empty()) {
    Label current = queue.top();
    queue.pop();
    if (settled[current.node]) continue;
    settled[current.node] = true;
    if (current.node == dest) return std::move(current.edges);
    for (EdgeIndex e : net.out_edges(current.node)) {
      const NodeIndex next = net.head(e);
      if (settled[next]) continue;
      Label candidate{current.weight + weights[e], current.ranks, current.edges, next};
      candidate.ranks.push_back(net.edge_rank(e));
      candidate.edges.push_back(e);
      if (!best[next] || candidate < *best[next]) {
        best[next] = candidate;
        queue.push(std::move(candidate));
      }
    }
  }
  fail(ErrorCode::unreachable, "no path from '" + net.node(origin).id + "' to '" +
                                   net.node(dest).id + "'");
}

std::vector<EdgeIndex> shortest_path(const Network& net, std::string_view origin,
                                     std::string_view dest,
                                     std::span<const double> weights) {
  return shortest_path(net, net.node_index(origin), net.node_index(dest), weights);
}

double path_weight(std::span<const EdgeIndex> path, std::span<const double> weights) {
  double total = 0.0;
  for (EdgeIndex e : path) total += weights[e];
  return total;
}

}  // namespace routesim
