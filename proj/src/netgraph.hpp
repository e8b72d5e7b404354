#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace routesim {

using NodeIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;

struct Node {
  std::string id;
  std::optional<double> x;  // meters, rendering only
  std::optional<double> y;
};

struct Edge {
  std::string id;
  std::string from;
  std::string to;
  double length = 0.0;    // m
  double speed = 0.0;     // m/s
  double capacity = 0.0;  // veh/h

  double free_flow_time() const noexcept { return length / speed; }
};

/// Directed road network. Immutable once constructed; the constructor
/// enforces every structural invariant.
class Network {
 public:
  Network(std::vector<Node> nodes, std::vector<Edge> edges);

  std::span<const Node> nodes() const noexcept { return nodes_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const Node& node(NodeIndex n) const { return nodes_.at(n); }
  const Edge& edge(EdgeIndex e) const { return edges_.at(e); }

  std::optional<NodeIndex> find_node(std::string_view id) const;
  std::optional<EdgeIndex> find_edge(std::string_view id) const;
  /// Like find_node but throws Error(not_found).
  NodeIndex node_index(std::string_view id) const;
  EdgeIndex edge_index(std::string_view id) const;

  NodeIndex tail(EdgeIndex e) const noexcept { return tails_[e]; }
  NodeIndex head(EdgeIndex e) const noexcept { return heads_[e]; }
  std::span<const EdgeIndex> out_edges(NodeIndex n) const noexcept {
    return adjacency_[n];
  }

  /// Position of the edge id in lexicographic order of all edge ids.
  std::uint32_t edge_rank(EdgeIndex e) const noexcept { return ranks_[e]; }

  std::vector<double> free_flow_times() const;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, NodeIndex> node_lookup_;
  std::unordered_map<std::string, EdgeIndex> edge_lookup_;
  std::vector<NodeIndex> tails_;
  std::vector<NodeIndex> heads_;
  std::vector<std::vector<EdgeIndex>> adjacency_;
  std::vector<std::uint32_t> ranks_;
};

Network parse_network(std::istream& in);
Network load_network(const std::filesystem::path& path);
void write_network(std::ostream& out, const Network& net);

/// Minimum-weight path as an ordered edge list. Among equal-weight paths the
/// one with the lexicographically smallest edge-id sequence wins.
/// Throws Error(not_found) for unknown nodes, Error(unreachable) if no path,
/// Error(invalid_argument) if origin == dest or a weight is negative.
std::vector<EdgeIndex> shortest_path(const Network& net, NodeIndex origin,
                                     NodeIndex dest,
                                     std::span<const double> weights);
std::vector<EdgeIndex> shortest_path(const Network& net,
                                     std::string_view origin,
                                     std::string_view dest,
                                     std::span<const double> weights);

double path_weight(std::span<const EdgeIndex> path,
                   std::span<const double> weights);

}  // namespace routesim
