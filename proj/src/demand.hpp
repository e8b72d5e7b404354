#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "behaviors.hpp"
#include "humans.hpp"
#include "netgraph.hpp"

namespace routesim {

using AgentId = std::int64_t;

enum class AgentKind { human, av };

std::string_view to_string(AgentKind k) noexcept;
AgentKind parse_agent_kind(std::string_view name);

struct AgentSpec {
  AgentId id = 0;
  std::string origin;
  std::string dest;
  std::int64_t departure = 0;  // s
  AgentKind kind = AgentKind::human;
  std::optional<Behavior> behavior;        // set iff kind == av
  std::optional<BehaviorWeights> weights;  // per-agent override of the preset
  HumanModelParams human;                  // used while kind == human

  bool operator==(const AgentSpec& o) const {
    return id == o.id && origin == o.origin && dest == o.dest && departure == o.departure &&
           kind == o.kind && behavior == o.behavior && weights == o.weights;
  }
};

struct OdPair {
  std::string origin;
  std::string dest;
  double weight = 1.0;
};

struct DemandConfig {
  std::size_t n_agents = 1;
  std::vector<OdPair> od_pairs;
  std::int64_t window_start = 0;  // s
  std::int64_t window_end = 3600;
  std::uint64_t seed = 0;
};

/// All agents start as humans; departures uniform over the inclusive window.
std::vector<AgentSpec> generate_demand(const Network& net, const DemandConfig& cfg);

std::vector<AgentSpec> parse_demand(std::istream& in, const Network& net);
std::vector<AgentSpec> load_demand(const std::filesystem::path& path, const Network& net);
void write_demand(std::ostream& out, std::span<const AgentSpec> agents);

/// Enforces AgentSpec invariants (ids unique, known nodes, origin != dest).
void validate_agents(std::span<const AgentSpec> agents, const Network& net);

/// Agents ordered by (departure, id).
std::vector<AgentId> departure_order(std::span<const AgentSpec> agents);

}  // namespace routesim
