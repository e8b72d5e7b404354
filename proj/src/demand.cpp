#include "demand.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>

#include "csv.hpp"
#include "error.hpp"
#include "pathgen.hpp"

namespace routesim {

std::string_view to_string(AgentKind k) noexcept {
  return k == AgentKind::human ? "human" : "av";
}

AgentKind parse_agent_kind(std::string_view name) {
  if (name == "human") return AgentKind::human;
  if (name == "av") return AgentKind::av;
  fail(ErrorCode::invalid_argument, "unknown agent kind '" + std::string(name) + "'");
}

void validate_agents(std::span<const AgentSpec> agents, const Network& net) {
  std::set<AgentId> ids;
  for (const auto& a : agents) {
    const std::string who = "agent " + std::to_string(a.id);
    if (!ids.insert(a.id).second) fail(ErrorCode::duplicate_id, "duplicate " + who);
    if (!net.find_node(a.origin))
      fail(ErrorCode::validation, who + ": unknown origin node '" + a.origin + "'");
    if (!net.find_node(a.dest))
      fail(ErrorCode::validation, who + ": unknown destination node '" + a.dest + "'");
    if (a.origin == a.dest) fail(ErrorCode::validation, who + ": origin equals destination");
    if (a.departure < 0) fail(ErrorCode::validation, who + ": departure must be >= 0");
    if (a.kind == AgentKind::av && !a.behavior)
      fail(ErrorCode::validation, who + ": AV agent needs a behavior");
  }
}

std::vector<AgentSpec> generate_demand(const Network& net, const DemandConfig& cfg) {
  if (cfg.n_agents < 1) fail(ErrorCode::invalid_argument, "demand: n_agents must be >= 1");
  if (cfg.window_start > cfg.window_end)
    fail(ErrorCode::invalid_argument, "demand: window start must not exceed window end");
  if (cfg.od_pairs.empty()) fail(ErrorCode::invalid_argument, "demand: no OD pairs");
  double total_weight = 0.0;
  for (const auto& od : cfg.od_pairs) {
    if (!(od.weight >= 0.0) || !std::isfinite(od.weight))
      fail(ErrorCode::invalid_argument, "demand: OD weights must be finite and >= 0");
    total_weight += od.weight;
    // Reachability check; throws unreachable / not_found.
    shortest_path(net, od.origin, od.dest, net.free_flow_times());
  }
  if (!(total_weight > 0.0))
    fail(ErrorCode::invalid_argument, "demand: OD weights must not all be zero");

  Rng rng(cfg.seed);
  std::vector<AgentSpec> agents;
  agents.reserve(cfg.n_agents);
  for (std::size_t i = 0; i < cfg.n_agents; ++i) {
    std::size_t pick = 0;
    if (cfg.od_pairs.size() > 1) {
      const double u = uniform01(rng) * total_weight;
      double cumulative = 0.0;
      pick = cfg.od_pairs.size() - 1;
      for (std::size_t j = 0; j < cfg.od_pairs.size(); ++j) {
        cumulative += cfg.od_pairs[j].weight;
        if (u < cumulative && cfg.od_pairs[j].weight > 0.0) {
          pick = j;
          break;
        }
      }
    }
    AgentSpec a;
    a.id = static_cast<AgentId>(i);
    a.origin = cfg.od_pairs[pick].origin;
    a.dest = cfg.od_pairs[pick].dest;
    a.departure = uniform_int(rng, cfg.window_start, cfg.window_end);
    agents.push_back(std::move(a));
  }
  return agents;
}

std::vector<AgentSpec> parse_demand(std::istream& in, const Network& net) {
  csv::LineReader reader(in);
  auto header = reader.next();
  const std::vector<std::string> base{"id", "origin", "dest", "departure", "kind", "behavior"};
  std::vector<std::string> columns;
  if (header) columns = csv::split_row(*header);
  auto with_weights = base;
  with_weights.push_back("weights");
  if (columns != base && columns != with_weights)
    fail(ErrorCode::parse, "demand file must start with header '" +
                               std::string("id,origin,dest,departure,kind,behavior[,weights]'"));
  const bool has_weights = columns.size() == with_weights.size();

  std::vector<AgentSpec> agents;
  while (auto line = reader.next()) {
    const std::string where = "demand line " + std::to_string(reader.line_number());
    auto f = csv::split_row(*line);
    if (f.size() != columns.size())
      fail(ErrorCode::parse, where + ": expected " + std::to_string(columns.size()) + " fields");
    AgentSpec a;
    a.id = csv::parse_int(f[0], where + " id");
    a.origin = f[1];
    a.dest = f[2];
    a.departure = csv::parse_int(f[3], where + " departure");
    try {
      a.kind = parse_agent_kind(f[4]);
      if (!f[5].empty()) a.behavior = parse_behavior(f[5]);
    } catch (const Error& e) {
      fail(ErrorCode::parse, where + ": " + e.what());
    }
    if (has_weights && !f[6].empty()) a.weights = parse_weights(f[6]);
    agents.push_back(std::move(a));
  }
  validate_agents(agents, net);
  return agents;
}

std::vector<AgentSpec> load_demand(const std::filesystem::path& path, const Network& net) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open demand file '" + path.string() + "'");
  return parse_demand(in, net);
}

void write_demand(std::ostream& out, std::span<const AgentSpec> agents) {
  const bool has_weights = std::any_of(agents.begin(), agents.end(),
                                       [](const AgentSpec& a) { return a.weights.has_value(); });
  out << "id,origin,dest,departure,kind,behavior" << (has_weights ? ",weights" : "") << '\n';
  for (const auto& a : agents) {
    out << a.id << ',' << a.origin << ',' << a.dest << ',' << a.departure << ','
        << to_string(a.kind) << ',' << (a.behavior ? to_string(*a.behavior) : "");
    if (has_weights) out << ',' << (a.weights ? format_weights(*a.weights) : "");
    out << '\n';
  }
}

std::vector<AgentId> departure_order(std::span<const AgentSpec> agents) {
  std::vector<const AgentSpec*> sorted;
  for (const auto& a : agents) sorted.push_back(&a);
  std::sort(sorted.begin(), sorted.end(), [](const AgentSpec* x, const AgentSpec* y) {
    return std::tie(x->departure, x->id) < std::tie(y->departure, y->id);
  });
  std::vector<AgentId> order;
  for (const auto* a : sorted) order.push_back(a->id);
  return order;
}

}  // namespace routesim
