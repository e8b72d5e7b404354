#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "behaviors.hpp"
#include "demand.hpp"
#include "humans.hpp"
#include "netgraph.hpp"
#include "pathgen.hpp"
#include "random.hpp"
#include "traffic.hpp"

namespace routesim {

enum class Phase { human_only, training, testing };

std::string_view to_string(Phase p) noexcept;
Phase parse_phase(std::string_view name);

inline constexpr std::int64_t kDepartureBucketSeconds = 600;

/// What an agent sees before choosing: per-route counts of earlier agents on
/// the same OD pair this episode, plus its coarse departure bucket.
struct Observation {
  std::vector<std::uint32_t> counts;
  std::int64_t departure_bucket = 0;

  bool operator==(const Observation&) const = default;
};

/// Count bins for tabular learners: 0 | 1-2 | 3-5 | 6+.
std::uint8_t count_bin(std::uint32_t count) noexcept;
/// Tabular key, e.g. "0.1.3@2" (bins per route, then departure bucket).
std::string observation_key(const Observation& obs);

struct MutationSpec {
  double share = 0.0;
  std::vector<AgentId> ids;  // when non-empty, overrides share
};

struct EnvSetup {
  std::shared_ptr<const Network> network;
  std::vector<AgentSpec> agents;
  std::vector<RouteSet> route_sets;  // optional; missing OD pairs are generated
  RouteGenParams route_params;
  TrafficModel traffic = Bpr{};
  double period_s = 0.0;  // <= 0: departure span of the demand, at least 1 s
  HumanModelParams human;
  double time_mult_spread = 0.0;  // time_mult ~ U[1 - s, 1 + s] per human
  bool humans_learn_in_training = false;
  bool humans_learn_in_testing = false;
  MutationSpec mutation;
  Behavior av_behavior = Behavior::selfish;
  std::uint64_t seed = 0;
};

struct AgentState {
  AgentSpec spec;
  std::size_t route_set = 0;
  CostBeliefs beliefs;
  Rng choice_rng;
  std::optional<std::size_t> last_choice;
  BehaviorWeights weights;  // AV reward weights
};

/// The agent whose turn it is.
struct Turn {
  AgentId agent = 0;
  AgentKind kind = AgentKind::human;
  std::size_t n_actions = 0;
  Observation observation;
};

struct AgentOutcome {
  AgentId id = 0;
  AgentKind kind = AgentKind::human;
  std::string origin;
  std::string dest;
  std::size_t route_index = 0;
  std::int64_t departure = 0;
  double travel_time = 0.0;
  std::optional<double> reward;  // AVs only
};

struct EpisodeEnd {
  std::uint64_t day = 0;
  Phase phase = Phase::human_only;
  std::vector<AgentOutcome> outcomes;  // departure order
  std::map<AgentId, double> rewards;   // one entry per AV
  std::vector<std::uint32_t> edge_flows;
};

using StepResult = std::variant<Turn, EpisodeEnd>;

/// Day-to-day route-choice environment. Agents act one at a time in
/// (departure, id) order; the last action of a day triggers the traffic
/// model, human learning (when enabled for the phase) and AV rewards.
///
/// Humans choose with their own model when step() receives no action; AV
/// turns require an action.
class Environment {
 public:
  explicit Environment(EnvSetup setup);

  Turn reset();
  StepResult step(std::optional<std::size_t> action = std::nullopt);

  /// Converts humans into AVs and moves to the training phase.
  std::vector<AgentId> mutation();
  void start_testing();

  Phase phase() const noexcept { return phase_; }
  std::uint64_t day() const noexcept { return day_; }
  bool episode_running() const noexcept { return running_; }
  bool humans_learning() const noexcept;
  std::uint64_t seed() const noexcept { return setup_.seed; }
  double period_s() const noexcept { return period_s_; }

  const Network& network() const noexcept { return *setup_.network; }
  std::span<const RouteSet> route_sets() const noexcept { return route_sets_; }
  std::vector<AgentId> cycle() const;
  std::vector<AgentId> agent_ids() const;
  std::vector<AgentId> av_ids() const;
  const AgentState& agent(AgentId id) const;
  const RouteSet& routes(AgentId id) const;
  const EnvSetup& setup() const noexcept { return setup_; }

 private:
  std::size_t index_of(AgentId id) const;
  Turn current_turn() const;
  std::size_t human_choice(AgentState& a);
  EpisodeEnd finish_episode();

  EnvSetup setup_;
  std::vector<RouteSet> route_sets_;
  std::vector<AgentState> agents_;  // sorted by id
  std::vector<std::size_t> cycle_;  // indices into agents_
  double period_s_ = 1.0;

  Phase phase_ = Phase::human_only;
  bool mutated_ = false;
  std::uint64_t day_ = 0;
  bool running_ = false;
  std::size_t cursor_ = 0;
  std::vector<std::size_t> choices_;  // per cycle position
};

}  // namespace routesim
