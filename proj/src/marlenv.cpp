#include "marlenv.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <spdlog/spdlog.h>

#include "error.hpp"

namespace routesim {

std::string_view to_string(Phase p) noexcept {
  switch (p) {
    case Phase::human_only: return "human_only";
    case Phase::training: return "training";
    case Phase::testing: return "testing";
  }
  return "human_only";
}

Phase parse_phase(std::string_view name) {
  for (auto p : {Phase::human_only, Phase::training, Phase::testing})
    if (to_string(p) == name) return p;
  fail(ErrorCode::parse, "unknown phase '" + std::string(name) + "'");
}

std::uint8_t count_bin(std::uint32_t count) noexcept {
  if (count == 0) return 0;
  if (count <= 2) return 1;
  if (count <= 5) return 2;
  return 3;
}

std::string observation_key(const Observation& obs) {
  std::string key;
  for (std::size_t i = 0; i < obs.counts.size(); ++i) {
    if (i) key += '.';
    key += static_cast<char>('0' + count_bin(obs.counts[i]));
  }
  key += '@';
  key += std::to_string(obs.departure_bucket);
  return key;
}

Environment::Environment(EnvSetup setup) : setup_(std::move(setup)) {
  if (!setup_.network) fail(ErrorCode::invalid_argument, "environment needs a network");
  if (setup_.agents.empty()) fail(ErrorCode::invalid_argument, "environment needs at least one agent");
  const Network& net = *setup_.network;
  validate_agents(setup_.agents, net);
  validate(setup_.human);
  validate(setup_.traffic);
  if (!(setup_.time_mult_spread >= 0.0 && setup_.time_mult_spread < 1.0))
    fail(ErrorCode::invalid_argument, "time_mult_spread must be in [0, 1)");

  std::sort(setup_.agents.begin(), setup_.agents.end(),
            [](const AgentSpec& a, const AgentSpec& b) { return a.id < b.id; });

  // One route set per OD pair, in order of first appearance by agent id.
  std::map<std::pair<std::string, std::string>, std::size_t> od_index;
  for (const auto& spec : setup_.agents) {
    auto key = std::make_pair(spec.origin, spec.dest);
    if (od_index.count(key)) continue;
    auto provided = std::find_if(setup_.route_sets.begin(), setup_.route_sets.end(),
                                 [&](const RouteSet& s) {
                                   return s.origin == spec.origin && s.dest == spec.dest;
                                 });
    RouteSet set = provided != setup_.route_sets.end()
                       ? *provided
                       : generate_routes(net, spec.origin, spec.dest, setup_.route_params);
    if (set.routes.empty())
      fail(ErrorCode::validation, "empty route set for " + spec.origin + " -> " + spec.dest);
    od_index.emplace(key, route_sets_.size());
    route_sets_.push_back(std::move(set));
  }

  Rng params_rng(derive_seed(setup_.seed, "human_params"));
  std::int64_t first_dep = setup_.agents.front().departure;
  std::int64_t last_dep = first_dep;
  for (const auto& spec : setup_.agents) {
    AgentState a;
    a.spec = spec;
    a.spec.human = setup_.human;
    if (setup_.time_mult_spread > 0.0)
      a.spec.human.time_mult = 1.0 + setup_.time_mult_spread * (2.0 * uniform01(params_rng) - 1.0);
    a.route_set = od_index.at({spec.origin, spec.dest});
    a.beliefs = init_beliefs(route_sets_[a.route_set]);
    a.choice_rng.seed(derive_seed(setup_.seed, "human/" + std::to_string(spec.id)));
    if (spec.kind == AgentKind::av)
      a.weights = spec.weights ? *spec.weights : preset(*spec.behavior);
    first_dep = std::min(first_dep, spec.departure);
    last_dep = std::max(last_dep, spec.departure);
    agents_.push_back(std::move(a));
  }
  period_s_ = setup_.period_s > 0.0
                  ? setup_.period_s
                  : std::max(1.0, static_cast<double>(last_dep - first_dep));

  for (AgentId id : departure_order(setup_.agents)) cycle_.push_back(index_of(id));
  spdlog::debug("environment: {} agents, {} OD pairs, flow period {} s", agents_.size(),
                route_sets_.size(), period_s_);
}

std::size_t Environment::index_of(AgentId id) const {
  auto it = std::lower_bound(agents_.begin(), agents_.end(), id,
                             [](const AgentState& a, AgentId v) { return a.spec.id < v; });
  if (it == agents_.end() || it->spec.id != id)
    fail(ErrorCode::not_found, "unknown agent " + std::to_string(id));
  return static_cast<std::size_t>(it - agents_.begin());
}

const AgentState& Environment::agent(AgentId id) const { return agents_[index_of(id)]; }

const RouteSet& Environment::routes(AgentId id) const {
  return route_sets_[agents_[index_of(id)].route_set];
}

std::vector<AgentId> Environment::cycle() const {
  std::vector<AgentId> ids;
  for (std::size_t i : cycle_) ids.push_back(agents_[i].spec.id);
  return ids;
}

std::vector<AgentId> Environment::agent_ids() const {
  std::vector<AgentId> ids;
  for (const auto& a : agents_) ids.push_back(a.spec.id);
  return ids;
}

std::vector<AgentId> Environment::av_ids() const {
  std::vector<AgentId> ids;
  for (const auto& a : agents_)
    if (a.spec.kind == AgentKind::av) ids.push_back(a.spec.id);
  return ids;
}

bool Environment::humans_learning() const noexcept {
  switch (phase_) {
    case Phase::human_only: return true;
    case Phase::training: return setup_.humans_learn_in_training;
    case Phase::testing: return setup_.humans_learn_in_testing;
  }
  return false;
}

Turn Environment::current_turn() const {
  const AgentState& a = agents_[cycle_[cursor_]];
  Turn turn;
  turn.agent = a.spec.id;
  turn.kind = a.spec.kind;
  turn.n_actions = route_sets_[a.route_set].routes.size();
  turn.observation.counts.assign(turn.n_actions, 0);
  for (std::size_t pos = 0; pos < cursor_; ++pos) {
    if (agents_[cycle_[pos]].route_set == a.route_set) ++turn.observation.counts[choices_[pos]];
  }
  turn.observation.departure_bucket = a.spec.departure / kDepartureBucketSeconds;
  return turn;
}

Turn Environment::reset() {
  ++day_;
  running_ = true;
  cursor_ = 0;
  choices_.clear();
  return current_turn();
}

std::size_t Environment::human_choice(AgentState& a) {
  if (humans_learning()) return choose_route(a.beliefs, a.spec.human, a.choice_rng);
  // Not learning: follow the previous choice.
  return a.last_choice ? *a.last_choice : cheapest_route(a.beliefs);
}

StepResult Environment::step(std::optional<std::size_t> action) {
  if (!running_) fail(ErrorCode::invalid_state, "step() called without an active episode; call reset()");
  AgentState& a = agents_[cycle_[cursor_]];
  const std::size_t n_actions = route_sets_[a.route_set].routes.size();
  std::size_t choice = 0;
  if (action) {
    if (*action >= n_actions)
      fail(ErrorCode::invalid_argument, "action " + std::to_string(*action) +
                                            " out of range for agent " + std::to_string(a.spec.id));
    choice = *action;
  } else if (a.spec.kind == AgentKind::av) {
    fail(ErrorCode::invalid_argument, "AV agent " + std::to_string(a.spec.id) + " needs an action");
  } else {
    choice = human_choice(a);
  }
  choices_.push_back(choice);
  ++cursor_;
  if (cursor_ < cycle_.size()) return current_turn();
  return finish_episode();
}

EpisodeEnd Environment::finish_episode() {
  running_ = false;
  Assignment asg;
  asg.period_s = period_s_;
  asg.trips.reserve(cycle_.size());
  for (std::size_t pos = 0; pos < cycle_.size(); ++pos) {
    const AgentState& a = agents_[cycle_[pos]];
    asg.trips.push_back(
        {a.spec.id, a.spec.departure, route_sets_[a.route_set].routes[choices_[pos]].edges});
  }
  const EpisodeResult result = simulate(*setup_.network, setup_.traffic, asg);

  std::vector<double> av_times, human_times;
  for (std::size_t pos = 0; pos < cycle_.size(); ++pos) {
    (agents_[cycle_[pos]].spec.kind == AgentKind::av ? av_times : human_times)
        .push_back(result.travel_times[pos]);
  }

  EpisodeEnd end;
  end.day = day_;
  end.phase = phase_;
  end.edge_flows = result.edge_flows;
  const bool learn = humans_learning();
  for (std::size_t pos = 0; pos < cycle_.size(); ++pos) {
    AgentState& a = agents_[cycle_[pos]];
    const double tt = result.travel_times[pos];
    AgentOutcome out{a.spec.id, a.spec.kind,  a.spec.origin, a.spec.dest,
                     choices_[pos], a.spec.departure, tt, std::nullopt};
    if (a.spec.kind == AgentKind::av) {
      const double r = compute_reward(a.weights, group_stats(tt, av_times, human_times));
      out.reward = r;
      end.rewards.emplace(a.spec.id, r);
    } else {
      if (learn) a.beliefs = update_beliefs(std::move(a.beliefs), choices_[pos], tt, a.spec.human);
      a.last_choice = choices_[pos];
    }
    end.outcomes.push_back(std::move(out));
  }
  return end;
}

std::vector<AgentId> Environment::mutation() {
  if (mutated_ || phase_ != Phase::human_only)
    fail(ErrorCode::invalid_state, "mutation can only happen once, during the human-only phase");
  if (running_) fail(ErrorCode::invalid_state, "mutation during an episode");
  const auto& spec = setup_.mutation;
  if (!(spec.share >= 0.0 && spec.share <= 1.0))
    fail(ErrorCode::invalid_argument, "mutation share must be in [0, 1]");

  std::vector<AgentId> humans;
  for (const auto& a : agents_)
    if (a.spec.kind == AgentKind::human) humans.push_back(a.spec.id);

  std::vector<AgentId> chosen;
  if (!spec.ids.empty()) {
    std::set<AgentId> unique;
    for (AgentId id : spec.ids) {
      if (!unique.insert(id).second)
        fail(ErrorCode::invalid_argument, "agent " + std::to_string(id) + " listed twice for mutation");
      if (agents_[index_of(id)].spec.kind != AgentKind::human)
        fail(ErrorCode::invalid_argument, "agent " + std::to_string(id) + " is not a human");
    }
    chosen.assign(unique.begin(), unique.end());
  } else {
    const auto count = static_cast<std::size_t>(std::llround(spec.share * humans.size()));
    Rng rng(derive_seed(setup_.seed, "mutation"));
    for (std::size_t i = 0; i < count; ++i) {
      const auto j = i + uniform_index(rng, humans.size() - i);
      std::swap(humans[i], humans[j]);
    }
    chosen.assign(humans.begin(), humans.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(chosen.begin(), chosen.end());
  }

  for (AgentId id : chosen) {
    AgentState& a = agents_[index_of(id)];
    a.spec.kind = AgentKind::av;
    if (!a.spec.behavior) a.spec.behavior = setup_.av_behavior;
    a.weights = a.spec.weights ? *a.spec.weights : preset(*a.spec.behavior);
  }
  mutated_ = true;
  phase_ = Phase::training;
  spdlog::info("mutation on day {}: {} of {} agents became AVs", day_, chosen.size(), agents_.size());
  return chosen;
}

void Environment::start_testing() {
  if (phase_ != Phase::training) fail(ErrorCode::invalid_state, "testing must follow training");
  if (running_) fail(ErrorCode::invalid_state, "phase change during an episode");
  phase_ = Phase::testing;
}

}  // namespace routesim
