#include "learners.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <tuple>

#include <spdlog/spdlog.h>

#include "csv.hpp"
#include "error.hpp"

namespace routesim {

std::string_view to_string(LearnerKind k) noexcept {
  switch (k) {
    case LearnerKind::iql: return "iql";
    case LearnerKind::vdn: return "vdn";
    case LearnerKind::random: return "random";
  }
  return "iql";
}

LearnerKind parse_learner_kind(std::string_view name) {
  for (auto k : {LearnerKind::iql, LearnerKind::vdn, LearnerKind::random})
    if (to_string(k) == name) return k;
  fail(ErrorCode::invalid_argument, "unknown learner '" + std::string(name) + "'");
}

QTable::QTable(std::vector<double> defaults) : defaults_(std::move(defaults)) {
  if (defaults_.empty()) fail(ErrorCode::invalid_argument, "Q-table needs at least one action");
}

std::span<const double> QTable::values(const std::string& key) const {
  auto it = table_.find(key);
  return it == table_.end() ? std::span<const double>(defaults_) : std::span<const double>(it->second);
}

double QTable::value(const std::string& key, std::size_t action) const {
  return values(key)[action];
}

void QTable::set(const std::string& key, std::size_t action, double v) {
  if (action >= defaults_.size()) fail(ErrorCode::invalid_argument, "Q-table action out of range");
  if (!std::isfinite(v)) fail(ErrorCode::invalid_argument, "Q-table values must be finite");
  auto it = table_.try_emplace(key, defaults_).first;
  it->second[action] = v;
}

QTable make_qtable(const RouteSet& routes) {
  std::vector<double> defaults;
  for (const auto& r : routes.routes) defaults.push_back(-r.fftime);
  return QTable(std::move(defaults));
}

std::size_t greedy_action(std::span<const double> values) {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

std::size_t select_action(const QTable& q, const std::string& key, double eps, Rng& rng) {
  if (eps > 0.0 && uniform01(rng) < eps) return uniform_index(rng, q.n_actions());
  return greedy_action(q.values(key));
}

void iql_update(QTable& q, const std::string& key, std::size_t action, double reward, double eta) {
  const double old = q.value(key, action);
  q.set(key, action, old + eta * (reward - old));
}

void vdn_update(std::map<AgentId, QTable>& tables, std::span<const JointStep> joint,
                double team_reward, double eta) {
  std::set<AgentId> members;
  for (const auto& s : joint) {
    if (!tables.count(s.agent) || !members.insert(s.agent).second)
      fail(ErrorCode::invalid_argument, "VDN joint step does not match the agent tables");
  }
  if (members.size() != tables.size())
    fail(ErrorCode::invalid_argument, "VDN joint step does not cover every agent table");
  double q_tot = 0.0;
  for (const auto& s : joint) q_tot += tables.at(s.agent).value(s.key, s.action);
  const double delta = eta * (team_reward - q_tot);
  for (const auto& s : joint) {
    auto& q = tables.at(s.agent);
    q.set(s.key, s.action, q.value(s.key, s.action) + delta);
  }
}

double TrainSchedule::epsilon_at(std::size_t episode) const noexcept {
  if (episodes <= 1) return epsilon_start;
  const double frac = std::min(1.0, static_cast<double>(episode) / static_cast<double>(episodes - 1));
  return epsilon_start + (epsilon_end - epsilon_start) * frac;
}

void validate(const TrainSchedule& s) {
  if (s.episodes < 1) fail(ErrorCode::invalid_argument, "training episodes must be >= 1");
  if (!(s.epsilon_start >= 0.0 && s.epsilon_start <= 1.0) ||
      !(s.epsilon_end >= 0.0 && s.epsilon_end <= 1.0) || s.epsilon_start < s.epsilon_end)
    fail(ErrorCode::invalid_argument, "epsilon must satisfy 0 <= epsilon_end <= epsilon_start <= 1");
  if (!(s.learn_rate > 0.0 && s.learn_rate <= 1.0))
    fail(ErrorCode::invalid_argument, "learn_rate must be in (0, 1]");
}

Policies make_policies(const Environment& env, LearnerKind kind) {
  Policies p;
  p.kind = kind;
  for (AgentId id : env.av_ids()) p.tables.emplace(id, make_qtable(env.routes(id)));
  return p;
}

namespace {

std::map<AgentId, Rng> streams(const Environment& env, const std::string& prefix) {
  std::map<AgentId, Rng> out;
  for (AgentId id : env.av_ids())
    out.emplace(id, Rng(derive_seed(env.seed(), prefix + std::to_string(id))));
  return out;
}

double mean_reward(const EpisodeEnd& end) {
  if (end.rewards.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [id, r] : end.rewards) total += r;
  return total / static_cast<double>(end.rewards.size());
}

}  // namespace

EpisodeEnd play_episode(Environment& env, const Policies& policies, double eps,
                        std::map<AgentId, Rng>& explore, std::vector<JointStep>* steps) {
  Turn turn = env.reset();
  while (true) {
    std::optional<std::size_t> action;
    if (turn.kind == AgentKind::av) {
      auto table = policies.tables.find(turn.agent);
      if (table == policies.tables.end())
        fail(ErrorCode::invalid_state, "no policy for AV " + std::to_string(turn.agent));
      auto rng = explore.try_emplace(turn.agent, derive_seed(env.seed(), "explore/" + std::to_string(turn.agent)))
                     .first;
      std::string key = observation_key(turn.observation);
      action = policies.kind == LearnerKind::random
                   ? static_cast<std::size_t>(uniform_index(rng->second, turn.n_actions))
                   : select_action(table->second, key, eps, rng->second);
      if (steps) steps->push_back({turn.agent, std::move(key), *action});
    }
    auto result = env.step(action);
    if (auto* end = std::get_if<EpisodeEnd>(&result)) return std::move(*end);
    turn = std::get<Turn>(std::move(result));
  }
}

void run_human_phase(Environment& env, std::size_t episodes, const EpisodeCallback& on_episode) {
  if (env.phase() != Phase::human_only)
    fail(ErrorCode::invalid_state, "human learning runs before mutation");
  const Policies greedy = make_policies(env, LearnerKind::iql);
  auto rngs = streams(env, "explore/");
  for (std::size_t e = 0; e < episodes; ++e) {
    const EpisodeEnd end = play_episode(env, greedy, 0.0, rngs);
    if (on_episode) on_episode(end);
  }
}

TrainResult train(Environment& env, LearnerKind kind, const TrainSchedule& schedule,
                  const EpisodeCallback& on_episode) {
  if (env.phase() != Phase::training) fail(ErrorCode::invalid_state, "train() needs the training phase");
  validate(schedule);
  const auto avs = env.av_ids();
  if (kind == LearnerKind::vdn) {
    for (AgentId id : avs) {
      if (!(env.agent(id).weights == env.agent(avs.front()).weights))
        fail(ErrorCode::invalid_argument, "VDN needs a shared team reward: all AVs must use the same behavior weights");
    }
  }

  TrainResult result;
  result.policies = make_policies(env, kind);
  auto rngs = streams(env, "explore/");
  std::vector<JointStep> steps;
  for (std::size_t e = 0; e < schedule.episodes; ++e) {
    steps.clear();
    const EpisodeEnd end = play_episode(env, result.policies, schedule.epsilon_at(e), rngs, &steps);
    switch (kind) {
      case LearnerKind::iql:
        for (const auto& s : steps)
          iql_update(result.policies.tables.at(s.agent), s.key, s.action, end.rewards.at(s.agent),
                     schedule.learn_rate);
        break;
      case LearnerKind::vdn: {
        double team = 0.0;
        for (const auto& [id, r] : end.rewards) team += r;
        if (!steps.empty()) vdn_update(result.policies.tables, steps, team, schedule.learn_rate);
        break;
      }
      case LearnerKind::random: break;
    }
    result.reward_trace.push_back(mean_reward(end));
    if (on_episode) on_episode(end);
  }
  spdlog::info("trained {} AVs with {} for {} episodes", avs.size(), to_string(kind), schedule.episodes);
  return result;
}

Evaluation evaluate(Environment& env, const Policies& policies, std::size_t n_episodes,
                    const EpisodeCallback& on_episode) {
  if (env.phase() == Phase::training) env.start_testing();
  if (env.phase() != Phase::testing) fail(ErrorCode::invalid_state, "evaluate() needs a trained environment");
  if (n_episodes < 1) fail(ErrorCode::invalid_argument, "evaluate() needs at least one episode");
  auto rngs = streams(env, "test/");
  Evaluation eval;
  for (std::size_t e = 0; e < n_episodes; ++e) {
    const EpisodeEnd end = play_episode(env, policies, 0.0, rngs);
    for (const auto& o : end.outcomes)
      eval.records.push_back({end.day, end.phase, o.id, o.kind, o.origin, o.dest, o.route_index,
                              o.departure, o.travel_time, o.reward});
    if (on_episode) on_episode(end);
  }
  eval.kpi = summarize(eval.records).phases.at(Phase::testing);
  return eval;
}

void write_policies(std::ostream& out, const Policies& policies) {
  out << "agent,obs_key,action,value\n";
  for (const auto& [agent, q] : policies.tables) {
    for (std::size_t a = 0; a < q.n_actions(); ++a)
      out << agent << ",default," << a << ',' << csv::format_number(q.defaults()[a]) << '\n';
    for (const auto& [key, values] : q.entries())
      for (std::size_t a = 0; a < values.size(); ++a)
        out << agent << ',' << key << ',' << a << ',' << csv::format_number(values[a]) << '\n';
  }
}

Policies read_policies(std::istream& in, LearnerKind kind) {
  csv::LineReader reader(in);
  auto header = reader.next();
  if (!header || csv::split_row(*header) != std::vector<std::string>{"agent", "obs_key", "action", "value"})
    fail(ErrorCode::parse, "policy file must start with header 'agent,obs_key,action,value'");
  std::map<AgentId, std::vector<double>> defaults;
  std::vector<std::tuple<AgentId, std::string, std::size_t, double>> entries;
  while (auto line = reader.next()) {
    const std::string where = "policy line " + std::to_string(reader.line_number());
    auto f = csv::split_row(*line);
    if (f.size() != 4) fail(ErrorCode::parse, where + ": expected 4 fields");
    const AgentId agent = csv::parse_int(f[0], where + " agent");
    const auto action = static_cast<std::size_t>(csv::parse_int(f[2], where + " action"));
    const double value = csv::parse_double(f[3], where + " value");
    if (f[1] == "default") {
      auto& d = defaults[agent];
      if (action != d.size()) fail(ErrorCode::parse, where + ": default actions out of sequence");
      d.push_back(value);
    } else {
      entries.emplace_back(agent, f[1], action, value);
    }
  }
  Policies p;
  p.kind = kind;
  for (auto& [agent, d] : defaults) p.tables.emplace(agent, QTable(std::move(d)));
  for (const auto& [agent, key, action, value] : entries) {
    auto it = p.tables.find(agent);
    if (it == p.tables.end())
      fail(ErrorCode::parse, "policy entry for agent " + std::to_string(agent) + " without defaults");
    it->second.set(key, action, value);
  }
  return p;
}

}  // namespace routesim
