#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "marlenv.hpp"
#include "random.hpp"
#include "recorder.hpp"

namespace routesim {

enum class LearnerKind { iql, vdn, random };

std::string_view to_string(LearnerKind k) noexcept;
LearnerKind parse_learner_kind(std::string_view name);

/// Action values keyed by observation. Unseen keys read as the defaults
/// (negated free-flow time of each route).
class QTable {
 public:
  QTable() = default;
  explicit QTable(std::vector<double> defaults);

  std::size_t n_actions() const noexcept { return defaults_.size(); }
  std::span<const double> values(const std::string& key) const;
  double value(const std::string& key, std::size_t action) const;
  void set(const std::string& key, std::size_t action, double v);

  const std::map<std::string, std::vector<double>>& entries() const noexcept { return table_; }
  std::span<const double> defaults() const noexcept { return defaults_; }

  bool operator==(const QTable&) const = default;

 private:
  std::vector<double> defaults_;
  std::map<std::string, std::vector<double>> table_;
};

QTable make_qtable(const RouteSet& routes);

/// Index of the maximum value; ties go to the lowest index.
std::size_t greedy_action(std::span<const double> values);

/// Epsilon-greedy: with probability eps a uniform action, else greedy.
std::size_t select_action(const QTable& q, const std::string& key, double eps, Rng& rng);

/// Single-step Q update: Q <- Q + eta * (r - Q).
void iql_update(QTable& q, const std::string& key, std::size_t action, double reward, double eta);

struct JointStep {
  AgentId agent = 0;
  std::string key;
  std::size_t action = 0;
};

/// VDN: Q_tot = sum_i Q_i; every member moves by eta * (r - Q_tot), computed
/// from the pre-update values. `joint` must name exactly the agents in `tables`.
void vdn_update(std::map<AgentId, QTable>& tables, std::span<const JointStep> joint,
                double team_reward, double eta);

struct TrainSchedule {
  std::size_t episodes = 1000;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double learn_rate = 0.1;

  /// Linear decay from epsilon_start (first episode) to epsilon_end (last).
  double epsilon_at(std::size_t episode) const noexcept;
};

void validate(const TrainSchedule& s);

struct Policies {
  LearnerKind kind = LearnerKind::iql;
  std::map<AgentId, QTable> tables;
};

Policies make_policies(const Environment& env, LearnerKind kind);

struct TrainResult {
  Policies policies;
  std::vector<double> reward_trace;  // mean AV reward per episode
};

using EpisodeCallback = std::function<void(const EpisodeEnd&)>;

/// Plays one episode. AV actions come from `policies`; humans use their model.
EpisodeEnd play_episode(Environment& env, const Policies& policies, double eps,
                        std::map<AgentId, Rng>& explore, std::vector<JointStep>* steps = nullptr);

/// Runs a human-only day-to-day phase; AVs (if any) act greedily.
void run_human_phase(Environment& env, std::size_t episodes, const EpisodeCallback& on_episode = {});

/// Trains AV policies in the training phase. The team reward for VDN is the
/// sum of AV rewards; all AVs must share one set of behavior weights.
TrainResult train(Environment& env, LearnerKind kind, const TrainSchedule& schedule,
                  const EpisodeCallback& on_episode = {});

struct Evaluation {
  std::vector<EpisodeRecord> records;
  PhaseKpi kpi;
};

/// Switches to testing and runs n episodes greedily (random policies stay random).
Evaluation evaluate(Environment& env, const Policies& policies, std::size_t n_episodes,
                    const EpisodeCallback& on_episode = {});

void write_policies(std::ostream& out, const Policies& policies);
/// Inverse of write_policies; "default" rows rebuild each table's defaults.
Policies read_policies(std::istream& in, LearnerKind kind);

}  // namespace routesim
