#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "learners.hpp"
#include "marlenv.hpp"
#include "recorder.hpp"

namespace routesim {

/// Everything needed to reproduce one run. Paths are absolute after parsing.
struct ExperimentConfig {
  std::uint64_t seed = 42;
  std::filesystem::path network;

  std::optional<std::filesystem::path> demand_file;
  DemandConfig demand;  // used when demand_file is empty; seed is derived

  RouteGenParams routes;
  std::optional<std::filesystem::path> routes_file;

  TrafficModel traffic = Bpr{};
  double period_s = 0.0;

  HumanModelParams human;
  double time_mult_spread = 0.0;
  bool humans_learn_in_training = false;
  bool humans_learn_in_testing = false;
  bool dump_beliefs = false;  // beliefs.csv, one row per human route per episode

  std::size_t human_episodes = 100;
  MutationSpec mutation;
  Behavior av_behavior = Behavior::selfish;

  LearnerKind learner = LearnerKind::iql;
  TrainSchedule schedule;
  std::size_t test_episodes = 100;

  std::optional<std::filesystem::path> output;
};

/// Parses a JSON config. Relative paths resolve against `base_dir`. Errors
/// carry ErrorCode::config and name the offending field, e.g. `mutation.share`.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully resolved config (defaults filled in, absolute paths, no output).
nlohmann::json config_to_json(const ExperimentConfig& cfg);

EnvSetup make_env_setup(const ExperimentConfig& cfg);

struct ExperimentResult {
  Recorder recorder;
  Policies policies;
  std::vector<AgentId> mutated;
  std::vector<double> reward_trace;
  KpiSummary summary;
  std::string beliefs_csv;  // filled when dump_beliefs is set
};

/// Human learning, mutation, training and testing, all in memory.
ExperimentResult run_pipeline(const ExperimentConfig& cfg);

/// episodes.csv, flows.csv, kpis.json, policies.csv, config.json, charts/*.svg.
void write_artifacts(const ExperimentResult& result, const ExperimentConfig& cfg,
                     const std::filesystem::path& dir);

/// Refuses a non-empty output directory.
void prepare_output_dir(const std::filesystem::path& dir);

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Runs one isolated replication per seed concurrently, into
/// out_dir/seed_<seed>. Results come back in seed order.
std::vector<ExperimentResult> run_replications(const ExperimentConfig& cfg,
                                               const std::filesystem::path& out_dir,
                                               std::span<const std::uint64_t> seeds);

/// Seeds used for `n` replications when none are given: master, master+1, ...
std::vector<std::uint64_t> default_seeds(std::uint64_t master, std::size_t n);

/// Applies ROUTESIM_LOG (error | info | debug); unset means info.
void configure_logging();

}  // namespace routesim
