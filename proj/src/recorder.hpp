#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "marlenv.hpp"

namespace routesim {

struct EpisodeRecord {
  std::uint64_t episode = 0;
  Phase phase = Phase::human_only;
  AgentId id = 0;
  AgentKind kind = AgentKind::human;
  std::string origin;
  std::string dest;
  std::size_t route_index = 0;
  std::int64_t departure = 0;
  double travel_time = 0.0;
  std::optional<double> reward;

  bool operator==(const EpisodeRecord&) const = default;
};

struct FlowRecord {
  std::uint64_t episode = 0;
  std::string edge;
  std::uint32_t flow = 0;

  bool operator==(const FlowRecord&) const = default;
};

/// Append-only store of per-agent episode rows.
class Recorder {
 public:
  void record(const EpisodeEnd& end, const Network& net);
  void add(EpisodeRecord row);

  std::span<const EpisodeRecord> records() const noexcept { return rows_; }
  std::span<const FlowRecord> flows() const noexcept { return flows_; }
  bool empty() const noexcept { return rows_.empty(); }

  void write_episodes(std::ostream& out) const;
  void write_flows(std::ostream& out) const;
  /// Writes episodes.csv and flows.csv into `dir`.
  void flush(const std::filesystem::path& dir) const;

 private:
  std::vector<EpisodeRecord> rows_;
  std::vector<FlowRecord> flows_;
  std::set<AgentId> agent_set_;
  std::set<AgentId> current_episode_ids_;
  std::uint64_t current_episode_ = 0;
};

std::vector<EpisodeRecord> read_episodes(std::istream& in);
std::vector<EpisodeRecord> load_episodes(const std::filesystem::path& path);

struct EpisodeKpi {
  std::uint64_t episode = 0;
  Phase phase = Phase::human_only;
  std::optional<double> mean_tt_human;
  std::optional<double> mean_tt_av;
  double mean_tt_all = 0.0;
  std::optional<double> mean_reward_av;
  std::optional<double> tt_ratio;  // human mean / AV mean
  std::map<std::string, std::vector<double>> choice_fractions;  // "origin|dest" -> per route

  bool operator==(const EpisodeKpi&) const = default;
};

/// Pooled statistics over every row of one phase.
struct PhaseKpi {
  std::size_t episodes = 0;
  std::optional<double> mean_tt_human;
  std::optional<double> mean_tt_av;
  double mean_tt_all = 0.0;
  std::optional<double> mean_reward_av;
  std::optional<double> tt_ratio;
  std::map<std::string, std::vector<double>> choice_fractions;

  bool operator==(const PhaseKpi&) const = default;
};

struct KpiSummary {
  std::vector<EpisodeKpi> episodes;
  std::map<Phase, PhaseKpi> phases;

  bool operator==(const KpiSummary&) const = default;
};

std::string od_key(const std::string& origin, const std::string& dest);

/// Throws Error(invalid_argument) on an empty store.
KpiSummary summarize(std::span<const EpisodeRecord> rows);

/// Sorted keys, numbers rounded to 6 significant digits.
std::string kpis_json(const KpiSummary& summary);

/// Writes travel_times.svg, rewards.svg and route_choices.svg; returns paths.
std::vector<std::filesystem::path> render_charts(const KpiSummary& summary,
                                                 const std::filesystem::path& dir);

}  // namespace routesim
