#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace routesim {

enum class Behavior { selfish, altruistic, collaborative, competitive, malicious, social };

inline constexpr std::array<Behavior, 6> kAllBehaviors = {
    Behavior::selfish,     Behavior::altruistic, Behavior::collaborative,
    Behavior::competitive, Behavior::malicious,  Behavior::social};

std::string_view to_string(Behavior b) noexcept;
/// Throws Error(invalid_argument) for unknown names.
Behavior parse_behavior(std::string_view name);

/// Reward = w_own*t_own + w_group*t_group + w_other*t_other + w_all*t_all.
/// Rewards are maximized, so negative weights minimize delay.
struct BehaviorWeights {
  double w_own = 0.0;
  double w_group = 0.0;
  double w_other = 0.0;
  double w_all = 0.0;

  bool operator==(const BehaviorWeights&) const = default;
};

/// Travel-time statistics seen by one AV at the end of an episode.
/// t_group is the AV mean (self included), t_other the human mean.
struct GroupStats {
  double t_own = 0.0;
  double t_group = 0.0;
  double t_other = 0.0;
  double t_all = 0.0;
};

BehaviorWeights preset(Behavior b) noexcept;
double compute_reward(const BehaviorWeights& w, const GroupStats& s) noexcept;

/// Builds the stats for one AV; empty groups contribute a mean of 0.
GroupStats group_stats(double own_time, std::span<const double> av_times,
                       std::span<const double> human_times);

/// Parses "w_own;w_group;w_other;w_all".
BehaviorWeights parse_weights(std::string_view text);
std::string format_weights(const BehaviorWeights& w);

}  // namespace routesim
