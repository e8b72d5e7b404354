#include "behaviors.hpp"

#include <cmath>
#include <numeric>

#include "csv.hpp"
#include "error.hpp"

namespace routesim {

std::string_view to_string(Behavior b) noexcept {
  switch (b) {
    case Behavior::selfish: return "selfish";
    case Behavior::altruistic: return "altruistic";
    case Behavior::collaborative: return "collaborative";
    case Behavior::competitive: return "competitive";
    case Behavior::malicious: return "malicious";
    case Behavior::social: return "social";
  }
  return "selfish";
}

Behavior parse_behavior(std::string_view name) {
  for (Behavior b : kAllBehaviors)
    if (to_string(b) == name) return b;
  fail(ErrorCode::invalid_argument, "unknown behavior '" + std::string(name) + "'");
}

BehaviorWeights preset(Behavior b) noexcept {
  switch (b) {
    case Behavior::selfish: return {-1.0, 0.0, 0.0, 0.0};
    case Behavior::altruistic: return {0.0, 0.0, 0.0, -1.0};
    case Behavior::collaborative: return {-0.5, -0.5, 0.0, 0.0};
    case Behavior::competitive: return {-0.5, 0.0, 0.5, 0.0};
    case Behavior::malicious: return {0.0, 0.0, 1.0, 0.0};
    case Behavior::social: return {-0.5, 0.0, 0.0, -0.5};
  }
  return {};
}

double compute_reward(const BehaviorWeights& w, const GroupStats& s) noexcept {
  return w.w_own * s.t_own + w.w_group * s.t_group + w.w_other * s.t_other +
         w.w_all * s.t_all;
}

GroupStats group_stats(double own_time, std::span<const double> av_times,
                       std::span<const double> human_times) {
  auto mean = [](std::span<const double> v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  };
  const double av_sum = std::accumulate(av_times.begin(), av_times.end(), 0.0);
  const double human_sum = std::accumulate(human_times.begin(), human_times.end(), 0.0);
  const auto n = av_times.size() + human_times.size();
  return GroupStats{own_time, mean(av_times), mean(human_times),
                    n == 0 ? 0.0 : (av_sum + human_sum) / n};
}

BehaviorWeights parse_weights(std::string_view text) {
  std::array<double, 4> w{};
  std::size_t i = 0;
  while (true) {
    auto cut = text.find(';');
    if (i >= w.size())
      fail(ErrorCode::parse, "behavior weights need exactly 4 ';'-separated values");
    w[i++] = csv::parse_double(text.substr(0, cut), "behavior weights");
    if (cut == std::string_view::npos) break;
    text.remove_prefix(cut + 1);
  }
  if (i != w.size())
    fail(ErrorCode::parse, "behavior weights need exactly 4 ';'-separated values");
  for (double v : w)
    if (!std::isfinite(v)) fail(ErrorCode::validation, "behavior weights must be finite");
  return {w[0], w[1], w[2], w[3]};
}

std::string format_weights(const BehaviorWeights& w) {
  return csv::format_number(w.w_own) + ';' + csv::format_number(w.w_group) + ';' +
         csv::format_number(w.w_other) + ';' + csv::format_number(w.w_all);
}

}  // namespace routesim
