#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "netgraph.hpp"

namespace routesim {

/// Volume-delay model t = t0 * (1 + alpha * (x / c)^beta).
struct Bpr {
  double alpha = 0.15;
  double beta = 4.0;
};

/// Event-driven point queue: free-flow traversal, then a FIFO exit limited to
/// one vehicle per 3600/c seconds. No storage limit.
struct PointQueue {};

using TrafficModel = std::variant<Bpr, PointQueue>;

std::string_view model_name(const TrafficModel& m) noexcept;
void validate(const TrafficModel& m);

struct Trip {
  std::int64_t agent = 0;
  std::int64_t departure = 0;  // s
  std::vector<EdgeIndex> edges;
};

struct Assignment {
  std::vector<Trip> trips;
  // Departure-window length W used for hourly flow scaling (x = n * 3600 / W).
  double period_s = 3600.0;
};

struct EdgeTraversal {
  std::int64_t agent = 0;
  EdgeIndex edge = 0;
  double entry = 0.0;
  double exit = 0.0;

  bool operator==(const EdgeTraversal&) const = default;
};

/// Travel times and arrivals are indexed like Assignment::trips.
struct EpisodeResult {
  std::vector<double> travel_times;
  std::vector<double> arrivals;             // point queue only
  std::vector<std::uint32_t> edge_flows;    // per EdgeIndex
  std::vector<EdgeTraversal> traversals;    // point queue only, processing order

  bool operator==(const EpisodeResult&) const = default;
};

double bpr_time(double free_flow_time, double flow_rate, double capacity, const Bpr& m);

EpisodeResult simulate(const Network& net, const TrafficModel& model, const Assignment& asg);

void write_edge_flows(std::ostream& out, std::uint64_t episode, const Network& net,
                      std::span<const std::uint32_t> flows, bool header);

}  // namespace routesim
