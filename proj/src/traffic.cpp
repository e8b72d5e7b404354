#include "traffic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <set>
#include <tuple>

#include "csv.hpp"
#include "error.hpp"

namespace routesim {

std::string_view model_name(const TrafficModel& m) noexcept {
  return std::holds_alternative<Bpr>(m) ? "bpr" : "pointqueue";
}

void validate(const TrafficModel& m) {
  if (const auto* bpr = std::get_if<Bpr>(&m)) {
    if (!(bpr->alpha >= 0.0) || !std::isfinite(bpr->alpha))
      fail(ErrorCode::invalid_argument, "BPR alpha must be >= 0");
    if (!(bpr->beta >= 1.0) || !std::isfinite(bpr->beta))
      fail(ErrorCode::invalid_argument, "BPR beta must be >= 1");
  }
}

double bpr_time(double free_flow_time, double flow_rate, double capacity, const Bpr& m) {
  if (flow_rate <= 0.0) return free_flow_time;
  return free_flow_time * (1.0 + m.alpha * std::pow(flow_rate / capacity, m.beta));
}

namespace {

void check_assignment(const Network& net, const Assignment& asg) {
  if (!(asg.period_s > 0.0) || !std::isfinite(asg.period_s))
    fail(ErrorCode::invalid_argument, "assignment period must be positive");
  std::set<std::int64_t> agents;
  for (const auto& trip : asg.trips) {
    if (!agents.insert(trip.agent).second)
      fail(ErrorCode::invalid_argument, "agent " + std::to_string(trip.agent) +
                                            " appears twice in the assignment");
    if (trip.edges.empty())
      fail(ErrorCode::invalid_argument, "agent " + std::to_string(trip.agent) + " has an empty route");
    for (EdgeIndex e : trip.edges)
      if (e >= net.edges().size())
        fail(ErrorCode::invalid_argument, "assignment references an unknown edge");
  }
}

std::vector<std::uint32_t> count_flows(const Network& net, const Assignment& asg) {
  std::vector<std::uint32_t> flows(net.edges().size(), 0);
  for (const auto& trip : asg.trips)
    for (EdgeIndex e : trip.edges) ++flows[e];
  return flows;
}

EpisodeResult simulate_bpr(const Network& net, const Bpr& model, const Assignment& asg) {
  EpisodeResult result;
  result.edge_flows = count_flows(net, asg);
  std::vector<double> edge_time(net.edges().size());
  for (EdgeIndex e = 0; e < edge_time.size(); ++e) {
    const auto& edge = net.edge(e);
    const double rate = result.edge_flows[e] * 3600.0 / asg.period_s;
    edge_time[e] = bpr_time(edge.free_flow_time(), rate, edge.capacity, model);
  }
  result.travel_times.reserve(asg.trips.size());
  for (const auto& trip : asg.trips) {
    double t = 0.0;
    for (EdgeIndex e : trip.edges) t += edge_time[e];
    result.travel_times.push_back(t);
  }
  return result;
}

struct QueueEvent {
  double ready = 0.0;   // entry + free-flow time
  std::uint64_t seq = 0;
  double entry = 0.0;
  std::size_t trip = 0;
  std::size_t hop = 0;

  bool operator>(const QueueEvent& o) const {
    return std::tie(ready, seq) > std::tie(o.ready, o.seq);
  }
};

EpisodeResult simulate_point_queue(const Network& net, const Assignment& asg) {
  EpisodeResult result;
  result.edge_flows = count_flows(net, asg);
  result.travel_times.assign(asg.trips.size(), 0.0);
  result.arrivals.assign(asg.trips.size(), 0.0);

  std::vector<double> last_exit(net.edges().size(), -std::numeric_limits<double>::infinity());
  std::priority_queue<QueueEvent, std::vector<QueueEvent>, std::greater<>> events;
  std::uint64_t seq = 0;

  std::vector<std::size_t> order(asg.trips.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(asg.trips[a].departure, asg.trips[a].agent) <
           std::tie(asg.trips[b].departure, asg.trips[b].agent);
  });
  for (std::size_t i : order) {
    const auto& trip = asg.trips[i];
    const double entry = static_cast<double>(trip.departure);
    events.push({entry + net.edge(trip.edges[0]).free_flow_time(), seq++, entry, i, 0});
  }

  while (!events.empty()) {
    const QueueEvent ev = events.top();
    events.pop();
    const auto& trip = asg.trips[ev.trip];
    const EdgeIndex e = trip.edges[ev.hop];
    const double headway = 3600.0 / net.edge(e).capacity;
    const double exit = std::max(ev.ready, last_exit[e] + headway);
    last_exit[e] = exit;
    result.traversals.push_back({trip.agent, e, ev.entry, exit});
    if (ev.hop + 1 < trip.edges.size()) {
      const EdgeIndex next = trip.edges[ev.hop + 1];
      events.push({exit + net.edge(next).free_flow_time(), seq++, exit, ev.trip, ev.hop + 1});
    } else {
      result.arrivals[ev.trip] = exit;
      result.travel_times[ev.trip] = exit - static_cast<double>(trip.departure);
    }
  }
  return result;
}

}  // namespace

EpisodeResult simulate(const Network& net, const TrafficModel& model, const Assignment& asg) {
  validate(model);
  check_assignment(net, asg);
  if (const auto* bpr = std::get_if<Bpr>(&model)) return simulate_bpr(net, *bpr, asg);
  return simulate_point_queue(net, asg);
}

void write_edge_flows(std::ostream& out, std::uint64_t episode, const Network& net,
                      std::span<const std::uint32_t> flows, bool header) {
  if (header) out << "episode,edge,flow\n";
  for (EdgeIndex e = 0; e < flows.size(); ++e)
    out << episode << ',' << net.edge(e).id << ',' << flows[e] << '\n';
}

}  // namespace routesim
