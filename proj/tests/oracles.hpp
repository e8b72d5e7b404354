#pragma once
// Independent brute-force references. Nothing here calls the code under test
// beyond reading network structure.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "netgraph.hpp"

namespace oracle {

using Path = std::vector<routesim::EdgeIndex>;

/// Every simple (node-repeat-free) path from origin to dest, by DFS.
inline std::vector<Path> simple_paths(const routesim::Network& net, const std::string& origin,
                                      const std::string& dest) {
  const auto o = net.node_index(origin);
  const auto d = net.node_index(dest);
  std::vector<Path> out;
  Path current;
  std::vector<bool> visited(net.nodes().size(), false);
  std::function<void(routesim::NodeIndex)> dfs = [&](routesim::NodeIndex n) {
    if (n == d) {
      out.push_back(current);
      return;
    }
    visited[n] = true;
    for (auto e : net.out_edges(n)) {
      const auto h = net.head(e);
      if (visited[h]) continue;
      current.push_back(e);
      dfs(h);
      current.pop_back();
    }
    visited[n] = false;
  };
  dfs(o);
  return out;
}

inline double weight(const Path& p, const std::vector<double>& w) {
  double s = 0.0;
  for (auto e : p) s += w[e];
  return s;
}

inline bool is_simple(const routesim::Network& net, const Path& p) {
  std::set<routesim::NodeIndex> seen;
  if (p.empty()) return false;
  seen.insert(net.tail(p.front()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i > 0 && net.tail(p[i]) != net.head(p[i - 1])) return false;
    if (!seen.insert(net.head(p[i])).second) return false;
  }
  return true;
}

/// Hand-written BPR: t0 * (1 + alpha * (x/c)^beta).
inline double bpr(double t0, double x, double c, double alpha, double beta) {
  return t0 * (1.0 + alpha * std::pow(x / c, beta));
}

/// Two parallel routes, each a chain of edges with equal capacity. Returns the
/// number of agents on route 0 at the brute-forced equilibrium: among all
/// n+1 splits, the one minimizing the travel-time difference between the two
/// routes (only routes in use count; an unused route compares by its
/// marginal entrant's time).
struct TwoRouteUe {
  int on_route0 = 0;
  double t0 = 0.0;
  double t1 = 0.0;
};

inline TwoRouteUe two_route_ue(int n, double fft0, double fft1, double cap_per_period, double alpha,
                               double beta) {
  auto t = [&](double fft, int count) { return bpr(fft, count, cap_per_period, alpha, beta); };
  TwoRouteUe best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int a = 0; a <= n; ++a) {
    const int b = n - a;
    // For a corner split, the empty route is judged by what one entrant would see.
    const double ta = a > 0 ? t(fft0, a) : t(fft0, 1);
    const double tb = b > 0 ? t(fft1, b) : t(fft1, 1);
    double gap = std::abs(ta - tb);
    if (a == 0 && ta >= tb) gap = 0.0;  // nobody wants route 0
    if (b == 0 && tb >= ta) gap = 0.0;
    if (gap < best_gap) {
      best_gap = gap;
      best = {a, t(fft0, a), t(fft1, b)};
    }
  }
  return best;
}

/// Joint payoff table of a stateless game: payoff(actions) for every joint
/// action in lexicographic order. Returns the argmax joint action (first on ties).
inline std::vector<std::size_t> argmax_joint(std::size_t n_agents, std::size_t n_actions,
                                             const std::function<double(const std::vector<std::size_t>&)>& payoff) {
  std::vector<std::size_t> a(n_agents, 0), best;
  double best_v = -std::numeric_limits<double>::infinity();
  while (true) {
    const double v = payoff(a);
    if (v > best_v) {
      best_v = v;
      best = a;
    }
    std::size_t i = n_agents;
    while (i > 0) {
      --i;
      if (++a[i] < n_actions) break;
      a[i] = 0;
      if (i == 0) return best;
    }
    if (n_agents == 0) return best;
  }
}

/// Softmax reference written out directly.
inline std::vector<double> logit(const std::vector<double>& costs, double scale) {
  std::vector<double> p;
  double z = 0.0;
  for (double c : costs) z += std::exp(-scale * c);
  for (double c : costs) p.push_back(std::exp(-scale * c) / z);
  return p;
}

}  // namespace oracle
