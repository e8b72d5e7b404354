#include "humans.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "csv.hpp"
#include "error.hpp"

namespace routesim {

std::string_view to_string(HumanModel m) noexcept {
  switch (m) {
    case HumanModel::gawron: return "gawron";
    case HumanModel::culo: return "culo";
    case HumanModel::weighted_average: return "weighted_average";
  }
  return "weighted_average";
}

HumanModel parse_human_model(std::string_view name) {
  for (auto m : {HumanModel::gawron, HumanModel::culo, HumanModel::weighted_average})
    if (to_string(m) == name) return m;
  fail(ErrorCode::invalid_argument, "unknown human model '" + std::string(name) + "'");
}

void validate(const HumanModelParams& p) {
  if (!(p.learn_rate > 0.0 && p.learn_rate <= 1.0))
    fail(ErrorCode::invalid_argument, "learn_rate must be in (0, 1]");
  if (!(p.logit_scale >= 0.0))
    fail(ErrorCode::invalid_argument, "logit_scale must be >= 0");
  if (!(p.discount > 0.0 && p.discount <= 1.0))
    fail(ErrorCode::invalid_argument, "discount must be in (0, 1]");
  if (!(p.time_mult > 0.0) || !std::isfinite(p.time_mult))
    fail(ErrorCode::invalid_argument, "time_mult must be > 0");
}

CostBeliefs init_beliefs(const RouteSet& routes) {
  if (routes.routes.empty())
    fail(ErrorCode::invalid_argument, "cannot initialise beliefs for an empty route set");
  CostBeliefs b;
  for (const auto& r : routes.routes) b.costs.push_back(r.fftime);
  b.counts.assign(b.costs.size(), 0);
  return b;
}

std::size_t cheapest_route(const CostBeliefs& b) {
  return static_cast<std::size_t>(
      std::min_element(b.costs.begin(), b.costs.end()) - b.costs.begin());
}

std::vector<double> choice_probabilities(const CostBeliefs& b, const HumanModelParams& p) {
  const std::size_t n = b.costs.size();
  std::vector<double> prob(n, 0.0);
  if (std::isinf(p.logit_scale)) {
    prob[cheapest_route(b)] = 1.0;
    return prob;
  }
  const double scale = p.logit_scale * p.time_mult;
  const double min_cost = *std::min_element(b.costs.begin(), b.costs.end());
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    prob[r] = std::exp(-scale * (b.costs[r] - min_cost));
    total += prob[r];
  }
  for (double& v : prob) v /= total;
  return prob;
}

std::size_t choose_route(const CostBeliefs& b, const HumanModelParams& p, Rng& rng) {
  const auto prob = choice_probabilities(b, p);
  const double u = uniform01(rng);
  double cumulative = 0.0;
  for (std::size_t r = 0; r < prob.size(); ++r) {
    cumulative += prob[r];
    if (u < cumulative) return r;
  }
  // Rounding can leave the cumulative sum a hair below 1.
  for (std::size_t r = prob.size(); r-- > 0;)
    if (prob[r] > 0.0) return r;
  return 0;
}

namespace {

class WeightedAverage final : public BeliefUpdater {
 public:
  explicit WeightedAverage(double rate) : rate_(rate) {}
  void update(CostBeliefs& b, std::size_t chosen, double observed) const override {
    b.costs[chosen] = (1.0 - rate_) * b.costs[chosen] + rate_ * observed;
  }

 private:
  double rate_;
};

// Chosen route smoothed as in WeightedAverage; unchosen routes diffuse
// halfway-rate towards the updated chosen-route estimate.
class Gawron final : public BeliefUpdater {
 public:
  explicit Gawron(double rate) : rate_(rate) {}
  void update(CostBeliefs& b, std::size_t chosen, double observed) const override {
    b.costs[chosen] = (1.0 - rate_) * b.costs[chosen] + rate_ * observed;
    const double half = rate_ / 2.0;
    for (std::size_t s = 0; s < b.costs.size(); ++s) {
      if (s == chosen) continue;
      b.costs[s] = (1.0 - half) * b.costs[s] + half * b.costs[chosen];
    }
  }

 private:
  double rate_;
};

class Culo final : public BeliefUpdater {
 public:
  explicit Culo(double discount) : discount_(discount) {}
  void update(CostBeliefs& b, std::size_t chosen, double observed) const override {
    b.costs[chosen] = discount_ * b.costs[chosen] + observed;
  }

 private:
  double discount_;
};

}  // namespace

std::unique_ptr<BeliefUpdater> make_belief_updater(const HumanModelParams& p) {
  switch (p.model) {
    case HumanModel::gawron: return std::make_unique<Gawron>(p.learn_rate);
    case HumanModel::culo: return std::make_unique<Culo>(p.discount);
    case HumanModel::weighted_average: return std::make_unique<WeightedAverage>(p.learn_rate);
  }
  return std::make_unique<WeightedAverage>(p.learn_rate);
}

CostBeliefs update_beliefs(CostBeliefs b, std::size_t chosen, double observed,
                           const HumanModelParams& p) {
  if (chosen >= b.costs.size())
    fail(ErrorCode::invalid_argument, "update_beliefs: route index out of range");
  if (!(observed > 0.0) || !std::isfinite(observed))
    fail(ErrorCode::invalid_argument, "update_beliefs: observed travel time must be > 0");
  make_belief_updater(p)->update(b, chosen, observed);
  ++b.counts[chosen];
  return b;
}

void write_beliefs_header(std::ostream& out) { out << "episode,id,route_index,cost,count\n"; }

void write_beliefs(std::ostream& out, std::uint64_t episode, std::int64_t id, const CostBeliefs& b) {
  for (std::size_t r = 0; r < b.costs.size(); ++r)
    out << episode << ',' << id << ',' << r << ',' << csv::format_number(b.costs[r]) << ',' << b.counts[r] << '\n';
}

}  // namespace routesim
