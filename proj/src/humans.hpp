#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "pathgen.hpp"
#include "random.hpp"

namespace routesim {

enum class HumanModel { gawron, culo, weighted_average };

std::string_view to_string(HumanModel m) noexcept;
HumanModel parse_human_model(std::string_view name);

struct HumanModelParams {
  HumanModel model = HumanModel::weighted_average;
  double learn_rate = 0.1;   // lambda in (0, 1]
  double logit_scale = 0.5;  // 1/s, >= 0; +inf selects the cheapest route
  double discount = 0.9;     // culo only, (0, 1]
  double time_mult = 1.0;    // per-agent sensitivity, > 0
};

/// Throws Error(invalid_argument) naming the offending field.
void validate(const HumanModelParams& p);

/// Perceived cost per route, plus how often each route was taken.
struct CostBeliefs {
  std::vector<double> costs;
  std::vector<std::uint64_t> counts;

  bool operator==(const CostBeliefs&) const = default;
};

CostBeliefs init_beliefs(const RouteSet& routes);

/// Multinomial logit over negated perceived cost.
std::vector<double> choice_probabilities(const CostBeliefs& b, const HumanModelParams& p);

/// Samples a route index from choice_probabilities with one draw from `rng`.
std::size_t choose_route(const CostBeliefs& b, const HumanModelParams& p, Rng& rng);

/// Lowest-index route among the minimum perceived costs.
std::size_t cheapest_route(const CostBeliefs& b);

/// Learning rule applied after each day. Custom models plug in here.
class BeliefUpdater {
 public:
  virtual ~BeliefUpdater() = default;
  virtual void update(CostBeliefs& b, std::size_t chosen, double observed) const = 0;
};

std::unique_ptr<BeliefUpdater> make_belief_updater(const HumanModelParams& p);

CostBeliefs update_beliefs(CostBeliefs b, std::size_t chosen, double observed,
                           const HumanModelParams& p);

/// Debug dump rows `episode,id,route_index,cost,count`.
void write_beliefs_header(std::ostream& out);
void write_beliefs(std::ostream& out, std::uint64_t episode, std::int64_t id, const CostBeliefs& b);

}  // namespace routesim
