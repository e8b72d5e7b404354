#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"
#include "humans.hpp"
#include "oracles.hpp"

using namespace routesim;

namespace {

RouteSet routes_with(std::initializer_list<double> fftimes) {
  RouteSet set{"O", "D", {}};
  EdgeIndex e = 0;
  for (double t : fftimes) set.routes.push_back(Route{{e++}, "O", "D", t});
  return set;
}

CostBeliefs beliefs(std::vector<double> costs) {
  CostBeliefs b;
  b.counts.assign(costs.size(), 0);
  b.costs = std::move(costs);
  return b;
}

HumanModelParams params(HumanModel m, double rate, double scale = 0.5, double discount = 0.9) {
  HumanModelParams p;
  p.model = m;
  p.learn_rate = rate;
  p.logit_scale = scale;
  p.discount = discount;
  return p;
}

}  // namespace

TEST_SUITE("humans") {
  TEST_CASE("init beliefs are the free-flow times") {
    auto b = init_beliefs(routes_with({100, 120}));
    CHECK(b.costs == std::vector<double>{100, 120});
    CHECK(b.counts == std::vector<std::uint64_t>{0, 0});
    CHECK(init_beliefs(routes_with({50})).costs == std::vector<double>{50});
    CHECK(init_beliefs(routes_with({3, 1, 2})).costs == std::vector<double>{3, 1, 2});
    CHECK_THROWS_AS(init_beliefs(RouteSet{}), Error);
  }

  TEST_CASE("equal costs give equal probabilities") {
    for (double scale : {0.0, 0.1, 5.0}) {
      const auto p = choice_probabilities(beliefs({100, 100}), params(HumanModel::gawron, 0.1, scale));
      CHECK(p[0] == doctest::Approx(0.5));
      CHECK(p[1] == doctest::Approx(0.5));
    }
  }

  TEST_CASE("zero scale is uniform") {
    const auto p = choice_probabilities(beliefs({1, 50, 300}), params(HumanModel::gawron, 0.1, 0.0));
    for (double v : p) CHECK(std::abs(v - 1.0 / 3.0) <= 1e-12);
  }

  TEST_CASE("costs [100,120], scale 0.1 gives P(0) = 1/(1+e^-2)") {
    const auto p = choice_probabilities(beliefs({100, 120}), params(HumanModel::gawron, 0.1, 0.1));
    CHECK(std::abs(p[0] - 1.0 / (1.0 + std::exp(-2.0))) <= 1e-12);
    CHECK(std::abs(p[0] - 0.8808) < 5e-5);
    const auto ref = oracle::logit({100, 120}, 0.1);
    CHECK(std::abs(p[1] - ref[1]) <= 1e-12);
  }

  TEST_CASE("time_mult scales the logit") {
    auto p = params(HumanModel::gawron, 0.1, 0.05);
    p.time_mult = 2.0;
    const auto got = choice_probabilities(beliefs({100, 120}), p);
    CHECK(std::abs(got[0] - oracle::logit({100, 120}, 0.1)[0]) <= 1e-12);
  }

  TEST_CASE("infinite scale picks the cheapest, first on ties") {
    auto p = params(HumanModel::gawron, 0.1, std::numeric_limits<double>::infinity());
    CHECK(choice_probabilities(beliefs({130, 120, 120}), p) == std::vector<double>{0, 1, 0});
    Rng rng(1);
    for (int i = 0; i < 20; ++i) CHECK(choose_route(beliefs({130, 120, 125}), p, rng) == 1);
  }

  TEST_CASE("large cost gaps do not underflow to NaN") {
    const auto p = choice_probabilities(beliefs({1e6, 2e6}), params(HumanModel::gawron, 0.1, 10.0));
    CHECK(p[0] == 1.0);
    CHECK(p[1] == 0.0);
  }

  TEST_CASE("choose_route frequencies follow the probabilities") {
    const auto b = beliefs({100, 110, 130});
    const auto p = params(HumanModel::weighted_average, 0.1, 0.05);
    const auto prob = choice_probabilities(b, p);
    Rng rng(99);
    std::vector<int> hits(3, 0);
    const int n = 20000;
    for (int i = 0; i < n; ++i) ++hits[choose_route(b, p, rng)];
    for (int r = 0; r < 3; ++r) CHECK(hits[r] / double(n) == doctest::Approx(prob[r]).epsilon(0.05));
  }

  TEST_CASE("weighted average: [100,120], chosen 0, tau 140, rate 0.2 -> [108,120]") {
    const auto b = update_beliefs(beliefs({100, 120}), 0, 140, params(HumanModel::weighted_average, 0.2));
    CHECK(std::abs(b.costs[0] - 108.0) <= 1e-9);
    CHECK(b.costs[1] == 120.0);
    CHECK(b.counts == std::vector<std::uint64_t>{1, 0});
  }

  TEST_CASE("culo: [100,120], chosen 1, tau 100, discount 1 -> [100,220]") {
    const auto b = update_beliefs(beliefs({100, 120}), 1, 100, params(HumanModel::culo, 0.1, 0.5, 1.0));
    CHECK(b.costs == std::vector<double>{100, 220});
    CHECK(b.counts == std::vector<std::uint64_t>{0, 1});
  }

  TEST_CASE("rate 1 weighted average takes the observation exactly") {
    const auto b = update_beliefs(beliefs({100, 120}), 1, 97.5, params(HumanModel::weighted_average, 1.0));
    CHECK(b.costs[1] == 97.5);
  }

  TEST_CASE("gawron: chosen smoothed, others diffuse toward the new chosen cost") {
    const auto b = update_beliefs(beliefs({100, 120, 90}), 0, 140, params(HumanModel::gawron, 0.2));
    const double chosen = 0.8 * 100 + 0.2 * 140;  // 108
    CHECK(std::abs(b.costs[0] - chosen) <= 1e-9);
    CHECK(std::abs(b.costs[1] - (0.9 * 120 + 0.1 * chosen)) <= 1e-9);
    CHECK(std::abs(b.costs[2] - (0.9 * 90 + 0.1 * chosen)) <= 1e-9);
  }

  TEST_CASE("invalid update arguments") {
    CHECK_THROWS_AS(update_beliefs(beliefs({100, 120}), 2, 100, params(HumanModel::culo, 0.1)), Error);
    CHECK_THROWS_AS(update_beliefs(beliefs({100, 120}), 0, 0.0, params(HumanModel::culo, 0.1)), Error);
    CHECK_THROWS_AS(validate(params(HumanModel::culo, 0.0)), Error);
    CHECK_THROWS_AS(validate(params(HumanModel::culo, 0.5, -1.0)), Error);
    CHECK_THROWS_AS(validate(params(HumanModel::culo, 0.5, 0.5, 1.5)), Error);
  }

  TEST_CASE("model names") {
    CHECK(parse_human_model("gawron") == HumanModel::gawron);
    CHECK(to_string(HumanModel::weighted_average) == "weighted_average");
    CHECK_THROWS_AS(parse_human_model("bayes"), Error);
  }

  TEST_CASE("belief dump") {
    std::ostringstream out;
    write_beliefs_header(out);
    auto b = beliefs({100, 120.5});
    b.counts = {3, 1};
    write_beliefs(out, 7, 12, b);
    CHECK(out.str() == "episode,id,route_index,cost,count\n7,12,0,100,3\n7,12,1,120.5,1\n");
  }
}
