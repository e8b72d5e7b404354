#include <doctest.h>

#include <fstream>

#include "error.hpp"
#include "experiment.hpp"
#include "support.hpp"

using namespace routesim;
using nlohmann::json;

namespace {

json small_config() {
  return json{
      {"seed", 5},
      {"network", testing::data_path("networks/two_route.csv").string()},
      {"demand", {{"n_agents", 8}, {"od_pairs", json::array({{{"origin", "O"}, {"dest", "D"}}})}, {"window", {0, 300}}}},
      {"human", {{"model", "gawron"}, {"learn_rate", 0.2}, {"logit_scale", 0.1}}},
      {"human_episodes", 5},
      {"mutation", {{"share", 0.25}, {"behavior", "selfish"}}},
      {"learner", {{"kind", "iql"}, {"episodes", 10}}},
      {"test_episodes", 3}};
}

std::string config_error_of(const json& j) {
  try {
    parse_config(j, testing::data_path("configs"));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("shipped configs parse") {
    for (const char* name : {"two_route_ue.json", "two_route_malicious.json", "three_route_selfish.json", "quickstart.json"}) {
      CAPTURE(name);
      const auto cfg = load_config(testing::data_path(std::string("configs/") + name));
      CHECK(cfg.network.is_absolute());
      CHECK(std::filesystem::exists(cfg.network));
    }
  }

  TEST_CASE("errors name the offending field") {
    json j = small_config();
    j["mutation"]["share"] = 1.5;
    CHECK(config_error_of(j).find("mutation.share") != std::string::npos);

    j = small_config();
    j["learner"]["gamma"] = 0.9;
    CHECK(config_error_of(j).find("learner.gamma") != std::string::npos);

    j = small_config();
    j.erase("network");
    CHECK(config_error_of(j).find("network") != std::string::npos);

    j = small_config();
    j["demand"]["od_pairs"][0]["weight"] = -1;
    CHECK(config_error_of(j).find("demand.od_pairs[0].weight") != std::string::npos);

    j = small_config();
    j["human"]["model"] = "bayes";
    CHECK(config_error_of(j).find("human.model") != std::string::npos);

    j = small_config();
    j["network"] = "no/such/file.csv";
    CHECK(config_error_of(j).find("network") != std::string::npos);
  }

  TEST_CASE("logit scale accepts \"inf\"") {
    json j = small_config();
    j["human"]["logit_scale"] = "inf";
    const auto cfg = parse_config(j, ".");
    CHECK(std::isinf(cfg.human.logit_scale));
    CHECK(config_to_json(cfg)["human"]["logit_scale"] == "inf");
  }

  TEST_CASE("the echoed config reproduces the run") {
    const auto cfg = parse_config(small_config(), ".");
    const auto echoed = parse_config(config_to_json(cfg), "/");
    CHECK(config_to_json(echoed) == config_to_json(cfg));
    const auto a = run_pipeline(cfg);
    const auto b = run_pipeline(echoed);
    CHECK(a.summary == b.summary);
    REQUIRE(a.recorder.records().size() == b.recorder.records().size());
    for (std::size_t i = 0; i < a.recorder.records().size(); ++i)
      CHECK(a.recorder.records()[i] == b.recorder.records()[i]);
  }

  TEST_CASE("pipeline phases and episode counts") {
    const auto cfg = parse_config(small_config(), ".");
    const auto r = run_pipeline(cfg);
    CHECK(r.mutated.size() == 2);
    CHECK(r.reward_trace.size() == 10);
    CHECK(r.summary.episodes.size() == 5 + 10 + 3);
    CHECK(r.summary.phases.at(Phase::human_only).episodes == 5);
    CHECK(r.summary.phases.at(Phase::training).episodes == 10);
    CHECK(r.summary.phases.at(Phase::testing).episodes == 3);
    CHECK(r.summary.phases.at(Phase::testing).tt_ratio.has_value());
  }

  TEST_CASE("no human episodes and no AVs is a valid run") {
    json j = small_config();
    j["human_episodes"] = 0;
    j["mutation"]["share"] = 0;
    const auto r = run_pipeline(parse_config(j, "."));
    CHECK(r.mutated.empty());
    CHECK(r.summary.phases.count(Phase::human_only) == 0);
    CHECK_FALSE(r.summary.phases.at(Phase::testing).tt_ratio.has_value());
  }

  TEST_CASE("run writes the artifact set and refuses a non-empty directory") {
    json j = small_config();
    j["human"]["dump_beliefs"] = true;
    const auto cfg = parse_config(j, ".");
    const auto dir = testing::scratch_dir("experiment_run");
    run_experiment(cfg, dir);
    for (const char* f : {"episodes.csv", "flows.csv", "kpis.json", "policies.csv", "config.json", "beliefs.csv",
                          "charts/travel_times.svg", "charts/rewards.svg", "charts/route_choices.svg"}) {
      CAPTURE(f);
      CHECK(std::filesystem::exists(dir / f));
    }
    // 5 human episodes of 8 humans, then 6 frozen humans for 13 more episodes.
    std::ifstream beliefs(dir / "beliefs.csv");
    std::string line;
    std::size_t rows = 0;
    while (std::getline(beliefs, line)) ++rows;
    CHECK(rows == 1 + (5 * 8 + 13 * 6) * 2);
    try {
      run_experiment(cfg, dir);
      FAIL("expected a refusal");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::io);
    }
    const auto reloaded = load_config(dir / "config.json");
    CHECK(config_to_json(reloaded) == config_to_json(cfg));
  }

  TEST_CASE("replications write one subdirectory per seed") {
    const auto cfg = parse_config(small_config(), ".");
    const auto dir = testing::scratch_dir("experiment_reps");
    const auto seeds = default_seeds(11, 3);
    CHECK(seeds == std::vector<std::uint64_t>{11, 12, 13});
    const auto results = run_replications(cfg, dir, seeds);
    REQUIRE(results.size() == 3);
    for (auto s : seeds) CHECK(std::filesystem::exists(dir / ("seed_" + std::to_string(s)) / "kpis.json"));
    // Each replication matches a standalone run with that seed.
    ExperimentConfig solo = cfg;
    solo.seed = 12;
    CHECK(run_pipeline(solo).summary == results[1].summary);
    const std::vector<std::uint64_t> dup{1, 1};
    CHECK_THROWS_AS(run_replications(cfg, testing::scratch_dir("experiment_dup"), dup), Error);
  }
}
