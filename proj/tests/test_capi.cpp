#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include "capi_support.hpp"
#include "routesim/routesim.h"

using namespace capi_testing;

namespace {

std::string config_file(const std::string& name, double share = 0.34) {
  const auto dir = scratch_dir(name);
  write_text(dir / "config.json", small_config(share));
  return (dir / "config.json").string();
}

// Plays one episode; AVs always take route `av_action`.
void play(routesim_env* env, int64_t av_action) {
  routesim_turn t{};
  REQUIRE(routesim_env_reset(env, &t) == ROUTESIM_OK);
  int done = 0;
  while (!done) REQUIRE(routesim_env_step(env, t.is_av ? av_action : -1, &t, &done) == ROUTESIM_OK);
}

}  // namespace

TEST_SUITE("capi") {
  TEST_CASE("version and status names") {
    CHECK(std::string(routesim_version()) == "0.1.0");
    CHECK(std::string(routesim_status_name(ROUTESIM_OK)) == "ok");
    CHECK(std::string(routesim_status_name(ROUTESIM_ERR_CONFIG)) == "config");
  }

  TEST_CASE("network handles") {
    routesim_network* net = nullptr;
    REQUIRE(routesim_network_load(data_path("networks/grid3x3.csv").c_str(), &net) == ROUTESIM_OK);
    CHECK(std::string(routesim_last_error()).empty());
    CHECK(routesim_network_node_count(net) == 9);
    CHECK(routesim_network_edge_count(net) == 24);
    routesim_network_free(net);
    routesim_network_free(nullptr);

    CHECK(routesim_network_load("/no/such/net.csv", &net) == ROUTESIM_ERR_IO);
    CHECK(net == nullptr);
    CHECK(std::strlen(routesim_last_error()) > 0);
    CHECK(routesim_network_load(nullptr, &net) == ROUTESIM_ERR_INVALID_ARGUMENT);
  }

  TEST_CASE("malformed network maps to a parse or validation status") {
    const auto dir = scratch_dir("bad_net");
    write_text(dir / "dup.csv",
               "node,id,x,y\nnode,A,,\nnode,A,,\nedge,id,from,to,length,speed,capacity\n");
    routesim_network* net = nullptr;
    CHECK(routesim_network_load((dir / "dup.csv").c_str(), &net) == ROUTESIM_ERR_DUPLICATE_ID);
    write_text(dir / "junk.csv", "node,id,x,y\nnode,A,,\nedge,id,from,to,length,speed,capacity\nedge,e,A,B,x,1,1\n");
    const auto s = routesim_network_load((dir / "junk.csv").c_str(), &net);
    CHECK((s == ROUTESIM_ERR_PARSE || s == ROUTESIM_ERR_NOT_FOUND || s == ROUTESIM_ERR_VALIDATION));
  }

  TEST_CASE("demand generation is deterministic") {
    routesim_network* net = nullptr;
    REQUIRE(routesim_network_load(data_path("networks/two_route.csv").c_str(), &net) == ROUTESIM_OK);
    const routesim_od od{"O", "D", 1.0};
    const auto dir = scratch_dir("demand");
    const auto a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
    REQUIRE(routesim_generate_demand_csv(net, 25, &od, 1, 0, 600, 9, a.c_str()) == ROUTESIM_OK);
    REQUIRE(routesim_generate_demand_csv(net, 25, &od, 1, 0, 600, 9, b.c_str()) == ROUTESIM_OK);
    CHECK(slurp(a) == slurp(b));
    CHECK(count_lines(slurp(a)) == 26);
    const routesim_od bad{"O", "Z", 1.0};
    CHECK(routesim_generate_demand_csv(net, 5, &bad, 1, 0, 600, 9, a.c_str()) == ROUTESIM_ERR_NOT_FOUND);
    routesim_network_free(net);
  }

  TEST_CASE("path generation from OD pairs") {
    routesim_network* net = nullptr;
    REQUIRE(routesim_network_load(data_path("networks/two_route.csv").c_str(), &net) == ROUTESIM_OK);
    const routesim_od od{"O", "D", 1.0};
    const auto out = (scratch_dir("paths") / "routes.csv").string();
    REQUIRE(routesim_generate_paths_csv(net, &od, 1, nullptr, 3, 1.3, 2.0, out.c_str()) == ROUTESIM_OK);
    CHECK(count_lines(slurp(out)) == 3);  // header plus two routes
    CHECK(routesim_generate_paths_csv(net, &od, 1, nullptr, 0, 1.3, 2.0, out.c_str()) != ROUTESIM_OK);
    routesim_network_free(net);
  }

  TEST_CASE("stepping an environment") {
    routesim_env* env = nullptr;
    REQUIRE(routesim_env_create(config_file("env").c_str(), &env) == ROUTESIM_OK);
    CHECK(routesim_env_agent_count(env) == 6);
    CHECK(routesim_env_phase(env) == ROUTESIM_PHASE_HUMAN_ONLY);

    routesim_turn t{};
    int done = 0;
    CHECK(routesim_env_step(env, 0, &t, &done) == ROUTESIM_ERR_INVALID_STATE);
    REQUIRE(routesim_env_reset(env, &t) == ROUTESIM_OK);
    CHECK(routesim_env_day(env) == 1);
    CHECK(t.n_actions == 2);
    std::vector<uint32_t> counts(4, 99);
    size_t len = 0;
    REQUIRE(routesim_env_observation(env, counts.data(), counts.size(), &len) == ROUTESIM_OK);
    CHECK(len == 2);
    CHECK(counts[0] == 0);
    CHECK(counts[1] == 0);
    CHECK(routesim_env_step(env, 7, &t, &done) == ROUTESIM_ERR_INVALID_ARGUMENT);
    while (!done) REQUIRE(routesim_env_step(env, -1, &t, &done) == ROUTESIM_OK);
    double tt = 0.0;
    REQUIRE(routesim_env_travel_time(env, 0, &tt) == ROUTESIM_OK);
    CHECK(tt >= 100.0);
    double r = 0.0;
    CHECK(routesim_env_reward(env, 0, &r) == ROUTESIM_ERR_NOT_FOUND);
    CHECK(routesim_env_travel_time(env, 99, &tt) == ROUTESIM_ERR_NOT_FOUND);

    std::vector<int64_t> ids(6);
    size_t n = 0;
    REQUIRE(routesim_env_mutate(env, ids.data(), ids.size(), &n) == ROUTESIM_OK);
    CHECK(n == 2);
    CHECK(routesim_env_phase(env) == ROUTESIM_PHASE_TRAINING);
    CHECK(routesim_env_mutate(env, ids.data(), ids.size(), &n) == ROUTESIM_ERR_INVALID_STATE);

    play(env, 1);
    REQUIRE(routesim_env_reward(env, ids[0], &r) == ROUTESIM_OK);
    REQUIRE(routesim_env_travel_time(env, ids[0], &tt) == ROUTESIM_OK);
    CHECK(r == -tt);  // selfish
    CHECK(routesim_env_start_testing(env) == ROUTESIM_OK);
    CHECK(routesim_env_phase(env) == ROUTESIM_PHASE_TESTING);
    routesim_env_free(env);
  }

  TEST_CASE("AV turns need an explicit action") {
    routesim_env* env = nullptr;
    REQUIRE(routesim_env_create(config_file("env_av", 1.0).c_str(), &env) == ROUTESIM_OK);
    std::vector<int64_t> ids(6);
    size_t n = 0;
    REQUIRE(routesim_env_mutate(env, ids.data(), ids.size(), &n) == ROUTESIM_OK);
    CHECK(n == 6);
    routesim_turn t{};
    REQUIRE(routesim_env_reset(env, &t) == ROUTESIM_OK);
    CHECK(t.is_av == 1);
    int done = 0;
    CHECK(routesim_env_step(env, -1, &t, &done) == ROUTESIM_ERR_INVALID_ARGUMENT);
    routesim_env_free(env);
  }

  TEST_CASE("running an experiment writes the artifacts") {
    const auto cfg = config_file("run");
    const auto out = scratch_dir("run_out") / "result";
    REQUIRE(routesim_run_experiment(cfg.c_str(), out.c_str(), 1, nullptr, 0) == ROUTESIM_OK);
    for (const char* f : {"episodes.csv", "flows.csv", "kpis.json", "policies.csv", "config.json",
                          "charts/travel_times.svg"})
      CHECK(std::filesystem::exists(out / f));
    CHECK(routesim_run_experiment(cfg.c_str(), out.c_str(), 1, nullptr, 0) == ROUTESIM_ERR_IO);
    CHECK(routesim_run_experiment(cfg.c_str(), nullptr, 1, nullptr, 0) == ROUTESIM_ERR_CONFIG);

    const auto charts = scratch_dir("run_charts");
    REQUIRE(routesim_plot((out / "episodes.csv").c_str(), charts.c_str()) == ROUTESIM_OK);
    CHECK(slurp(charts / "travel_times.svg") == slurp(out / "charts/travel_times.svg"));
  }

  TEST_CASE("replications with explicit seeds") {
    const auto cfg = config_file("reps");
    const auto out = scratch_dir("reps_out") / "r";
    const uint64_t seeds[] = {5, 9};
    REQUIRE(routesim_run_experiment(cfg.c_str(), out.c_str(), 2, seeds, 2) == ROUTESIM_OK);
    CHECK(std::filesystem::exists(out / "seed_5" / "kpis.json"));
    CHECK(std::filesystem::exists(out / "seed_9" / "kpis.json"));
    const uint64_t three[] = {1, 2, 3};
    CHECK(routesim_run_experiment(cfg.c_str(), (out / "x").c_str(), 2, three, 3) == ROUTESIM_ERR_INVALID_ARGUMENT);
  }

  TEST_CASE("bad config surfaces the field name") {
    const auto dir = scratch_dir("bad_cfg");
    write_text(dir / "c.json", small_config(1.5));
    routesim_env* env = nullptr;
    CHECK(routesim_env_create((dir / "c.json").c_str(), &env) == ROUTESIM_ERR_CONFIG);
    CHECK(std::string(routesim_last_error()).find("mutation.share") != std::string::npos);
    CHECK(env == nullptr);
  }
}
