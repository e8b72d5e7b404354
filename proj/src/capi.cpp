#include "routesim/routesim.h"

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include "error.hpp"
#include "experiment.hpp"

using namespace routesim;
namespace fs = std::filesystem;

struct routesim_network {
  std::shared_ptr<const Network> net;
};

struct routesim_env {
  ExperimentConfig config;
  std::unique_ptr<Environment> env;
  std::optional<Turn> turn;
  std::map<AgentId, double> travel_times;
  std::map<AgentId, double> rewards;
};

namespace {

thread_local std::string last_error;

routesim_status status_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::parse: return ROUTESIM_ERR_PARSE;
    case ErrorCode::validation: return ROUTESIM_ERR_VALIDATION;
    case ErrorCode::duplicate_id: return ROUTESIM_ERR_DUPLICATE_ID;
    case ErrorCode::unreachable: return ROUTESIM_ERR_UNREACHABLE;
    case ErrorCode::not_found: return ROUTESIM_ERR_NOT_FOUND;
    case ErrorCode::invalid_argument: return ROUTESIM_ERR_INVALID_ARGUMENT;
    case ErrorCode::invalid_state: return ROUTESIM_ERR_INVALID_STATE;
    case ErrorCode::io: return ROUTESIM_ERR_IO;
    case ErrorCode::config: return ROUTESIM_ERR_CONFIG;
  }
  return ROUTESIM_ERR_INTERNAL;
}

template <class F>
routesim_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return ROUTESIM_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return ROUTESIM_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return ROUTESIM_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) fail(ErrorCode::invalid_argument, std::string(what) + " must not be NULL");
}

template <class F>
void write_to(const char* out_path, F&& body) {
  require(out_path, "out_path");
  if (std::string_view(out_path) == "-") {
    body(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) fail(ErrorCode::io, std::string("cannot write ") + out_path);
  body(out);
  if (!out) fail(ErrorCode::io, std::string("write failed: ") + out_path);
}

std::vector<OdPair> od_list(const routesim_od* ods, size_t n_od) {
  if (n_od > 0) require(ods, "ods");
  std::vector<OdPair> out;
  for (size_t i = 0; i < n_od; ++i) {
    require(ods[i].origin, "od.origin");
    require(ods[i].dest, "od.dest");
    out.push_back({ods[i].origin, ods[i].dest, ods[i].weight});
  }
  return out;
}

routesim_turn to_c(const Turn& t) {
  return {t.agent, t.kind == AgentKind::av ? 1 : 0, t.n_actions, t.observation.departure_bucket};
}

}  // namespace

extern "C" {

const char* routesim_version(void) { return "0.1.0"; }

const char* routesim_last_error(void) { return last_error.c_str(); }

const char* routesim_status_name(routesim_status status) {
  switch (status) {
    case ROUTESIM_OK: return "ok";
    case ROUTESIM_ERR_PARSE: return "parse";
    case ROUTESIM_ERR_VALIDATION: return "validation";
    case ROUTESIM_ERR_DUPLICATE_ID: return "duplicate_id";
    case ROUTESIM_ERR_UNREACHABLE: return "unreachable";
    case ROUTESIM_ERR_NOT_FOUND: return "not_found";
    case ROUTESIM_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case ROUTESIM_ERR_INVALID_STATE: return "invalid_state";
    case ROUTESIM_ERR_IO: return "io";
    case ROUTESIM_ERR_CONFIG: return "config";
    case ROUTESIM_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void routesim_configure_logging(void) { configure_logging(); }

routesim_status routesim_network_load(const char* path, routesim_network** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto net = std::make_shared<const Network>(load_network(path));
    *out = new routesim_network{std::move(net)};
  });
}

void routesim_network_free(routesim_network* net) { delete net; }

size_t routesim_network_node_count(const routesim_network* net) {
  return net ? net->net->nodes().size() : 0;
}

size_t routesim_network_edge_count(const routesim_network* net) {
  return net ? net->net->edges().size() : 0;
}

routesim_status routesim_generate_demand_csv(const routesim_network* net, size_t n_agents,
                                             const routesim_od* ods, size_t n_od, int64_t window_start,
                                             int64_t window_end, uint64_t seed, const char* out_path) {
  return guarded([&] {
    require(net, "net");
    DemandConfig cfg;
    cfg.n_agents = n_agents;
    cfg.window_start = window_start;
    cfg.window_end = window_end;
    cfg.seed = seed;
    cfg.od_pairs = od_list(ods, n_od);
    if (cfg.od_pairs.empty()) {
      const Network& g = *net->net;
      for (const auto& o : g.nodes()) {
        for (const auto& d : g.nodes()) {
          if (o.id == d.id) continue;
          try {
            shortest_path(g, o.id, d.id, g.free_flow_times());
            cfg.od_pairs.push_back({o.id, d.id, 1.0});
          } catch (const Error& e) {
            if (e.code() != ErrorCode::unreachable) throw;
          }
        }
      }
    }
    const auto agents = generate_demand(*net->net, cfg);
    write_to(out_path, [&](std::ostream& out) { write_demand(out, agents); });
  });
}

routesim_status routesim_generate_paths_csv(const routesim_network* net, const routesim_od* ods, size_t n_od,
                                            const char* demand_csv, size_t k, double penalty,
                                            double max_detour, const char* out_path) {
  return guarded([&] {
    require(net, "net");
    std::vector<std::pair<std::string, std::string>> pairs;
    std::set<std::pair<std::string, std::string>> seen;
    auto add = [&](const std::string& o, const std::string& d) {
      if (seen.insert({o, d}).second) pairs.emplace_back(o, d);
    };
    if (demand_csv) {
      for (const auto& a : load_demand(demand_csv, *net->net)) add(a.origin, a.dest);
    } else {
      for (const auto& od : od_list(ods, n_od)) add(od.origin, od.dest);
    }
    if (pairs.empty()) fail(ErrorCode::invalid_argument, "no OD pairs given");
    RouteGenParams params{k, penalty, max_detour};
    std::vector<RouteSet> sets;
    for (const auto& [o, d] : pairs) sets.push_back(generate_routes(*net->net, o, d, params));
    write_to(out_path, [&](std::ostream& out) { write_route_sets(out, *net->net, sets); });
  });
}

routesim_status routesim_run_experiment(const char* config_path, const char* out_dir, size_t replications,
                                        const uint64_t* seeds, size_t n_seeds) {
  return guarded([&] {
    require(config_path, "config_path");
    const ExperimentConfig cfg = load_config(config_path);
    fs::path dir;
    if (out_dir) dir = out_dir;
    else if (cfg.output) dir = *cfg.output;
    else fail(ErrorCode::config, "config field 'output': required when no output directory is given");
    if (replications == 0) replications = 1;
    if (n_seeds > 0) {
      require(seeds, "seeds");
      if (n_seeds != replications && replications != 1)
        fail(ErrorCode::invalid_argument, "number of seeds must match the number of replications");
      run_replications(cfg, dir, std::span<const uint64_t>(seeds, n_seeds));
    } else if (replications > 1) {
      const auto s = default_seeds(cfg.seed, replications);
      run_replications(cfg, dir, s);
    } else {
      run_experiment(cfg, dir);
    }
  });
}

routesim_status routesim_plot(const char* episodes_csv, const char* out_dir) {
  return guarded([&] {
    require(episodes_csv, "episodes_csv");
    require(out_dir, "out_dir");
    const auto rows = load_episodes(episodes_csv);
    render_charts(summarize(rows), out_dir);
  });
}

routesim_status routesim_env_create(const char* config_path, routesim_env** out) {
  return guarded([&] {
    require(config_path, "config_path");
    require(out, "out");
    *out = nullptr;
    auto h = std::make_unique<routesim_env>();
    h->config = load_config(config_path);
    h->env = std::make_unique<Environment>(make_env_setup(h->config));
    *out = h.release();
  });
}

void routesim_env_free(routesim_env* env) { delete env; }

routesim_status routesim_env_reset(routesim_env* env, routesim_turn* turn) {
  return guarded([&] {
    require(env, "env");
    env->turn = env->env->reset();
    if (turn) *turn = to_c(*env->turn);
  });
}

routesim_status routesim_env_step(routesim_env* env, int64_t action, routesim_turn* turn, int* done) {
  return guarded([&] {
    require(env, "env");
    std::optional<std::size_t> a;
    if (action >= 0) a = static_cast<std::size_t>(action);
    StepResult r = env->env->step(a);
    if (auto* t = std::get_if<Turn>(&r)) {
      env->turn = *t;
      if (turn) *turn = to_c(*t);
      if (done) *done = 0;
      return;
    }
    const auto& end = std::get<EpisodeEnd>(r);
    env->turn.reset();
    env->travel_times.clear();
    for (const auto& o : end.outcomes) env->travel_times[o.id] = o.travel_time;
    env->rewards = end.rewards;
    if (done) *done = 1;
  });
}

routesim_status routesim_env_observation(const routesim_env* env, uint32_t* counts, size_t capacity,
                                         size_t* len) {
  return guarded([&] {
    require(env, "env");
    if (!env->turn) fail(ErrorCode::invalid_state, "no agent is waiting to act; call reset()");
    const auto& c = env->turn->observation.counts;
    if (len) *len = c.size();
    if (capacity > 0) require(counts, "counts");
    for (size_t i = 0; i < c.size() && i < capacity; ++i) counts[i] = c[i];
  });
}

routesim_status routesim_env_mutate(routesim_env* env, int64_t* ids, size_t capacity, size_t* n_mutated) {
  return guarded([&] {
    require(env, "env");
    const auto chosen = env->env->mutation();
    if (n_mutated) *n_mutated = chosen.size();
    if (capacity > 0) require(ids, "ids");
    for (size_t i = 0; i < chosen.size() && i < capacity; ++i) ids[i] = chosen[i];
  });
}

routesim_status routesim_env_start_testing(routesim_env* env) {
  return guarded([&] {
    require(env, "env");
    env->env->start_testing();
  });
}

routesim_phase routesim_env_phase(const routesim_env* env) {
  if (!env) return ROUTESIM_PHASE_HUMAN_ONLY;
  switch (env->env->phase()) {
    case Phase::human_only: return ROUTESIM_PHASE_HUMAN_ONLY;
    case Phase::training: return ROUTESIM_PHASE_TRAINING;
    case Phase::testing: return ROUTESIM_PHASE_TESTING;
  }
  return ROUTESIM_PHASE_HUMAN_ONLY;
}

uint64_t routesim_env_day(const routesim_env* env) { return env ? env->env->day() : 0; }

size_t routesim_env_agent_count(const routesim_env* env) { return env ? env->env->agent_ids().size() : 0; }

routesim_status routesim_env_travel_time(const routesim_env* env, int64_t agent, double* travel_time) {
  return guarded([&] {
    require(env, "env");
    require(travel_time, "travel_time");
    auto it = env->travel_times.find(agent);
    if (it == env->travel_times.end())
      fail(ErrorCode::not_found, "no finished episode result for agent " + std::to_string(agent));
    *travel_time = it->second;
  });
}

routesim_status routesim_env_reward(const routesim_env* env, int64_t agent, double* reward) {
  return guarded([&] {
    require(env, "env");
    require(reward, "reward");
    auto it = env->rewards.find(agent);
    if (it == env->rewards.end())
      fail(ErrorCode::not_found, "agent " + std::to_string(agent) + " has no reward in the last episode");
    *reward = it->second;
  });
}

}  // extern "C"
