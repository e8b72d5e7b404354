// Command-line front end; everything goes through the C API.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "routesim/routesim.h"

namespace {

int report(routesim_status s) {
  if (s == ROUTESIM_OK) return 0;
  std::fprintf(stderr, "error (%s): %s\n", routesim_status_name(s), routesim_last_error());
  return 1;
}

// "O:D" or "O:D:weight"
bool parse_od(const std::string& text, std::string& origin, std::string& dest, double& weight) {
  const auto a = text.find(':');
  if (a == std::string::npos || a == 0) return false;
  const auto b = text.find(':', a + 1);
  origin = text.substr(0, a);
  dest = text.substr(a + 1, b == std::string::npos ? std::string::npos : b - a - 1);
  weight = 1.0;
  if (dest.empty()) return false;
  if (b != std::string::npos) {
    try {
      std::size_t used = 0;
      weight = std::stod(text.substr(b + 1), &used);
      if (used != text.size() - b - 1) return false;
    } catch (const std::exception&) {
      return false;
    }
  }
  return true;
}

struct OdArgs {
  std::vector<std::string> origins, dests;
  std::vector<routesim_od> ods;

  bool build(const std::vector<std::string>& texts) {
    origins.resize(texts.size());
    dests.resize(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
      double w = 1.0;
      if (!parse_od(texts[i], origins[i], dests[i], w)) {
        std::fprintf(stderr, "error: bad --od '%s' (expected ORIGIN:DEST[:WEIGHT])\n", texts[i].c_str());
        return false;
      }
      ods.push_back({nullptr, nullptr, w});
    }
    for (std::size_t i = 0; i < ods.size(); ++i) {
      ods[i].origin = origins[i].c_str();
      ods[i].dest = dests[i].c_str();
    }
    return true;
  }
};

struct NetworkHandle {
  routesim_network* net = nullptr;
  ~NetworkHandle() { routesim_network_free(net); }
};

}  // namespace

int main(int argc, char** argv) {
  routesim_configure_logging();
  CLI::App app{"Day-to-day route choice simulator with learning human and AV agents"};
  app.set_version_flag("--version", std::string(routesim_version()));
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run an experiment config (human learning, mutation, training, testing)");
  std::string config;
  std::string out_dir;
  std::size_t replications = 1;
  std::vector<std::uint64_t> seeds;
  run->add_option("config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (must be empty or absent)");
  run->add_option("--replications", replications, "Concurrent replications")->check(CLI::PositiveNumber);
  run->add_option("--seeds", seeds, "Master seed per replication");

  // gen-demand
  auto* gen_demand = app.add_subcommand("gen-demand", "Generate a demand CSV");
  std::string network;
  std::size_t n_agents = 100;
  std::uint64_t seed = 0;
  std::vector<std::string> od_texts;
  std::vector<std::int64_t> window{0, 3600};
  std::string out_file = "-";
  gen_demand->add_option("--network", network, "Network CSV")->required()->check(CLI::ExistingFile);
  gen_demand->add_option("--n", n_agents, "Number of agents")->check(CLI::PositiveNumber);
  gen_demand->add_option("--seed", seed, "Random seed");
  gen_demand->add_option("--od", od_texts, "ORIGIN:DEST[:WEIGHT]; default: all reachable pairs");
  gen_demand->add_option("--window", window, "Departure window START END (s)")->expected(2);
  gen_demand->add_option("--out", out_file, "Output CSV ('-' for stdout)");

  // gen-paths
  auto* gen_paths = app.add_subcommand("gen-paths", "Generate route sets for OD pairs");
  std::string demand_file;
  std::size_t k = 3;
  double penalty = 1.3;
  double max_detour = 2.0;
  gen_paths->add_option("--network", network, "Network CSV")->required()->check(CLI::ExistingFile);
  gen_paths->add_option("--demand", demand_file, "Take OD pairs from a demand CSV")->check(CLI::ExistingFile);
  gen_paths->add_option("--od", od_texts, "ORIGIN:DEST");
  gen_paths->add_option("--k", k, "Routes per OD pair")->check(CLI::PositiveNumber);
  gen_paths->add_option("--penalty", penalty, "Edge weight factor after each use");
  gen_paths->add_option("--max-detour", max_detour, "Max free-flow time relative to the fastest route");
  gen_paths->add_option("--out", out_file, "Output CSV ('-' for stdout)");

  // plot
  auto* plot = app.add_subcommand("plot", "Render charts from an episodes.csv");
  std::string episodes;
  std::string chart_dir = "charts";
  plot->add_option("episodes", episodes, "episodes.csv from a run")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", chart_dir, "Chart directory");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    return report(routesim_run_experiment(config.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(),
                                          replications, seeds.empty() ? nullptr : seeds.data(), seeds.size()));
  }

  if (*gen_demand || *gen_paths) {
    OdArgs ods;
    if (!ods.build(od_texts)) return 2;
    NetworkHandle h;
    if (int rc = report(routesim_network_load(network.c_str(), &h.net))) return rc;
    if (*gen_demand) {
      return report(routesim_generate_demand_csv(h.net, n_agents, ods.ods.data(), ods.ods.size(), window[0],
                                                 window[1], seed, out_file.c_str()));
    }
    if (demand_file.empty() && ods.ods.empty()) {
      std::fprintf(stderr, "error: gen-paths needs --demand or at least one --od\n");
      return 2;
    }
    return report(routesim_generate_paths_csv(h.net, ods.ods.data(), ods.ods.size(),
                                              demand_file.empty() ? nullptr : demand_file.c_str(), k, penalty,
                                              max_detour, out_file.c_str()));
  }

  return report(routesim_plot(episodes.c_str(), chart_dir.c_str()));
}
