#include "experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "error.hpp"

namespace routesim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& msg) {
  fail(ErrorCode::config, "config field '" + field + "': " + msg);
}

// Reads one JSON object, tracking the dotted path for diagnostics and
// rejecting keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) config_error(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    return Section(j_.at(key), field(key));
  }

  double number(const std::string& key, double def) {
    if (!has(key)) return def;
    const json& v = raw(key);
    if (v.is_string() && (v == "inf" || v == "infinity")) return std::numeric_limits<double>::infinity();
    if (!v.is_number()) config_error(field(key), "expected a number");
    return v.get<double>();
  }

  std::int64_t integer(const std::string& key, std::int64_t def) {
    if (!has(key)) return def;
    const json& v = raw(key);
    if (!v.is_number_integer()) config_error(field(key), "expected an integer");
    return v.get<std::int64_t>();
  }

  std::size_t count(const std::string& key, std::size_t def) {
    const std::int64_t v = integer(key, static_cast<std::int64_t>(def));
    if (v < 0) config_error(field(key), "must be >= 0");
    return static_cast<std::size_t>(v);
  }

  std::uint64_t seed(const std::string& key, std::uint64_t def) {
    if (!has(key)) return def;
    const json& v = raw(key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      config_error(field(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const json& v = raw(key);
    if (!v.is_boolean()) config_error(field(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    const json& v = raw(key);
    if (!v.is_string()) config_error(field(key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) config_error(field(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Runs `parse`, rethrowing any library error against the config field.
template <class F>
auto as_field(const std::string& field, F&& parse) {
  try {
    return parse();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) throw;
    config_error(field, e.what());
  }
}

fs::path existing_file(Section& s, const std::string& key, const fs::path& base) {
  fs::path p = s.string(key, "");
  if (p.empty()) config_error(s.field(key), "must name a file");
  if (p.is_relative()) p = base / p;
  p = p.lexically_normal();
  if (!fs::is_regular_file(p)) config_error(s.field(key), "file not found: " + p.string());
  return fs::absolute(p);
}

void parse_demand(Section s, ExperimentConfig& cfg, const fs::path& base) {
  if (s.has("file")) {
    cfg.demand_file = existing_file(s, "file", base);
    s.finish();
    return;
  }
  const std::int64_t n = s.integer("n_agents", 0);
  if (n < 1) config_error(s.field("n_agents"), "must be >= 1 (or give demand.file)");
  cfg.demand.n_agents = static_cast<std::size_t>(n);
  if (!s.has("od_pairs")) config_error(s.field("od_pairs"), "required when demand.file is absent");
  const json& pairs = s.raw("od_pairs");
  if (!pairs.is_array() || pairs.empty()) config_error(s.field("od_pairs"), "expected a non-empty array");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    Section p(pairs[i], s.field("od_pairs") + "[" + std::to_string(i) + "]");
    OdPair od;
    od.origin = p.string("origin", "");
    od.dest = p.string("dest", "");
    od.weight = p.number("weight", 1.0);
    if (od.origin.empty()) config_error(p.field("origin"), "required");
    if (od.dest.empty()) config_error(p.field("dest"), "required");
    if (!(od.weight > 0.0 && std::isfinite(od.weight))) config_error(p.field("weight"), "must be > 0");
    p.finish();
    cfg.demand.od_pairs.push_back(std::move(od));
  }
  if (s.has("window")) {
    const json& w = s.raw("window");
    if (!w.is_array() || w.size() != 2 || !w[0].is_number_integer() || !w[1].is_number_integer())
      config_error(s.field("window"), "expected [start, end] in whole seconds");
    cfg.demand.window_start = w[0].get<std::int64_t>();
    cfg.demand.window_end = w[1].get<std::int64_t>();
    if (cfg.demand.window_start < 0 || cfg.demand.window_end < cfg.demand.window_start)
      config_error(s.field("window"), "need 0 <= start <= end");
  }
  s.finish();
}

void parse_routes(Section s, ExperimentConfig& cfg, const fs::path& base) {
  if (s.has("file")) cfg.routes_file = existing_file(s, "file", base);
  const std::int64_t k = s.integer("k", static_cast<std::int64_t>(cfg.routes.k));
  if (k < 1) config_error(s.field("k"), "must be >= 1");
  cfg.routes.k = static_cast<std::size_t>(k);
  cfg.routes.penalty = s.number("penalty", cfg.routes.penalty);
  if (!(cfg.routes.penalty > 1.0 && std::isfinite(cfg.routes.penalty)))
    config_error(s.field("penalty"), "must be > 1");
  cfg.routes.max_detour = s.number("max_detour", cfg.routes.max_detour);
  if (!(cfg.routes.max_detour >= 1.0)) config_error(s.field("max_detour"), "must be >= 1");
  s.finish();
}

void parse_traffic(Section s, ExperimentConfig& cfg) {
  const std::string model = s.string("model", "bpr");
  if (model == "bpr") {
    Bpr b;
    b.alpha = s.number("alpha", b.alpha);
    b.beta = s.number("beta", b.beta);
    as_field(s.field("alpha"), [&] { validate(TrafficModel{b}); return 0; });
    cfg.traffic = b;
  } else if (model == "pointqueue") {
    cfg.traffic = PointQueue{};
  } else {
    config_error(s.field("model"), "expected 'bpr' or 'pointqueue', got '" + model + "'");
  }
  cfg.period_s = s.number("period_s", 0.0);
  if (!std::isfinite(cfg.period_s) || cfg.period_s < 0.0)
    config_error(s.field("period_s"), "must be >= 0 (0 means the departure span)");
  s.finish();
}

void parse_human(Section s, ExperimentConfig& cfg) {
  auto& h = cfg.human;
  const std::string model = s.string("model", std::string(to_string(h.model)));
  h.model = as_field(s.field("model"), [&] { return parse_human_model(model); });
  h.learn_rate = s.number("learn_rate", h.learn_rate);
  if (!(h.learn_rate > 0.0 && h.learn_rate <= 1.0)) config_error(s.field("learn_rate"), "must be in (0, 1]");
  h.logit_scale = s.number("logit_scale", h.logit_scale);
  if (!(h.logit_scale >= 0.0)) config_error(s.field("logit_scale"), "must be >= 0 or \"inf\"");
  h.discount = s.number("discount", h.discount);
  if (!(h.discount > 0.0 && h.discount <= 1.0)) config_error(s.field("discount"), "must be in (0, 1]");
  cfg.time_mult_spread = s.number("time_mult_spread", cfg.time_mult_spread);
  if (!(cfg.time_mult_spread >= 0.0 && cfg.time_mult_spread < 1.0))
    config_error(s.field("time_mult_spread"), "must be in [0, 1)");
  cfg.humans_learn_in_training = s.boolean("learn_during_training", cfg.humans_learn_in_training);
  cfg.humans_learn_in_testing = s.boolean("learn_during_testing", cfg.humans_learn_in_testing);
  cfg.dump_beliefs = s.boolean("dump_beliefs", cfg.dump_beliefs);
  s.finish();
}

void parse_mutation(Section s, ExperimentConfig& cfg) {
  if (s.has("ids")) {
    const json& ids = s.raw("ids");
    if (!ids.is_array()) config_error(s.field("ids"), "expected an array of agent ids");
    for (const auto& v : ids) {
      if (!v.is_number_integer()) config_error(s.field("ids"), "agent ids must be integers");
      cfg.mutation.ids.push_back(v.get<AgentId>());
    }
  }
  cfg.mutation.share = s.number("share", 0.0);
  if (!(cfg.mutation.share >= 0.0 && cfg.mutation.share <= 1.0))
    config_error(s.field("share"), "must be in [0, 1]");
  const std::string behavior = s.string("behavior", std::string(to_string(cfg.av_behavior)));
  cfg.av_behavior = as_field(s.field("behavior"), [&] { return parse_behavior(behavior); });
  s.finish();
}

void parse_learner(Section s, ExperimentConfig& cfg) {
  const std::string kind = s.string("kind", std::string(to_string(cfg.learner)));
  cfg.learner = as_field(s.field("kind"), [&] { return parse_learner_kind(kind); });
  auto& t = cfg.schedule;
  const std::int64_t episodes = s.integer("episodes", static_cast<std::int64_t>(t.episodes));
  if (episodes < 1) config_error(s.field("episodes"), "must be >= 1");
  t.episodes = static_cast<std::size_t>(episodes);
  t.epsilon_start = s.number("epsilon_start", t.epsilon_start);
  if (!(t.epsilon_start >= 0.0 && t.epsilon_start <= 1.0)) config_error(s.field("epsilon_start"), "must be in [0, 1]");
  t.epsilon_end = s.number("epsilon_end", t.epsilon_end);
  if (!(t.epsilon_end >= 0.0 && t.epsilon_end <= t.epsilon_start))
    config_error(s.field("epsilon_end"), "must be in [0, epsilon_start]");
  t.learn_rate = s.number("learn_rate", t.learn_rate);
  if (!(t.learn_rate > 0.0 && t.learn_rate <= 1.0)) config_error(s.field("learn_rate"), "must be in (0, 1]");
  s.finish();
}

json number_or_inf(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::io, "write failed: " + path.string());
}

template <class F>
void write_stream(const fs::path& path, F&& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  body(out);
  if (!out) fail(ErrorCode::io, "write failed: " + path.string());
}

}  // namespace

ExperimentConfig parse_config(const json& j, const fs::path& base_dir) {
  ExperimentConfig cfg;
  Section root(j, "");
  cfg.seed = root.seed("seed", cfg.seed);
  if (!root.has("network")) config_error("network", "required");
  cfg.network = existing_file(root, "network", base_dir);
  if (!root.has("demand")) config_error("demand", "required");
  parse_demand(root.child("demand"), cfg, base_dir);
  if (root.has("routes")) parse_routes(root.child("routes"), cfg, base_dir);
  if (root.has("traffic")) parse_traffic(root.child("traffic"), cfg);
  if (root.has("human")) parse_human(root.child("human"), cfg);
  cfg.human_episodes = root.count("human_episodes", cfg.human_episodes);
  if (root.has("mutation")) parse_mutation(root.child("mutation"), cfg);
  if (root.has("learner")) parse_learner(root.child("learner"), cfg);
  cfg.test_episodes = root.count("test_episodes", cfg.test_episodes);
  if (cfg.test_episodes < 1) config_error("test_episodes", "must be >= 1");
  if (root.has("output")) {
    fs::path out = root.string("output", "");
    if (out.empty()) config_error("output", "must not be empty");
    cfg.output = out.is_relative() ? base_dir / out : out;
  }
  root.finish();
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::config, "config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j, fs::absolute(path).parent_path());
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["network"] = cfg.network.string();
  if (cfg.demand_file) {
    j["demand"] = {{"file", cfg.demand_file->string()}};
  } else {
    json pairs = json::array();
    for (const auto& od : cfg.demand.od_pairs)
      pairs.push_back({{"origin", od.origin}, {"dest", od.dest}, {"weight", od.weight}});
    j["demand"] = {{"n_agents", cfg.demand.n_agents},
                   {"od_pairs", pairs},
                   {"window", {cfg.demand.window_start, cfg.demand.window_end}}};
  }
  j["routes"] = {{"k", cfg.routes.k}, {"penalty", cfg.routes.penalty}, {"max_detour", cfg.routes.max_detour}};
  if (cfg.routes_file) j["routes"]["file"] = cfg.routes_file->string();
  json traffic = {{"model", std::string(model_name(cfg.traffic))}, {"period_s", cfg.period_s}};
  if (const auto* b = std::get_if<Bpr>(&cfg.traffic)) {
    traffic["alpha"] = b->alpha;
    traffic["beta"] = b->beta;
  }
  j["traffic"] = traffic;
  j["human"] = {{"model", std::string(to_string(cfg.human.model))},
                {"learn_rate", cfg.human.learn_rate},
                {"logit_scale", number_or_inf(cfg.human.logit_scale)},
                {"discount", cfg.human.discount},
                {"time_mult_spread", cfg.time_mult_spread},
                {"learn_during_training", cfg.humans_learn_in_training},
                {"learn_during_testing", cfg.humans_learn_in_testing},
                {"dump_beliefs", cfg.dump_beliefs}};
  j["human_episodes"] = cfg.human_episodes;
  j["mutation"] = {{"share", cfg.mutation.share}, {"behavior", std::string(to_string(cfg.av_behavior))}};
  if (!cfg.mutation.ids.empty()) j["mutation"]["ids"] = cfg.mutation.ids;
  j["learner"] = {{"kind", std::string(to_string(cfg.learner))},
                  {"episodes", cfg.schedule.episodes},
                  {"epsilon_start", cfg.schedule.epsilon_start},
                  {"epsilon_end", cfg.schedule.epsilon_end},
                  {"learn_rate", cfg.schedule.learn_rate}};
  j["test_episodes"] = cfg.test_episodes;
  return j;
}

EnvSetup make_env_setup(const ExperimentConfig& cfg) {
  auto net = std::make_shared<const Network>(
      as_field("network", [&] { return load_network(cfg.network); }));
  EnvSetup setup;
  setup.network = net;
  if (cfg.demand_file) {
    setup.agents = as_field("demand.file", [&] { return load_demand(*cfg.demand_file, *net); });
  } else {
    DemandConfig d = cfg.demand;
    d.seed = derive_seed(cfg.seed, "demand");
    setup.agents = as_field("demand", [&] { return generate_demand(*net, d); });
  }
  if (cfg.routes_file) {
    setup.route_sets = as_field("routes.file", [&] {
      std::ifstream in(*cfg.routes_file);
      if (!in) fail(ErrorCode::io, "cannot open " + cfg.routes_file->string());
      return read_route_sets(in, *net);
    });
  }
  setup.route_params = cfg.routes;
  setup.traffic = cfg.traffic;
  setup.period_s = cfg.period_s;
  setup.human = cfg.human;
  setup.time_mult_spread = cfg.time_mult_spread;
  setup.humans_learn_in_training = cfg.humans_learn_in_training;
  setup.humans_learn_in_testing = cfg.humans_learn_in_testing;
  setup.mutation = cfg.mutation;
  setup.av_behavior = cfg.av_behavior;
  setup.seed = cfg.seed;
  return setup;
}

ExperimentResult run_pipeline(const ExperimentConfig& cfg) {
  Environment env(make_env_setup(cfg));
  ExperimentResult result;
  std::ostringstream beliefs;
  if (cfg.dump_beliefs) write_beliefs_header(beliefs);
  const auto record = [&](const EpisodeEnd& end) {
    result.recorder.record(end, env.network());
    if (!cfg.dump_beliefs) return;
    for (const auto& o : end.outcomes)
      if (o.kind == AgentKind::human) write_beliefs(beliefs, end.day, o.id, env.agent(o.id).beliefs);
  };

  run_human_phase(env, cfg.human_episodes, record);
  result.mutated = as_field("mutation", [&] { return env.mutation(); });
  TrainResult trained = as_field("learner", [&] { return train(env, cfg.learner, cfg.schedule, record); });
  result.policies = std::move(trained.policies);
  result.reward_trace = std::move(trained.reward_trace);
  evaluate(env, result.policies, cfg.test_episodes, record);
  result.summary = summarize(result.recorder.records());
  result.beliefs_csv = beliefs.str();
  return result;
}

void write_artifacts(const ExperimentResult& result, const ExperimentConfig& cfg, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());
  result.recorder.flush(dir);
  write_text(dir / "kpis.json", kpis_json(result.summary));
  write_stream(dir / "policies.csv", [&](std::ostream& out) { write_policies(out, result.policies); });
  write_text(dir / "config.json", config_to_json(cfg).dump(2) + "\n");
  if (cfg.dump_beliefs) write_text(dir / "beliefs.csv", result.beliefs_csv);
  render_charts(result.summary, dir / "charts");
}

void prepare_output_dir(const fs::path& dir) {
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir)) fail(ErrorCode::io, "output path " + dir.string() + " is not a directory");
    if (!fs::is_empty(dir)) fail(ErrorCode::io, "output directory " + dir.string() + " is not empty; refusing to overwrite");
  }
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir) {
  prepare_output_dir(out_dir);
  spdlog::info("run: seed {}, output {}", cfg.seed, out_dir.string());
  ExperimentResult result = run_pipeline(cfg);
  write_artifacts(result, cfg, out_dir);
  return result;
}

std::vector<std::uint64_t> default_seeds(std::uint64_t master, std::size_t n) {
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < n; ++i) seeds.push_back(master + i);
  return seeds;
}

std::vector<ExperimentResult> run_replications(const ExperimentConfig& cfg, const fs::path& out_dir,
                                               std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) fail(ErrorCode::invalid_argument, "need at least one replication seed");
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) fail(ErrorCode::invalid_argument, "replication seeds must be distinct");
  prepare_output_dir(out_dir);

  std::vector<ExperimentResult> results(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  {
    std::vector<std::jthread> workers;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      workers.emplace_back([&, i] {
        try {
          ExperimentConfig rep = cfg;
          rep.seed = seeds[i];
          results[i] = run_experiment(rep, out_dir / ("seed_" + std::to_string(seeds[i])));
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

void configure_logging() {
  const char* level = std::getenv("ROUTESIM_LOG");
  const std::string name = level ? level : "info";
  if (name == "error") spdlog::set_level(spdlog::level::err);
  else if (name == "debug") spdlog::set_level(spdlog::level::debug);
  else {
    spdlog::set_level(spdlog::level::info);
    if (name != "info") spdlog::warn("ROUTESIM_LOG='{}' not recognized; using info", name);
  }
}

}  // namespace routesim
