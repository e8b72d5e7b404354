#include "recorder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "error.hpp"

namespace routesim {

namespace fs = std::filesystem;

void Recorder::add(EpisodeRecord row) {
  if (!(row.travel_time > 0.0) || !std::isfinite(row.travel_time))
    fail(ErrorCode::invalid_argument, "episode record with non-positive travel time");
  if (!rows_.empty() && row.episode < current_episode_)
    fail(ErrorCode::invalid_argument, "episode records must be appended in order");
  if (rows_.empty() || row.episode != current_episode_) {
    if (!rows_.empty()) {
      if (agent_set_.empty()) agent_set_ = current_episode_ids_;
      if (current_episode_ids_ != agent_set_)
        fail(ErrorCode::invalid_argument, "episode " + std::to_string(current_episode_) +
                                              " has a different agent set");
    }
    current_episode_ = row.episode;
    current_episode_ids_.clear();
  }
  if (!agent_set_.empty() && !agent_set_.count(row.id))
    fail(ErrorCode::invalid_argument, "agent " + std::to_string(row.id) + " is not part of the recorded population");
  if (!current_episode_ids_.insert(row.id).second)
    fail(ErrorCode::invalid_argument, "agent " + std::to_string(row.id) + " recorded twice in episode " +
                                          std::to_string(row.episode));
  rows_.push_back(std::move(row));
}

void Recorder::record(const EpisodeEnd& end, const Network& net) {
  for (const auto& o : end.outcomes) {
    add(EpisodeRecord{end.day, end.phase, o.id, o.kind, o.origin, o.dest, o.route_index,
                      o.departure, o.travel_time, o.reward});
  }
  for (EdgeIndex e = 0; e < end.edge_flows.size(); ++e)
    flows_.push_back({end.day, net.edge(e).id, end.edge_flows[e]});
}

void Recorder::write_episodes(std::ostream& out) const {
  out << "episode,phase,id,kind,origin,dest,route_index,departure,travel_time,reward\n";
  for (const auto& r : rows_) {
    out << r.episode << ',' << to_string(r.phase) << ',' << r.id << ',' << to_string(r.kind) << ','
        << r.origin << ',' << r.dest << ',' << r.route_index << ',' << r.departure << ','
        << csv::format_number(r.travel_time) << ','
        << (r.reward ? csv::format_number(*r.reward) : "") << '\n';
  }
}

void Recorder::write_flows(std::ostream& out) const {
  out << "episode,edge,flow\n";
  for (const auto& f : flows_) out << f.episode << ',' << f.edge << ',' << f.flow << '\n';
}

void Recorder::flush(const fs::path& dir) const {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream episodes(dir / "episodes.csv", std::ios::binary);
  std::ofstream flows(dir / "flows.csv", std::ios::binary);
  if (!episodes || !flows) fail(ErrorCode::io, "cannot write records into '" + dir.string() + "'");
  write_episodes(episodes);
  write_flows(flows);
  if (!episodes.good() || !flows.good())
    fail(ErrorCode::io, "failed writing records into '" + dir.string() + "'");
}

std::vector<EpisodeRecord> read_episodes(std::istream& in) {
  csv::LineReader reader(in);
  auto header = reader.next();
  const std::vector<std::string> expected{"episode", "phase",       "id",        "kind",
                                          "origin",  "dest",        "route_index", "departure",
                                          "travel_time", "reward"};
  if (!header || csv::split_row(*header) != expected)
    fail(ErrorCode::parse, "episodes file has an unexpected header");
  std::vector<EpisodeRecord> rows;
  while (auto line = reader.next()) {
    const std::string where = "episodes line " + std::to_string(reader.line_number());
    auto f = csv::split_row(*line);
    if (f.size() != expected.size()) fail(ErrorCode::parse, where + ": wrong field count");
    EpisodeRecord r;
    r.episode = static_cast<std::uint64_t>(csv::parse_int(f[0], where + " episode"));
    r.phase = parse_phase(f[1]);
    r.id = csv::parse_int(f[2], where + " id");
    try {
      r.kind = parse_agent_kind(f[3]);
    } catch (const Error& e) {
      fail(ErrorCode::parse, where + ": " + e.what());
    }
    r.origin = f[4];
    r.dest = f[5];
    r.route_index = static_cast<std::size_t>(csv::parse_int(f[6], where + " route_index"));
    r.departure = csv::parse_int(f[7], where + " departure");
    r.travel_time = csv::parse_double(f[8], where + " travel_time");
    if (!f[9].empty()) r.reward = csv::parse_double(f[9], where + " reward");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<EpisodeRecord> load_episodes(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open episodes file '" + path.string() + "'");
  return read_episodes(in);
}

std::string od_key(const std::string& origin, const std::string& dest) {
  return origin + "|" + dest;
}

namespace {

// Running sums for one group of rows (an episode or a whole phase).
struct Accumulator {
  double human_sum = 0.0, av_sum = 0.0, reward_sum = 0.0;
  std::size_t humans = 0, avs = 0, rewards = 0;
  std::map<std::string, std::vector<std::size_t>> choices;

  void add(const EpisodeRecord& r, const std::map<std::string, std::size_t>& widths) {
    if (r.kind == AgentKind::human) {
      human_sum += r.travel_time;
      ++humans;
    } else {
      av_sum += r.travel_time;
      ++avs;
    }
    if (r.reward) {
      reward_sum += *r.reward;
      ++rewards;
    }
    const auto key = od_key(r.origin, r.dest);
    auto& counts = choices[key];
    counts.resize(widths.at(key), 0);
    ++counts[r.route_index];
  }

  template <class Kpi>
  void fill(Kpi& k) const {
    if (humans) k.mean_tt_human = human_sum / humans;
    if (avs) k.mean_tt_av = av_sum / avs;
    k.mean_tt_all = (human_sum + av_sum) / static_cast<double>(humans + avs);
    if (rewards) k.mean_reward_av = reward_sum / rewards;
    if (k.mean_tt_human && k.mean_tt_av) k.tt_ratio = *k.mean_tt_human / *k.mean_tt_av;
    for (const auto& [key, counts] : choices) {
      std::size_t total = 0;
      for (auto c : counts) total += c;
      std::vector<double> fractions;
      for (auto c : counts) fractions.push_back(static_cast<double>(c) / total);
      k.choice_fractions.emplace(key, std::move(fractions));
    }
  }
};

}  // namespace

KpiSummary summarize(std::span<const EpisodeRecord> rows) {
  if (rows.empty()) fail(ErrorCode::invalid_argument, "cannot summarize an empty record store");
  std::map<std::string, std::size_t> widths;
  for (const auto& r : rows) {
    auto& w = widths[od_key(r.origin, r.dest)];
    w = std::max(w, r.route_index + 1);
  }
  std::map<std::uint64_t, std::pair<Phase, Accumulator>> per_episode;
  std::map<Phase, std::pair<std::set<std::uint64_t>, Accumulator>> per_phase;
  for (const auto& r : rows) {
    auto& [phase, acc] = per_episode[r.episode];
    phase = r.phase;
    acc.add(r, widths);
    auto& [episodes, phase_acc] = per_phase[r.phase];
    episodes.insert(r.episode);
    phase_acc.add(r, widths);
  }
  KpiSummary summary;
  for (const auto& [episode, entry] : per_episode) {
    EpisodeKpi k;
    k.episode = episode;
    k.phase = entry.first;
    entry.second.fill(k);
    summary.episodes.push_back(std::move(k));
  }
  for (const auto& [phase, entry] : per_phase) {
    PhaseKpi k;
    k.episodes = entry.first.size();
    entry.second.fill(k);
    summary.phases.emplace(phase, std::move(k));
  }
  return summary;
}

namespace {

double round6(double v) { return std::stod(csv::format_significant(v, 6)); }

template <class Kpi>
nlohmann::json kpi_json(const Kpi& k) {
  nlohmann::json j;
  auto put = [&](const char* name, const std::optional<double>& v) {
    if (v) j[name] = round6(*v);
  };
  put("mean_tt_human", k.mean_tt_human);
  put("mean_tt_av", k.mean_tt_av);
  j["mean_tt_all"] = round6(k.mean_tt_all);
  put("mean_reward_av", k.mean_reward_av);
  put("tt_ratio_human_av", k.tt_ratio);
  nlohmann::json fractions = nlohmann::json::object();
  for (const auto& [od, f] : k.choice_fractions) {
    nlohmann::json arr = nlohmann::json::array();
    for (double v : f) arr.push_back(round6(v));
    fractions[od] = std::move(arr);
  }
  j["choice_fractions"] = std::move(fractions);
  return j;
}

}  // namespace

std::string kpis_json(const KpiSummary& summary) {
  nlohmann::json root;
  nlohmann::json episodes = nlohmann::json::array();
  for (const auto& k : summary.episodes) {
    auto j = kpi_json(k);
    j["episode"] = k.episode;
    j["phase"] = std::string(to_string(k.phase));
    episodes.push_back(std::move(j));
  }
  root["episodes"] = std::move(episodes);
  nlohmann::json phases = nlohmann::json::object();
  for (const auto& [phase, k] : summary.phases) {
    auto j = kpi_json(k);
    j["episodes"] = k.episodes;
    phases[std::string(to_string(phase))] = std::move(j);
  }
  root["phases"] = std::move(phases);
  return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// SVG line charts

namespace {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 70, kRight = 180, kTop = 40, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string line_chart(const std::string& title, const std::string& y_label,
                       const std::vector<Series>& series, double x_min, double x_max) {
  double y_min = INFINITY, y_max = -INFINITY;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  if (!std::isfinite(y_min)) y_min = 0, y_max = 1;
  if (y_max - y_min < 1e-12) y_min -= 1, y_max += 1;
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;

  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  const double x_span = x_max > x_min ? x_max - x_min : 1.0;
  auto px = [&](double x) { return kLeft + (x_max > x_min ? (x - x_min) / x_span * plot_w : plot_w / 2); };
  auto py = [&](double y) { return kTop + (y_max - y) / (y_max - y_min) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt2(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" << escape(title) << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#444\"/>\n";

  // x ticks: five evenly spaced integer episode labels, always including both ends.
  std::vector<long long> ticks;
  for (int i = 0; i <= 4; ++i) {
    const auto t = std::llround(x_min + (x_max - x_min) * i / 4.0);
    if (ticks.empty() || ticks.back() != t) ticks.push_back(t);
  }
  for (long long t : ticks) {
    const double x = px(static_cast<double>(t));
    svg << "<line x1=\"" << fmt2(x) << "\" y1=\"" << fmt2(kTop + plot_h) << "\" x2=\"" << fmt2(x)
        << "\" y2=\"" << fmt2(kTop + plot_h + 5) << "\" stroke=\"#444\"/>\n";
    svg << "<text class=\"xtick\" x=\"" << fmt2(x) << "\" y=\"" << fmt2(kTop + plot_h + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << t << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double v = y_min + (y_max - y_min) * i / 4.0;
    const double y = py(v);
    svg << "<text class=\"ytick\" x=\"" << fmt2(kLeft - 6) << "\" y=\"" << fmt2(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << csv::format_significant(v, 4) << "</text>\n";
  }
  svg << "<text x=\"" << fmt2(kLeft + plot_w / 2) << "\" y=\"" << fmt2(kHeight - 10)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">episode</text>\n";
  svg << "<text x=\"16\" y=\"" << fmt2(kTop + plot_h / 2) << "\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
      << fmt2(kTop + plot_h / 2) << ")\">" << escape(y_label) << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    if (s.points.size() == 1) {
      svg << "<circle cx=\"" << fmt2(px(s.points[0].first)) << "\" cy=\"" << fmt2(py(s.points[0].second))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    } else if (!s.points.empty()) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t p = 0; p < s.points.size(); ++p) {
        if (p) svg << ' ';
        svg << fmt2(px(s.points[p].first)) << ',' << fmt2(py(s.points[p].second));
      }
      svg << "\"/>\n";
    }
    const double ly = kTop + 14 + 18.0 * i;
    svg << "<rect x=\"" << fmt2(kWidth - kRight + 12) << "\" y=\"" << fmt2(ly - 9)
        << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << fmt2(kWidth - kRight + 30) << "\" y=\"" << fmt2(ly + 1)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.name) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out.good()) fail(ErrorCode::io, "failed writing '" + path.string() + "'");
}

}  // namespace

std::vector<fs::path> render_charts(const KpiSummary& summary, const fs::path& dir) {
  if (summary.episodes.empty()) fail(ErrorCode::invalid_argument, "nothing to plot");
  std::error_code ec;
  fs::create_directories(dir, ec);
  const double x_min = static_cast<double>(summary.episodes.front().episode);
  const double x_max = static_cast<double>(summary.episodes.back().episode);

  std::vector<Series> times{{"human", {}}, {"AV", {}}, {"all", {}}};
  std::vector<Series> rewards{{"AV mean reward", {}}};
  std::map<std::string, Series> choices;
  for (const auto& k : summary.episodes) {
    const auto x = static_cast<double>(k.episode);
    if (k.mean_tt_human) times[0].points.emplace_back(x, *k.mean_tt_human);
    if (k.mean_tt_av) times[1].points.emplace_back(x, *k.mean_tt_av);
    times[2].points.emplace_back(x, k.mean_tt_all);
    if (k.mean_reward_av) rewards[0].points.emplace_back(x, *k.mean_reward_av);
    for (const auto& [od, fractions] : k.choice_fractions) {
      for (std::size_t r = 0; r < fractions.size(); ++r) {
        const std::string name = od + " route " + std::to_string(r);
        auto& s = choices[name];
        s.name = name;
        s.points.emplace_back(x, fractions[r]);
      }
    }
  }
  std::vector<Series> choice_series;
  for (auto& [name, s] : choices) choice_series.push_back(std::move(s));

  std::vector<fs::path> written{dir / "travel_times.svg", dir / "rewards.svg",
                                dir / "route_choices.svg"};
  write_file(written[0], line_chart("Mean travel time per group", "seconds", times, x_min, x_max));
  write_file(written[1], line_chart("Mean AV reward", "reward", rewards, x_min, x_max));
  write_file(written[2], line_chart("Route choice fractions", "fraction", choice_series, x_min, x_max));
  return written;
}

}  // namespace routesim
