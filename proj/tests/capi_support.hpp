#pragma once
// Helpers for the C API and CLI tests; these link only the shared library.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace capi_testing {

inline std::filesystem::path data_path(const std::string& rel) {
  return std::filesystem::path(ROUTESIM_DATA_DIR) / rel;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("routesim_capi_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Small two-route experiment: 6 agents, a third of them become AVs.
inline std::string small_config(double share = 0.34, const std::string& extra = "") {
  std::ostringstream j;
  j << "{\"seed\": 3, \"network\": \"" << data_path("networks/two_route.csv").string() << "\",\n"
    << " \"demand\": {\"n_agents\": 6, \"od_pairs\": [{\"origin\": \"O\", \"dest\": \"D\"}], \"window\": [0, 120]},\n"
    << " \"human_episodes\": 4, \"mutation\": {\"share\": " << share << "},\n"
    << " \"learner\": {\"kind\": \"iql\", \"episodes\": 5}, \"test_episodes\": 2" << extra << "}\n";
  return j.str();
}

inline std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace capi_testing
