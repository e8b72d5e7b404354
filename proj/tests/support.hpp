#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "netgraph.hpp"

namespace testing {

inline std::filesystem::path data_path(const std::string& rel) {
  return std::filesystem::path(ROUTESIM_DATA_DIR) / rel;
}

inline routesim::Network net_from(const std::string& csv) {
  std::istringstream in(csv);
  return routesim::parse_network(in);
}

inline routesim::Network two_route() { return routesim::load_network(data_path("networks/two_route.csv")); }
inline routesim::Network three_route() { return routesim::load_network(data_path("networks/three_route.csv")); }
inline routesim::Network grid3x3() { return routesim::load_network(data_path("networks/grid3x3.csv")); }

/// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("routesim_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Random connected-ish directed graph with n nodes; the property tests use it
/// as a brute-force playground. Edge ids are "e<k>".
inline routesim::Network random_network(std::mt19937_64& gen, int n_nodes, double edge_prob) {
  std::ostringstream csv;
  csv << "node,id,x,y\n";
  for (int i = 0; i < n_nodes; ++i) csv << "node,n" << i << ",,\n";
  csv << "edge,id,from,to,length,speed,capacity\n";
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> len(1, 9);
  int k = 0;
  for (int a = 0; a < n_nodes; ++a) {
    // a chain keeps node 0 connected to the last node
    if (a + 1 < n_nodes) csv << "edge,e" << k++ << ",n" << a << ",n" << a + 1 << ',' << len(gen) * 10 << ",10,100\n";
    for (int b = 0; b < n_nodes; ++b) {
      if (a == b || b == a + 1) continue;
      if (u(gen) < edge_prob) csv << "edge,e" << k++ << ",n" << a << ",n" << b << ',' << len(gen) * 10 << ",10,100\n";
    }
  }
  return net_from(csv.str());
}

}  // namespace testing
