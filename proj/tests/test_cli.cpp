#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include "capi_support.hpp"

using namespace capi_testing;

namespace {

struct Output {
  int rc = -1;
  std::string text;  // stdout and stderr together
};

Output cli(const std::string& args) {
  const std::string cmd = std::string("\"") + ROUTESIM_CLI_PATH + "\" " + args + " 2>&1";
  Output out;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.text.append(buf, n);
  const int status = pclose(p);
  out.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

std::string quoted(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and version") {
    CHECK(cli("--help").rc == 0);
    const auto v = cli("--version");
    CHECK(v.rc == 0);
    CHECK(v.text.find("0.1.0") != std::string::npos);
    CHECK(cli("").rc != 0);
  }

  TEST_CASE("gen-demand twice with one seed gives identical output") {
    const auto net = quoted(data_path("networks/two_route.csv"));
    const auto a = cli("gen-demand --network " + net + " --n 30 --seed 4 --od O:D --window 0 900");
    const auto b = cli("gen-demand --network " + net + " --n 30 --seed 4 --od O:D --window 0 900");
    REQUIRE(a.rc == 0);
    CHECK(a.text == b.text);
    CHECK(count_lines(a.text) == 31);
    const auto c = cli("gen-demand --network " + net + " --n 30 --seed 5 --od O:D --window 0 900");
    CHECK(c.text != a.text);
  }

  TEST_CASE("gen-demand without --od uses every reachable pair") {
    const auto out = cli("gen-demand --network " + quoted(data_path("networks/grid3x3.csv")) + " --n 50 --seed 1");
    REQUIRE(out.rc == 0);
    CHECK(count_lines(out.text) == 51);
  }

  TEST_CASE("gen-paths --k 3 on the two-route network lists both routes") {
    const auto dir = scratch_dir("cli_paths");
    const auto file = dir / "routes.csv";
    const auto r = cli("gen-paths --network " + quoted(data_path("networks/two_route.csv")) +
                       " --od O:D --k 3 --out " + quoted(file));
    REQUIRE(r.rc == 0);
    const auto text = slurp(file);
    CHECK(count_lines(text) == 3);
    CHECK(text.find("oa;ad") != std::string::npos);
    CHECK(text.find("ob;bd") != std::string::npos);
  }

  TEST_CASE("gen-paths from a demand file") {
    const auto dir = scratch_dir("cli_paths_demand");
    const auto net = quoted(data_path("networks/grid3x3.csv"));
    REQUIRE(cli("gen-demand --network " + net + " --n 10 --seed 2 --od n00:n22 --od n22:n00 --out " +
                quoted(dir / "d.csv")).rc == 0);
    const auto r = cli("gen-paths --network " + net + " --demand " + quoted(dir / "d.csv") + " --k 2");
    REQUIRE(r.rc == 0);
    CHECK(count_lines(r.text) == 5);
  }

  TEST_CASE("run writes every artifact and plot renders three charts") {
    const auto dir = scratch_dir("cli_run");
    write_text(dir / "c.json", small_config());
    const auto r = cli("run " + quoted(dir / "c.json") + " --out " + quoted(dir / "out"));
    REQUIRE(r.rc == 0);
    for (const char* f : {"episodes.csv", "flows.csv", "kpis.json", "policies.csv", "config.json",
                          "charts/travel_times.svg", "charts/rewards.svg", "charts/route_choices.svg"})
      CHECK(std::filesystem::exists(dir / "out" / f));

    const auto p = cli("plot " + quoted(dir / "out" / "episodes.csv") + " --out " + quoted(dir / "charts"));
    REQUIRE(p.rc == 0);
    std::size_t svgs = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir / "charts")) svgs += e.path().extension() == ".svg";
    CHECK(svgs == 3);

    // Rerunning into the same directory is refused.
    CHECK(cli("run " + quoted(dir / "c.json") + " --out " + quoted(dir / "out")).rc != 0);
  }

  TEST_CASE("run with replications") {
    const auto dir = scratch_dir("cli_reps");
    write_text(dir / "c.json", small_config());
    REQUIRE(cli("run " + quoted(dir / "c.json") + " --out " + quoted(dir / "out") + " --replications 2").rc == 0);
    CHECK(std::filesystem::exists(dir / "out" / "seed_3" / "episodes.csv"));
    CHECK(std::filesystem::exists(dir / "out" / "seed_4" / "episodes.csv"));
  }

  TEST_CASE("an out-of-range share fails and names the field") {
    const auto dir = scratch_dir("cli_bad");
    write_text(dir / "c.json", small_config(1.5));
    const auto r = cli("run " + quoted(dir / "c.json") + " --out " + quoted(dir / "out"));
    CHECK(r.rc != 0);
    CHECK(r.text.find("mutation.share") != std::string::npos);
  }
}
