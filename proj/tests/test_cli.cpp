#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ddesolve.hpp"
#include "statics.hpp"

using namespace memsdde;

namespace {

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(MEMSDDE_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buf;
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return RunResult{WEXITSTATUS(status), out};
}

double grep_value(const std::string& text, const std::string& key) {
  const std::string needle = "\n" + key + " = ";
  auto pos = text.find(needle);
  if (pos == std::string::npos && text.rfind(key + " = ", 0) == 0)
    return std::strtod(text.c_str() + key.size() + 3, nullptr);
  REQUIRE(pos != std::string::npos);
  return std::strtod(text.c_str() + pos + needle.size(), nullptr);
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> metadata;  // trailing '#' lines
};

Csv read_csv(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  Csv csv;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      csv.metadata.push_back(line);
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      csv.header = cells;
      first = false;
      continue;
    }
    std::vector<double> row;
    for (const std::string& c : cells) row.push_back(std::strtod(c.c_str(), nullptr));
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

}  // namespace

TEST_CASE("statics command") {
  const RunResult r = run_cli("statics");
  CHECK(r.exit_code == 0);
  CHECK(grep_value(r.output, "c") == doctest::Approx(5.4e-3).epsilon(2e-2));
  CHECK(grep_value(r.output, "e") == doctest::Approx(9.9e-6).epsilon(2e-2));
  CHECK(grep_value(r.output, "x1") == doctest::Approx(6.5e-2).epsilon(1e-2));
  CHECK(r.output.find("x1_class = saddle") != std::string::npos);
  // DC default: brackets coincide with the equilibria
  CHECK(grep_value(r.output, "xi2") == grep_value(r.output, "x2"));
}

TEST_CASE("exit code contract") {
  SUBCASE("pull-in exceeded") {
    CHECK(run_cli("--set v0=123 statics").exit_code == 3);
  }
  SUBCASE("unknown configuration key") {
    CHECK(run_cli("--set vroltage=20 statics").exit_code == 2);
  }
  SUBCASE("malformed history") {
    CHECK(run_cli("simulate --history bad --out /tmp/cli_x.csv").exit_code == 2);
  }
  SUBCASE("orbit requires d below the period") {
    CHECK(run_cli("--set delta=0.1579 --set d=7.0 orbit --out /tmp/cli_x.csv").exit_code ==
          2);
  }
  SUBCASE("inapplicable check") {
    CHECK(run_cli("--set g2=0 check --which gains").exit_code == 6);
  }
  SUBCASE("failed check") {
    // reference drive at the base frequency: the sup gate fails
    CHECK(run_cli("--set delta=0.1579 check --which gains").exit_code == 1);
  }
  SUBCASE("passing check") {
    CHECK(run_cli("check --which hn").exit_code == 0);
  }
}

TEST_CASE("simulate command emits a well-formed trajectory") {
  const std::string out = "/tmp/cli_sim.csv";
  const double x2 = equilibria(9.9e-6, 20.0).x2;
  char args[256];
  std::snprintf(args, sizeof(args), "--set t_end=10 simulate --history %.17g,0 --out %s",
                x2, out.c_str());
  const RunResult r = run_cli(args);
  CHECK(r.exit_code == 0);

  const Csv csv = read_csv(out);
  REQUIRE(csv.header == std::vector<std::string>({"t", "x", "v"}));
  REQUIRE(!csv.rows.empty());
  for (const auto& row : csv.rows) {
    CHECK(std::abs(row[1] - x2) <= 1e-12);
    CHECK(std::abs(row[2]) <= 1e-12);
  }

  // round trip: the emitted samples re-parse to the in-memory trajectory
  const ActuatorParams p{9.9e-6, DampingModel::linear(5.4e-3), 3e-4, 0.37, 0.0,
                         VoltageProfile::dc(20.0, 2.0 * std::numbers::pi)};
  const Trajectory traj =
      integrate(p, InitialHistory::constant(State{x2, 0.0}),
                10.0, 2.0 * std::numbers::pi / 64.0);
  REQUIRE(csv.rows.size() == traj.times().size());
  for (size_t i = 0; i < csv.rows.size(); ++i) {
    CHECK(csv.rows[i][0] ==
          doctest::Approx(traj.times()[i]).epsilon(1e-12));
    CHECK(csv.rows[i][1] == doctest::Approx(traj.states()[i].x).epsilon(1e-12));
  }
}

TEST_CASE("simulate reports pull-in as trailing metadata") {
  const RunResult r = run_cli(
      "--set v0=20 --set delta=0 --set t_end=50 --set g1=0 --set g2=0 --set e=0.2 "
      "simulate --history 0.5,0 --out /tmp/cli_pullin.csv");
  CHECK(r.exit_code == 0);
  const Csv csv = read_csv("/tmp/cli_pullin.csv");
  REQUIRE(!csv.metadata.empty());
  CHECK(csv.metadata.back().rfind("# pullin,t=", 0) == 0);
}

TEST_CASE("orbit command") {
  SUBCASE("DC orbit is the single mean row") {
    const RunResult r = run_cli("orbit --out /tmp/cli_orbit_dc.csv");
    CHECK(r.exit_code == 0);
    const Csv csv = read_csv("/tmp/cli_orbit_dc.csv");
    REQUIRE(csv.rows.size() == 1);
    CHECK(csv.rows[0][0] == 0.0);
    CHECK(csv.rows[0][1] == doctest::Approx(equilibria(9.9e-6, 20.0).x2).epsilon(1e-10));
    bool has_residual = false;
    for (const auto& m : csv.metadata)
      if (m.rfind("# residual=", 0) == 0) has_residual = true;
    CHECK(has_residual);
  }
  SUBCASE("forced orbit records residual and multipliers") {
    const RunResult r =
        run_cli("--set delta=0.1579 orbit --mode ode --out /tmp/cli_orbit_ac.csv");
    CHECK(r.exit_code == 0);
    const Csv csv = read_csv("/tmp/cli_orbit_ac.csv");
    CHECK(csv.rows.size() > 1);
    double residual = 1.0;
    bool has_multipliers = false;
    for (const auto& m : csv.metadata) {
      if (m.rfind("# residual=", 0) == 0)
        residual = std::strtod(m.c_str() + std::string("# residual=").size(), nullptr);
      if (m.rfind("# multipliers=", 0) == 0) has_multipliers = true;
    }
    CHECK(residual < 1e-10);
    CHECK(has_multipliers);
  }
}

TEST_CASE("continue command emits a full branch") {
  const RunResult r = run_cli(
      "--set delta=0.1579 --set floquet_m=16 continue --param d --to 0.5 --steps 5 "
      "--out /tmp/cli_branch.csv");
  CHECK(r.exit_code == 0);
  const Csv csv = read_csv("/tmp/cli_branch.csv");
  REQUIRE(csv.rows.size() == 6);
  CHECK(csv.rows.front()[0] == 0.0);
  CHECK(csv.rows.back()[0] == doctest::Approx(0.5).epsilon(1e-14));
  for (const auto& row : csv.rows) CHECK(row[2] <= 1e-9);  // residual column
  bool truncated_flag = false;
  for (const auto& m : csv.metadata)
    if (m == "# truncated=0") truncated_flag = true;
  CHECK(truncated_flag);
}

TEST_CASE("d0 command emits the sweep") {
  const RunResult r = run_cli("d0 --out /tmp/cli_sweep.csv");
  CHECK(r.exit_code == 0);
  CHECK(grep_value(r.output, "d0") == doctest::Approx(18.1).epsilon(1e-2));
  const Csv csv = read_csv("/tmp/cli_sweep.csv");
  REQUIRE(csv.rows.size() == 111);  // v0 = 10..120
  for (size_t i = 0; i + 1 < csv.rows.size(); ++i)
    CHECK(csv.rows[i][1] > csv.rows[i + 1][1]);  // linear column decreasing
}

TEST_CASE("large-delay regression against the stored goldens") {
  const struct {
    const char* name;
    const char* g2;
  } cases[] = {{"large_delay_gm100.csv", "-100"}, {"large_delay_gm123.csv", "-123"}};
  for (const auto& c : cases) {
    const std::string out = std::string("/tmp/cli_") + c.name;
    const std::string args = std::string("--set d=300 --set g1=0 --set g2=") + c.g2 +
                             " --set t_end=65 simulate --history 0.99601,0.2 --out " + out;
    const RunResult r = run_cli(args);
    CHECK(r.exit_code == 0);
    const Csv fresh = read_csv(out);
    const Csv golden = read_csv(std::string(MEMSDDE_GOLDEN_DIR) + "/" + c.name);
    REQUIRE(fresh.rows.size() == golden.rows.size());
    for (size_t i = 0; i < fresh.rows.size(); ++i)
      for (size_t j = 0; j < 3; ++j) {
        const double a = fresh.rows[i][j];
        const double b = golden.rows[i][j];
        CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)));
      }
    REQUIRE(fresh.metadata.size() == golden.metadata.size());
  }
}

TEST_CASE("config file loading") {
  SUBCASE("valid file") {
    std::ofstream f("/tmp/cli_cfg.json");
    f << R"({"delta": 0.1579, "v0": 20.0})";
    f.close();
    const RunResult r = run_cli("--config /tmp/cli_cfg.json statics");
    CHECK(r.exit_code == 0);
    // AC drive separates the brackets from the equilibria
    CHECK(grep_value(r.output, "xi2") < grep_value(r.output, "eta2"));
  }
  SUBCASE("missing file") {
    CHECK(run_cli("--config /tmp/does_not_exist.json statics").exit_code == 2);
  }
  SUBCASE("invalid json") {
    std::ofstream f("/tmp/cli_bad.json");
    f << "{nope";
    f.close();
    CHECK(run_cli("--config /tmp/cli_bad.json statics").exit_code == 2);
  }
}

TEST_CASE("gates pass in the near-pull-in regime") {
  // close to the pull-in voltage the equilibrium gap drops toward 2/3 and the
  // analytic gates have room; all three verdicts flip to pass
  CHECK(run_cli("--set v0=122 --set delta=0.05 --set damping=squeeze check --which squeeze")
            .exit_code == 0);
  CHECK(run_cli("--set v0=121 --set delta=0.05 --set omega=1.95 check --which hill")
            .exit_code == 0);
  CHECK(run_cli("--set v0=121 --set delta=0.05 --set omega=1.95 check --which gains")
            .exit_code == 0);
}

TEST_CASE("orbit command reaches the unstable branch from a lower seed") {
  const RunResult r = run_cli(
      "--set delta=0.1579 orbit --mode ode --guess 0.065 --out /tmp/cli_orbit_lo.csv");
  CHECK(r.exit_code == 0);
  const Csv csv = read_csv("/tmp/cli_orbit_lo.csv");
  REQUIRE(!csv.rows.empty());
  CHECK(csv.rows[0][1] == doctest::Approx(0.065).epsilon(1e-2));  // mean near the seed
  // one multiplier far outside the unit circle marks the unstable branch
  bool unstable = false;
  for (const auto& m : csv.metadata) {
    if (m.rfind("# multipliers=(", 0) == 0) {
      const double mu = std::strtod(m.c_str() + std::string("# multipliers=(").size(), nullptr);
      unstable = std::abs(mu) > 1.0;
    }
  }
  CHECK(unstable);
}

TEST_CASE("d0 reports the unbounded sentinel without feedback") {
  const RunResult r = run_cli("--set g1=0 --set g2=0 d0");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("d0 = unbounded") != std::string::npos);
}
