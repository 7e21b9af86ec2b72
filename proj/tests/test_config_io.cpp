#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "thermovisc/config.hpp"
#include "thermovisc/io.hpp"

using namespace thermovisc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string smoke_text() { return slurp(std::string(TV_SOURCE_DIR) + "/configs/smoke_damage_1d.ini"); }

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.violations;
  }
  return {};
}

bool has(const std::vector<std::string>& v, const std::string& s) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& x) { return x.find(s) != std::string::npos; });
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("thermovisc_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Trajectory short_run(RunConfig& c) {
  c.T = 0.125;
  const RunSetup rs = make_run_setup(c);
  return run_simulation(rs.pb, rs.init, rs.src, rs.T, rs.tau);
}

}  // namespace

TEST_CASE("minimal config takes defaults") {
  const RunConfig c = parse_config("[mesh]\ndim = 1\nnx = 5\n");
  CHECK(c.mesh.dim == 1);
  CHECK(c.mesh.res[0] == 5);
  CHECK(c.tau == doctest::Approx(1.0 / 64));
  CHECK(validate_config(c).empty());
}

TEST_CASE("smoke configs parse and build") {
  const RunConfig c = parse_config(smoke_text());
  CHECK(c.mp.mu_flag == 1);
  CHECK(c.g.kind == "gaussian");
  const RunSetup rs = make_run_setup(c);
  CHECK(rs.pb.mesh.n_nodes() == 17);
  CHECK(rs.init.theta.minCoeff() == doctest::Approx(0.6));
}

TEST_CASE("invalid configs list each violation") {
  std::string neg = smoke_text();
  neg.replace(neg.find("h = constant 0.1"), 16, "h = constant 0.1\ng = constant -1");
  CHECK(has(violations_of(neg), "g must be nonnegative"));

  std::string k = smoke_text();
  k.replace(k.find("kappa = 2"), 9, "kappa = 0.5");
  CHECK(has(violations_of(k), "kappa > 1"));

  CHECK(has(violations_of("[mesh]\nfoo = 1\n"), "unknown key [mesh] foo"));
  CHECK(has(violations_of("[mesh]\nnx = banana\n"), "[mesh] nx"));

  // several problems at once are all reported
  const auto all = violations_of("[material]\nkappa = 0.5\n[time]\ntau = -1\n[sources]\ng = constant -1\n");
  CHECK(has(all, "kappa > 1"));
  CHECK(has(all, "tau > 0"));
  CHECK(has(all, "g must be nonnegative"));

  CHECK(has(violations_of("[initial]\ntheta0 = constant 0.1\n[material]\ntheta_star = 0.5\n"),
            "theta0 >= theta_star > 0"));
  CHECK(has(violations_of("[initial]\nchi0 = constant 1.5\n"), "chi0 in [0,1]"));
  CHECK(has(violations_of("[time]\ntau = 4\n"), "1/(2 sqrt(tau)) > lambda"));
  CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), std::exception);
}

TEST_CASE("config_to_text round trip is lossless") {
  RunConfig c = parse_config(smoke_text());
  c.mp.rho = 0.1 + 0.2;  // not exactly representable in short decimal form
  c.study.deltas = {0.3, 1.0 / 3.0};
  const std::string a = config_to_text(c);
  const RunConfig d = parse_config(a);
  CHECK(config_to_text(d) == a);
  CHECK(d.mp.rho == c.mp.rho);
  CHECK(d.study.deltas == c.study.deltas);
}

TEST_CASE("trajectory write/read reproduces every double") {
  RunConfig c = parse_config(smoke_text());
  const Trajectory tr = short_run(c);
  const fs::path dir = scratch("traj");
  const std::string path = (dir / "t.txt").string();
  write_trajectory(path, c, tr);
  const StoredRun back = read_trajectory(path);
  CHECK(config_to_text(back.config) == config_to_text(c));
  REQUIRE(back.trajectory.states.size() == tr.states.size());
  REQUIRE(back.trajectory.n_steps() == tr.n_steps());
  for (size_t k = 0; k < tr.states.size(); ++k) {
    const State &a = tr.states[k], &b = back.trajectory.states[k];
    CHECK(a.t == b.t);
    CHECK(a.theta == b.theta);
    CHECK(a.u == b.u);
    CHECK(a.v == b.v);
    CHECK(a.chi == b.chi);
    CHECK(a.xi == b.xi);
    CHECK(a.zeta == b.zeta);
  }
  for (int k = 0; k < tr.n_steps(); ++k) {
    CHECK(tr.data[k].f == back.trajectory.data[k].f);
    CHECK(tr.data[k].g == back.trajectory.data[k].g);
    CHECK(tr.diag[k].tau == back.trajectory.diag[k].tau);
    CHECK(tr.diag[k].chi_objective == back.trajectory.diag[k].chi_objective);
    CHECK(tr.diag[k].M == back.trajectory.diag[k].M);
  }
  // verification of the stored run matches the in-memory one
  const RunSetup rs = make_run_setup(c);
  CHECK(verify_trajectory(rs.pb, tr).key_values() ==
        verify_trajectory(make_run_setup(back.config).pb, back.trajectory).key_values());

  std::ofstream(dir / "bad.txt") << "TRAJECTORY v9\n";
  CHECK_THROWS(read_trajectory((dir / "bad.txt").string()));
}

TEST_CASE("output files") {
  RunConfig c = parse_config(smoke_text());
  c.snapshot_every = 4;
  const Trajectory tr = short_run(c);
  const RunSetup rs = make_run_setup(c);
  const fs::path dir = scratch("out");
  write_outputs(dir.string(), c, rs.pb, tr, verify_trajectory(rs.pb, tr));
  for (const char* f : {"timeseries.dat", "trajectory.txt", "config.ini", "report.txt", "report.kv",
                        "snapshot_000000.dat", "snapshot_000004.dat", "snapshot_000008.dat"})
    CHECK(fs::exists(dir / f));
  CHECK_FALSE(fs::exists(dir / "snapshot_000002.dat"));

  const auto [names, rows] = read_timeseries((dir / "timeseries.dat").string());
  CHECK(names.size() == 12);
  CHECK(names[2] == "energy");
  REQUIRE(rows.size() == tr.states.size());
  CHECK(rows.back().values[0] == doctest::Approx(0.125));
  CHECK(rows[3].values[1] == doctest::Approx(1.0 / 64));

  std::istringstream snap(slurp((dir / "snapshot_000008.dat").string()));
  std::string l1, l2, l3;
  std::getline(snap, l1);
  std::getline(snap, l2);
  CHECK(l2 == "# node x theta u0 v0 chi xi");
  int count = 0;
  while (std::getline(snap, l3)) ++count;
  CHECK(count == 17);
  CHECK(parse_config(slurp((dir / "config.ini").string())).T == c.T);
  CHECK(slurp((dir / "report.kv").string()).find("summary.pass=1") != std::string::npos);
}

TEST_CASE("empty trajectory gives header-only timeseries") {
  RunConfig c = parse_config(smoke_text());
  const RunSetup rs = make_run_setup(c);
  const fs::path dir = scratch("empty");
  write_timeseries((dir / "ts.dat").string(), rs.pb, Trajectory{});
  const auto [names, rows] = read_timeseries((dir / "ts.dat").string());
  CHECK(names.size() == 12);
  CHECK(rows.empty());
}

TEST_CASE("2D snapshot columns") {
  RunConfig c;
  c.mesh.dim = 2;
  c.mesh.res = {4, 3};
  const RunSetup rs = make_run_setup(c);
  const fs::path dir = scratch("snap2d");
  write_snapshot((dir / "s.dat").string(), rs.pb.mesh, rs.init);
  std::istringstream snap(slurp((dir / "s.dat").string()));
  std::string l1, l2;
  std::getline(snap, l1);
  std::getline(snap, l2);
  CHECK(l2 == "# node x y theta u0 u1 v0 v1 chi xi");
}

TEST_CASE("output directory override") {
  RunConfig c;
  c.output_dir = "from_config";
  ::unsetenv("THERMOVISC_OUTPUT_DIR");
  CHECK(resolve_output_dir(c) == "from_config");
  ::setenv("THERMOVISC_OUTPUT_DIR", "/tmp/elsewhere", 1);
  CHECK(resolve_output_dir(c) == "/tmp/elsewhere");
  ::unsetenv("THERMOVISC_OUTPUT_DIR");
}
