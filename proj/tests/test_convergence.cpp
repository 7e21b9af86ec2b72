#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "thermovisc/config.hpp"
#include "thermovisc/convergence.hpp"

using namespace thermovisc;

namespace {

Mesh unit_line(int n) {
  MeshSpec s;
  s.dim = 1;
  s.res = {n, 1};
  return build_mesh(s);
}

// constant-in-space theta with the given values at the given times
Trajectory scalar_trajectory(const Mesh& m, const std::vector<double>& t, const std::vector<double>& val) {
  Trajectory tr;
  const int n = m.n_nodes();
  for (size_t k = 0; k < t.size(); ++k) {
    State s;
    s.t = t[k];
    s.theta = Vec::Constant(n, val[k]);
    s.u = s.v = s.xi = s.zeta = Vec::Zero(n);
    s.chi = Vec::Constant(n, val[k]);
    tr.states.push_back(s);
    if (k > 0) {
      tr.data.emplace_back();
      StepDiagnostics d;
      d.tau = t[k] - t[k - 1];
      tr.diag.push_back(d);
    }
  }
  return tr;
}

RunSetup equilibrium_setup() {
  RunConfig c;
  c.mesh.dim = 1;
  c.mesh.res = {9, 1};
  c.theta0 = {"constant", {1.0}};
  c.chi0 = {"constant", {1.0}};
  c.T = 0.25;
  c.tau = 1.0 / 16;
  return make_run_setup(c);
}

}  // namespace

TEST_CASE("interpolants") {
  const Mesh m = unit_line(3);
  const Trajectory tr = scalar_trajectory(m, {0.0, 0.5, 1.0}, {0.0, 1.0, 3.0});
  const Interpolants ip(tr, Field::Theta);
  CHECK(ip.right_constant(0.25)(0) == 1.0);
  CHECK(ip.left_constant(0.25)(0) == 0.0);
  CHECK(ip.linear(0.25)(0) == doctest::Approx(0.5));
  CHECK(ip.right_constant(0.5)(0) == 1.0);  // right-continuous at the grid point from the left interval
  CHECK(ip.right_constant(0.75)(0) == 3.0);
  CHECK(ip.linear(0.75)(0) == doctest::Approx(2.0));
  CHECK(ip.linear(1.0)(0) == doctest::Approx(3.0));
  CHECK(ip.at(2)(1) == 3.0);
}

TEST_CASE("distances against hand-computed values") {
  const Mesh m = unit_line(3);  // lumped masses sum to 1
  const Trajectory a = scalar_trajectory(m, {0.0, 0.5, 1.0}, {0.0, 1.0, 3.0});
  const Trajectory z = scalar_trajectory(m, {0.0, 0.25, 0.5, 0.75, 1.0}, {0.0, 0.0, 0.0, 0.0, 0.0});
  CHECK(distance_L2L2(m, a, z, Field::Theta) == doctest::Approx(std::sqrt(0.5 * 1 + 0.5 * 9)));
  CHECK(distance_LinfL2(m, a, z, Field::Theta) == doctest::Approx(3.0));
  CHECK(distance_C0L2(m, a, z, Field::Theta) == doctest::Approx(3.0));
  // constants have no gradient, so H1 equals L2 here
  CHECK(distance_L2H1(m, a, z, Field::Theta) == doctest::Approx(distance_L2L2(m, a, z, Field::Theta)));
  // merged grid: b jumps to 2 at t = 0.25
  const Trajectory b = scalar_trajectory(m, {0.0, 0.25, 1.0}, {0.0, 2.0, 2.0});
  const double expect = std::sqrt(0.25 * 1 + 0.25 * 1 + 0.5 * 1);
  CHECK(distance_L2L2(m, a, b, Field::Theta) == doctest::Approx(expect));
  CHECK(distance_L2L2(m, b, a, Field::Theta) == doctest::Approx(expect));
  // piecewise linear difference peaks at a grid time: |1 - 2| at 0.5 vs |0 - 2| at 0.25 (a = 0.5 there)
  CHECK(distance_C0L2(m, a, b, Field::Theta) == doctest::Approx(1.5));
}

TEST_CASE("distances vanish for identical trajectories and are symmetric") {
  const Mesh m = unit_line(5);
  Trajectory a = scalar_trajectory(m, {0.0, 0.3, 0.7, 1.0}, {1.0, 2.0, 0.5, 0.1});
  a.states[2].theta(2) = 4.0;
  for (Field f : {Field::Theta, Field::Chi}) {
    CHECK(distance_L2L2(m, a, a, f) == 0.0);
    CHECK(distance_L2H1(m, a, a, f) == 0.0);
    CHECK(distance_LinfL2(m, a, a, f) == 0.0);
    CHECK(distance_C0L2(m, a, a, f) == 0.0);
  }
  const Trajectory b = scalar_trajectory(m, {0.0, 0.5, 1.0}, {1.0, 1.0, 1.0});
  CHECK(distance_L2H1(m, a, b, Field::Theta) == doctest::Approx(distance_L2H1(m, b, a, Field::Theta)));
  CHECK(distance_L2H1(m, a, b, Field::Theta) > distance_L2L2(m, a, b, Field::Theta));
}

TEST_CASE("equilibrium data gives zero distances in the tau study") {
  const RunSetup rs = equilibrium_setup();
  const StudyTable tab = tau_refinement_study(rs, 3);
  REQUIRE(tab.levels.size() == 3);
  INFO(tab.to_text());
  for (size_t l = 1; l < tab.levels.size(); ++l)
    for (const auto& [k, v] : tab.levels[l].distances) CHECK(v <= 1e-13);
  CHECK(tab.levels[0].distances.empty());
  for (const auto& l : tab.levels) CHECK(l.verified);
}

TEST_CASE("tau study table structure on the damage smoke run") {
  RunSetup rs = make_run_setup(load_config(std::string(TV_SOURCE_DIR) + "/configs/smoke_damage_1d.ini"));
  rs.tau = 1.0 / 32;
  const StudyTable tab = tau_refinement_study(rs, 3);
  INFO(tab.to_text());
  std::vector<std::string> names;
  for (const auto& [k, v] : tab.verdicts) names.push_back(k);
  CHECK(names == std::vector<std::string>{"all_levels_verified", "theta_L2L2_decreasing", "v_L2L2_decreasing",
                                          "chi_C0L2_decreasing", "monitors_bounded"});
  CHECK(tab.pass());
  CHECK(tab.levels[2].parameter == doctest::Approx(1.0 / 128));
  CHECK(study_value(tab.levels[2], "d_theta_L2L2") < study_value(tab.levels[1], "d_theta_L2L2"));
  CHECK(std::isfinite(study_value(tab.levels[0], "sup_theta_L1")));
  CHECK(std::isnan(study_value(tab.levels[0], "d_theta_L2L2")));
  const std::string txt = tab.to_text();
  CHECK(txt.rfind("level\tparameter\tverified", 0) == 0);
  CHECK(txt.find("# monitors_bounded\tPASS") != std::string::npos);
  CHECK(tab.to_text(',').find("level,parameter,verified") != std::string::npos);
}

TEST_CASE("manufactured heat errors decrease with h and tau") {
  const auto r = manufactured_heat_study({0.25, 0.125}, 65, {5, 9, 17}, 1e-4, 1.0, 1.0);
  REQUIRE(r.h_errors.size() == 3);
  CHECK(r.h_errors[1] < r.h_errors[0]);
  CHECK(r.h_errors[2] < r.h_errors[1]);
  CHECK(r.h_order > 1.8);
  CHECK(r.tau_errors[1] < r.tau_errors[0]);
  CHECK(r.tau_order > 0.8);
  CHECK(r.hs[0] == doctest::Approx(0.25));
}

TEST_CASE("regularization study: smaller nu approaches the exact constraint") {
  RunSetup rs = make_run_setup(load_config(std::string(TV_SOURCE_DIR) + "/configs/smoke_damage_1d.ini"));
  rs.T = 0.5;
  const StudyTable tab = regularization_study(rs, {1e-2, 1e-3, 1e-4}, {0.5, 4.0});
  INFO(tab.to_text());
  CHECK(tab.pass());
  CHECK(study_value(tab.levels[2], "d_irreversibility_violation") <
        study_value(tab.levels[0], "d_irreversibility_violation"));
}
