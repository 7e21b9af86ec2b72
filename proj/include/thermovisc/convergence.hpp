/// @file convergence.hpp
/// @brief Time interpolants, inter-trajectory distances and refinement studies.
#pragma once

#include <string>
#include <vector>

#include "thermovisc/stepper.hpp"
#include "thermovisc/verification.hpp"

namespace thermovisc {

enum class Field { Theta, U, V, Chi };

/// Interpolants of one field of a trajectory: right-constant (value of t_k on (t_{k-1}, t_k]),
/// left-constant (value of t_{k-1}) and piecewise linear.
class Interpolants {
 public:
  Interpolants(const Trajectory& tr, Field f) : tr_(&tr), field_(f) {}
  Vec right_constant(double t) const;
  Vec left_constant(double t) const;
  Vec linear(double t) const;
  const Vec& at(int k) const;

 private:
  int interval(double t) const;  // k with t in (t_{k-1}, t_k], clamped to [1, K]
  const Trajectory* tr_;
  Field field_;
};

/// ||a - b||_{L^2(0,T;L^2)} of the right-constant interpolants (exact on the merged grid).
double distance_L2L2(const Mesh& m, const Trajectory& a, const Trajectory& b, Field f);
/// ||a - b||_{L^2(0,T;H^1)} of the right-constant interpolants.
double distance_L2H1(const Mesh& m, const Trajectory& a, const Trajectory& b, Field f);
/// sup_t ||a - b||_{L^2} of the right-constant interpolants.
double distance_LinfL2(const Mesh& m, const Trajectory& a, const Trajectory& b, Field f);
/// max_t ||a - b||_{L^2} of the piecewise-linear interpolants (exact: attained at grid times).
double distance_C0L2(const Mesh& m, const Trajectory& a, const Trajectory& b, Field f);

struct RunSetup {
  Problem pb;
  State init;
  Sources src;
  double T = 1.0;
  double tau = 1.0 / 64.0;
};

struct StudyLevel {
  std::string label;
  double parameter = 0.0;
  bool verified = false;
  Monitors monitors;
  std::vector<std::pair<std::string, double>> distances;  // to previous level or to the reference
};

struct StudyTable {
  std::string name;
  std::vector<StudyLevel> levels;
  std::vector<std::pair<std::string, bool>> verdicts;
  bool pass() const;
  std::string to_text(char delim = '\t') const;
};

double study_value(const StudyLevel& l, const std::string& key);

/// tau, tau/2, ... (levels runs); distances between consecutive levels.
StudyTable tau_refinement_study(const RunSetup& base, int levels);

/// Decoupled linear heat problem theta = 2 + sin(t) cos(pi x), constant conductivity.
struct ManufacturedResult {
  std::vector<double> tau_errors, h_errors, taus, hs;
  double tau_order = 0.0, h_order = 0.0;  // minimum observed orders
};
double manufactured_heat_error(int nodes, double tau, double T, double K);
ManufacturedResult manufactured_heat_study(const std::vector<double>& taus, int tau_nodes,
                                           const std::vector<int>& node_levels, double h_tau, double T, double K);

/// Runs at each delta with the gradient operator -Lap chi - delta A_p chi; distances to the delta = 0 run.
StudyTable delta_study(const RunSetup& base, const std::vector<double>& deltas);

/// Yosida parameter sweep and truncation-level sweep against the exact-constraint, large-M run.
StudyTable regularization_study(const RunSetup& base, const std::vector<double>& nus, const std::vector<double>& Ms);

}  // namespace thermovisc
