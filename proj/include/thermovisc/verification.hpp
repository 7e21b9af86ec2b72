/// @file verification.hpp
/// @brief Discrete energy, entropy and dissipation inequalities, constraints and a-priori monitors.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "thermovisc/stepper.hpp"

namespace thermovisc {

struct CheckRecord {
  std::string name;
  bool applicable = true;
  bool pass = true;
  double worst = 0.0;      // largest (scaled) defect; <= tolerance passes
  double tolerance = 0.0;
  int step_s = -1, step_t = -1, test = -1;
  std::string note;
};

struct VerificationReport {
  std::vector<CheckRecord> checks;
  std::vector<std::pair<std::string, double>> info;
  bool pass() const;
  const CheckRecord* find(const std::string& name) const;
  std::string table() const;
  std::string key_values() const;
};

struct EnergyParts {
  double thermal = 0, kinetic = 0, elastic = 0, gradient = 0, potential = 0, regularization = 0;
  bool feasible = true;
  double total() const;
};
EnergyParts total_energy_parts(const Problem& pb, const State& s);
/// Thermal + kinetic + elastic + gradient + potential energy; +inf if chi leaves dom beta_hat.
double total_energy(const Problem& pb, const State& s);

/// Phi(chi) = gradient energy + sum m W(chi) (+ optional regularization); +inf if infeasible.
double chi_free_energy(const Problem& pb, const Vec& chi);

/// At most max_points step indices from 0..K, always including 0 and K.
std::vector<int> sample_steps(int K, int max_points = 33);

struct EntropyTest {
  std::string name;
  Vec space;        // nonnegative nodal values
  int profile = 0;  // 0: constant, 1: 1 + t/T, 2: 1 - t/(2T)
  double profile_value(double t, double T) const;
};
std::vector<EntropyTest> default_test_bank(const Mesh& m, double T);

CheckRecord check_total_energy_inequality(const Problem& pb, const Trajectory& tr, double tol = 1e-8,
                                          int max_points = 33);
CheckRecord check_entropy_inequality(const Problem& pb, const Trajectory& tr, const std::vector<EntropyTest>& bank,
                                     double tol = 1e-8, int max_points = 33);
CheckRecord check_chi_energy_dissipation(const Problem& pb, const Trajectory& tr, double tol = 1e-8,
                                         int max_points = 33);
std::vector<CheckRecord> check_constraints(const Problem& pb, const Trajectory& tr);
CheckRecord check_chi_descent(const Trajectory& tr);

/// Nodal floor sequence from the a-priori constant and the actual step sizes.
std::vector<double> trajectory_floor(const Problem& pb, const Trajectory& tr);
/// sup_k || (chi-rate)^- + rho |div v| ||_inf observed along the run.
double observed_floor_rate(const Problem& pb, const Trajectory& tr);

using Monitors = std::vector<std::pair<std::string, double>>;
Monitors apriori_monitors(const Problem& pb, const Trajectory& tr, double alpha = 0.75);
double monitor_value(const Monitors& m, const std::string& name);

struct VerifyOptions {
  double tol_energy = 1e-8;
  double tol_entropy = 1e-8;
  double tol_dissipation = 1e-8;
  int max_points = 33;
};
VerificationReport verify_trajectory(const Problem& pb, const Trajectory& tr, const VerifyOptions& opt = {});

}  // namespace thermovisc
