/// @file stepper.hpp
/// @brief Fully implicit time step: chi / momentum / heat subsystems and the staggered outer loop.
#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "thermovisc/assembly.hpp"
#include "thermovisc/chi_solver.hpp"
#include "thermovisc/material.hpp"
#include "thermovisc/mesh.hpp"

namespace thermovisc {

struct StepData {
  Vec f;  // nodal body force, size n*dim
  Vec g;  // nodal heat source, >= 0
  Vec h;  // nodal boundary flux (only boundary nodes matter), >= 0
};

struct State {
  double t = 0.0;
  Vec theta, u, v, chi, xi, zeta;
};

struct StepDiagnostics {
  double tau = 0.0;
  int outer_iterations = 0;
  int chi_iterations = 0;
  int heat_iterations = 0;
  int halvings = 0;
  double M = 0.0;
  double fp_increment = 0.0;
  double chi_objective_prev = 0.0;
  double chi_objective = 0.0;
  double heat_residual = 0.0;
  double chi_residual = 0.0;
};

struct SchemeOptions {
  double nu = 0.0;       // Yosida parameter for chi_t <= 0; 0 = exact constraint
  double nu_reg = 0.0;   // optional higher-order terms nu_reg |eps|^{eta-2} eps and nu_reg |chi|^{eta-2} chi
  double eta_reg = 4.0;
  double tol_fp = 1e-9;
  double tol_heat = 1e-10;
  double tol_chi = 1e-10;
  double tol_lin = 1e-12;
  int max_outer = 200;
  int max_newton = 60;
  double min_tau = 1e-6;
  double M0 = 0.0;  // 0: 10 (1 + max theta_0)
};

struct Problem {
  Mesh mesh;
  MaterialParams mp;
  PotentialW pot;
  SchemeOptions opts;
};

struct Trajectory {
  std::vector<State> states;         // K + 1 states
  std::vector<StepData> data;        // data[k] belongs to (t_k, t_{k+1}]
  std::vector<StepDiagnostics> diag; // diag[k] belongs to step k+1
  int n_steps() const { return static_cast<int>(data.size()); }
  double tau(int k) const { return diag[k].tau; }
};

struct StepFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Space-time source functions; local means are taken over each step interval.
struct Sources {
  std::array<std::function<double(const std::array<double, 2>&, double)>, 2> f;
  std::function<double(const std::array<double, 2>&, double)> g;
  std::function<double(const std::array<double, 2>&, double)> h;
};

/// (1/(t1-t0)) int_{t0}^{t1} of the sources at every node, composite 3-point Gauss on 4 sub-intervals.
StepData local_mean(const Sources& s, const Mesh& m, double t0, double t1, bool validate = true);
std::vector<StepData> local_means(const Sources& s, const Mesh& m, const std::vector<double>& times);

struct PositivityFloor {
  double closed_form = 0.0;
  std::vector<double> recursion;  // v_0 .. v_K
};
/// Recursion (v_k - v_{k-1})/tau = -C v_k^2 from v_0 = theta_star and its limit theta_star/(1 + C T theta_star).
PositivityFloor positivity_floor(double theta_star, double C, double T, double tau);
std::vector<double> positivity_floor_sequence(double theta_star, double C, const std::vector<double>& taus);
/// A-priori constant C = 1/4 + rho^2 / (4 omega c2 kb) of the discrete minimum principle.
double positivity_constant(const MaterialParams& mp, int dim);

/// Dirichlet-constrained dofs of the displacement (all boundary nodes, all components).
std::vector<char> dirichlet_dofs(const Mesh& m);

/// (M + tau V_a(chi_prev) + tau^2 E_b(chi_k)) u_k = M(u_prev + tau v_prev) + tau V u_prev + tau^2 (F - C(theta_k)).
Vec solve_momentum_subsystem(const Problem& pb, const Vec& u_prev, const Vec& v_prev, const Vec& chi_prev,
                             const Vec& chi_k, const Vec& theta_k, const Vec& f_k, double tau);

struct HeatInputs {
  Vec theta_prev, chi_prev, chi_k, v_k;  // v_k = (u_k - u_prev)/tau
  double tau = 0.0;
  Vec g, h;
};

/// Nodal residual of the truncated heat equation at theta.
Vec heat_step_residual(const Problem& pb, const HeatInputs& in, const Vec& theta, double M);

struct HeatSolve {
  Vec theta;
  int iterations = 0;
  double residual = 0.0;
  double M = 0.0;
};
/// Newton solve; doubles M and re-solves while max theta > M.
HeatSolve solve_heat_subsystem(const Problem& pb, const HeatInputs& in, double M);

/// Source density q_i = g_i + s_i + (1 + sqrt(tau)/2) (dchi/tau)^2 of the heat equation.
Vec heat_source_density(const Problem& pb, const HeatInputs& in);

struct StepResult {
  State state;
  StepDiagnostics diag;
};
StepResult solve_time_step(const Problem& pb, const State& prev, const StepData& data, double tau, double& M);

State make_initial_state(const Mesh& m, const Vec& theta0, const Vec& u0, const Vec& v0, const Vec& chi0);

/// Integrates to T with nominal step tau, halving on step failure.
Trajectory run_simulation(const Problem& pb, const State& init, const Sources& src, double T, double tau);

}  // namespace thermovisc
