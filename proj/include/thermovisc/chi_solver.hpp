/// @file chi_solver.hpp
/// @brief Internal-variable update as a bound-constrained convex minimization.
#pragma once

#include <stdexcept>
#include <string>

#include "thermovisc/assembly.hpp"
#include "thermovisc/material.hpp"
#include "thermovisc/mesh.hpp"

namespace thermovisc {

struct ChiStepContext {
  const Mesh* mesh = nullptr;
  const MaterialParams* mp = nullptr;
  const PotentialW* pot = nullptr;
  Vec chi_prev;
  Vec theta;            // temperature used in the -theta chi coupling
  Vec elastic_density;  // e_i = D_i(u_prev)/m_i
  double tau = 0.0;
  double nu = 0.0;       // Yosida parameter for the irreversibility constraint; 0 = exact
  double nu_reg = 0.0;   // coefficient of the optional nu_reg/eta_reg |chi|^eta_reg term
  double eta_reg = 4.0;

  Vec lower_bounds() const;
  Vec upper_bounds() const;
};

ChiStepContext make_chi_context(const Mesh& m, const MaterialParams& mp, const PotentialW& pot, const Vec& chi_prev,
                                const Vec& theta, const Vec& u_prev, double tau, double nu = 0.0);

/// Convex objective whose stationarity is the discrete flow rule; +inf outside the constraint set.
double chi_objective(const Vec& chi, const ChiStepContext& ctx);
/// Variant with the rate of the linear term frozen at rate_frozen and the tau^{3/2}/2 quadratic.
double chi_objective_frozen(const Vec& chi, const ChiStepContext& ctx, const Vec& rate_frozen);

/// Gradient of chi_objective on the feasible set (constraints excluded).
Vec chi_gradient(const Vec& chi, const ChiStepContext& ctx);
SpMat chi_hessian(const Vec& chi, const ChiStepContext& ctx);

struct ChiSolveOptions {
  double tol = 1e-10;
  int max_iter = 200;
};

struct ChiStepResult {
  Vec chi, xi, zeta;
  int iterations = 0;
  double residual = 0.0;
  double objective_prev = 0.0;
  double objective = 0.0;
  int active_lower = 0, active_upper = 0;
};

struct ChiStepFailure : std::runtime_error {
  ChiStepFailure(const std::string& w, Vec last, double res)
      : std::runtime_error(w), last_iterate(std::move(last)), residual(res) {}
  Vec last_iterate;
  double residual;
};

ChiStepResult solve_chi_step(const ChiStepContext& ctx, const ChiSolveOptions& opt = {});

/// Nodal residual density of the flow rule: (1+sqrt tau) rate + xi + zeta + gamma + b' e/2 - theta + A_p/m.
Vec chi_stationarity_residual(const ChiStepContext& ctx, const Vec& chi, const Vec& xi, const Vec& zeta);

/// xi = -1{chi <= tol_zero} (force)^+ with force = gamma + b' e/2 - theta.
Vec xi_from_complementarity(const Vec& chi, const Vec& force, double tol_zero);

/// Nodal force gamma(chi) + b'(chi) e/2 - theta.
Vec chi_force_terms(const ChiStepContext& ctx, const Vec& chi);

/// sum_i psi_i [ m_i((1+sqrt tau) rate + xi + gamma + b' e/2 - theta) + A_p(chi)_i ] for psi <= 0.
double one_sided_vi_residual(const ChiStepContext& ctx, const Vec& chi, const Vec& xi, const Vec& psi);

}  // namespace thermovisc
