/// @file assembly.hpp
/// @brief P1 assembly of mass, weighted elasticity, coupling, heat and gradient-flow operators.
///
/// Displacement dofs are interleaved: dof = node * dim + component.
/// Zeroth-order terms use nodal (lumped) quadrature throughout.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "thermovisc/material.hpp"
#include "thermovisc/mesh.hpp"

namespace thermovisc {

using Vec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

Vec lumped_mass(const Mesh& m);
SpMat mass_matrix(const Mesh& m, bool lumped);
SpMat stiffness_matrix(const Mesh& m);

/// Symmetric strain of a P1 displacement on one element, Voigt (xx, yy, 2xy).
Eigen::Vector3d element_strain(const Mesh& m, int e, const Vec& u);
/// eps : E eps for a Voigt strain.
double strain_energy_density(const Eigen::Vector3d& eps, const ElasticTensor& E, int dim);
double element_divergence(const Mesh& m, int e, const Vec& u);

/// Matrix of (u, v) -> sum_T |T| eta_T scale eps(u):E eps(v), eta_T the element mean of nodal eta.
SpMat assemble_weighted_form(const Mesh& m, const Vec& eta, double scale, const ElasticTensor& E);

/// D_i = sum_{T ni i} |T|/(d+1) eps_T:E eps_T, so that 1/2 e_b(u,u) = 1/2 sum_i b_i D_i.
Vec nodal_energy_weights(const Mesh& m, const Vec& u, const ElasticTensor& E);

Vec element_average(const Mesh& m, const Vec& nodal);

/// F with F.v = -rho sum_T |T| mean_T(theta) div_T(v).
Vec assemble_coupling(const Mesh& m, const Vec& theta, double rho);

/// Lumped nodal divergence: sum_{T ni i} (|T|/(d+1)) div_T(v) / m_i.
Vec lumped_divergence(const Mesh& m, const Vec& v);

/// Nodal density s_i of sum_T |T| mean_T(a) omega eps(w):E eps(w), lumped like D_i.
Vec viscous_source_density(const Mesh& m, const Vec& a_nodal, double omega, const ElasticTensor& E,
                           const Vec& w);

/// Lumped load for a nodal vector field f (size n*dim).
Vec body_force_load(const Mesh& m, const Vec& f);

/// Lumped boundary load H_i = boundary_weight_i * h_i.
Vec boundary_flux_load(const Mesh& m, const Vec& h_nodal);

/// A_i(theta) = int K_M(theta_h) grad theta_h . grad psi_i with a positive-weight Gauss rule.
Vec heat_flux_operator(const Mesh& m, const Vec& theta, double M, const MaterialParams& mp);
SpMat heat_flux_jacobian(const Mesh& m, const Vec& theta, double M, const MaterialParams& mp);

struct HeatResidual {
  Vec residual;
  SpMat jacobian;
};
/// Residual of int K_M grad theta . grad v - int_{bdry} h v, with its Jacobian.
HeatResidual assemble_heat_residual(const Mesh& m, const Vec& theta, double M, const Vec& h_nodal,
                                    const MaterialParams& mp);

struct GradFlowParams {
  double p = 2.0;
  double delta = 0.0;
  bool laplacian_mode = false;  // true: 1/2|g|^2 + delta/p |g|^p, false: 1/p |g|^p
  double eps_reg = 1e-12;
};
GradFlowParams grad_flow_params(const MaterialParams& mp);

double gradient_energy(const Mesh& m, const Vec& chi, const GradFlowParams& gp);
Vec gradient_flow_residual(const Mesh& m, const Vec& chi, const GradFlowParams& gp);
SpMat gradient_flow_jacobian(const Mesh& m, const Vec& chi, const GradFlowParams& gp);

/// Optional strain regularization: energy nu/eta sum_T |T| |eps|^eta (Frobenius norm).
double strain_power_energy(const Mesh& m, const Vec& u, double nu, double eta);
Vec strain_power_residual(const Mesh& m, const Vec& u, double nu, double eta);
SpMat strain_power_jacobian(const Mesh& m, const Vec& u, double nu, double eta);

}  // namespace thermovisc
