/// @file material.hpp
/// @brief Constitutive functions: conductivity, truncations, coefficients a/b, potential W.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace thermovisc {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class ConductivityKind { Power, Constant };
enum class CoefficientKind { Damage, PhaseTransition, Quadratic };
enum class GammaKind { DoubleWell, Zero, Quadratic };
enum class BetaKind { Indicator, None, QuadraticPenalty };

/// Isotropic elasticity tensor E = 2 mu_l sym + lambda_l tr; in 1D the scalar modulus lambda_l + 2 mu_l.
struct ElasticTensor {
  double lambda_l = 1.0;
  double mu_l = 1.0;
};

struct MaterialParams {
  double kappa = 2.0;
  double c0 = 1.0;
  double c1 = 1.0;
  double c2 = 0.1;
  double rho = 0.5;
  double omega = 1.0;
  double p_exponent = 3.0;
  double delta = 0.0;
  int mu_flag = 1;
  double theta_star = 0.5;
  bool laplacian_mode = false;
  ConductivityKind conductivity = ConductivityKind::Power;
  ElasticTensor elastic;
  CoefficientKind a_choice = CoefficientKind::Damage;
  CoefficientKind b_choice = CoefficientKind::Damage;
};

struct PotentialW {
  GammaKind gamma = GammaKind::DoubleWell;
  double gamma_coef = 1.0;  // quadratic: (gamma_coef/2) x^2
  BetaKind beta = BetaKind::Indicator;
  double beta_coef = 1.0e3; // penalty: (beta_coef/2) min(x,0)^2
};

// Conductivity K(theta) = c0 (1 + theta^kappa) for theta >= 0.
double heat_conductivity(double theta, const MaterialParams& mp);
double conductivity_primitive(double theta, const MaterialParams& mp);

// Even extension K(|theta|) and its derivative, used inside truncated solves.
double conductivity_even(double theta, const MaterialParams& mp);
double conductivity_even_derivative(double theta, const MaterialParams& mp);

double truncate_value(double theta, double M);
double truncate_conductivity(double theta, double M, const MaterialParams& mp);
double truncate_conductivity_derivative(double theta, double M, const MaterialParams& mp);

double yosida_alpha(double r, double nu);

// Smoothed positive part max(x,0) + w log(1 + exp(-|x|/w)), w = 1e-3.
double softplus(double x);
double softplus_d1(double x);
double softplus_d2(double x);
inline constexpr double kSmoothingWidth = 1.0e-3;

double coef_value(CoefficientKind k, double chi, double c2, bool is_a);
double coef_d1(CoefficientKind k, double chi, bool is_a);
double coef_d2(CoefficientKind k, double chi, bool is_a);

inline double a_coef(double chi, const MaterialParams& mp) { return coef_value(mp.a_choice, chi, mp.c2, true); }
inline double b_coef(double chi, const MaterialParams& mp) { return coef_value(mp.b_choice, chi, mp.c2, false); }
inline double b_d1(double chi, const MaterialParams& mp) { return coef_d1(mp.b_choice, chi, false); }
inline double b_d2(double chi, const MaterialParams& mp) { return coef_d2(mp.b_choice, chi, false); }

double gamma_hat(double x, const PotentialW& w);
double gamma_d1(double x, const PotentialW& w);
double gamma_d2(double x, const PotentialW& w);

// beta_hat for the finite modes; the indicator returns 0 on [0,inf) and is handled by feasibility.
double beta_hat(double x, const PotentialW& w);
double beta_d1(double x, const PotentialW& w);
double beta_d2(double x, const PotentialW& w);
bool in_beta_domain(double x, const PotentialW& w);

struct PotentialValue {
  double value;             // W(chi), meaningful when feasible
  double gamma_derivative;  // gamma(chi)
  bool feasible;
};
PotentialValue eval_potential(double chi, const PotentialW& w);

/// max(0, -min gamma_hat'') sampled on [-1, 2].
double lambda_convexity(const PotentialW& w);

/// Lower bound c_W of W on its domain, sampled on [-2, 3].
double potential_lower_bound(const PotentialW& w);

/// Korn-type constant of the elastic tensor: alpha0 = min eigenvalue of E on symmetric tensors.
double elastic_alpha0(const ElasticTensor& e, int dim);
/// Constant kb with (div u)^2 kb <= eps(u):E eps(u).
double divergence_bound_constant(const ElasticTensor& e, int dim);

/// All violated hypotheses, by name. Empty means valid.
std::vector<std::string> validate_material(const MaterialParams& mp, const PotentialW& w, int dim);

std::string to_string(CoefficientKind k);
std::string to_string(GammaKind k);
std::string to_string(BetaKind k);
std::string to_string(ConductivityKind k);

}  // namespace thermovisc
