#include "thermovisc/material.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thermovisc {

double heat_conductivity(double theta, const MaterialParams& mp) {
  if (!(theta >= 0.0)) throw DomainError("heat_conductivity: negative temperature");
  if (mp.conductivity == ConductivityKind::Constant) return mp.c0;
  return mp.c0 * (1.0 + std::pow(theta, mp.kappa));
}

double conductivity_primitive(double theta, const MaterialParams& mp) {
  if (!(theta >= 0.0)) throw DomainError("conductivity_primitive: negative temperature");
  if (mp.conductivity == ConductivityKind::Constant) return mp.c0 * theta;
  return mp.c0 * (theta + std::pow(theta, mp.kappa + 1.0) / (mp.kappa + 1.0));
}

double conductivity_even(double theta, const MaterialParams& mp) {
  return heat_conductivity(std::fabs(theta), mp);
}

double conductivity_even_derivative(double theta, const MaterialParams& mp) {
  if (mp.conductivity == ConductivityKind::Constant || theta == 0.0) return 0.0;
  const double s = theta > 0.0 ? 1.0 : -1.0;
  return s * mp.c0 * mp.kappa * std::pow(std::fabs(theta), mp.kappa - 1.0);
}

double truncate_value(double theta, double M) {
  if (!(M > 0.0)) throw ParameterError("truncate_value: M must be positive");
  return std::clamp(theta, -M, M);
}

double truncate_conductivity(double theta, double M, const MaterialParams& mp) {
  return conductivity_even(truncate_value(theta, M), mp);
}

double truncate_conductivity_derivative(double theta, double M, const MaterialParams& mp) {
  if (std::fabs(theta) >= M) return 0.0;
  return conductivity_even_derivative(theta, mp);
}

double yosida_alpha(double r, double nu) {
  if (!(nu > 0.0)) throw ParameterError("yosida_alpha: nu must be positive");
  return std::max(r, 0.0) / nu;
}

double softplus(double x) {
  const double w = kSmoothingWidth;
  return std::max(x, 0.0) + w * std::log1p(std::exp(-std::fabs(x) / w));
}

double softplus_d1(double x) {
  const double w = kSmoothingWidth;
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x / w));
  const double e = std::exp(x / w);
  return e / (1.0 + e);
}

double softplus_d2(double x) {
  const double s = softplus_d1(x);
  return s * (1.0 - s) / kSmoothingWidth;
}

double coef_value(CoefficientKind k, double chi, double c2, bool is_a) {
  switch (k) {
    case CoefficientKind::Damage: return c2 + softplus(chi);
    case CoefficientKind::PhaseTransition: return c2 + (is_a ? softplus(1.0 - chi) : softplus(chi));
    case CoefficientKind::Quadratic: return c2 + chi * chi;
  }
  return c2;
}

double coef_d1(CoefficientKind k, double chi, bool is_a) {
  switch (k) {
    case CoefficientKind::Damage: return softplus_d1(chi);
    case CoefficientKind::PhaseTransition: return is_a ? -softplus_d1(1.0 - chi) : softplus_d1(chi);
    case CoefficientKind::Quadratic: return 2.0 * chi;
  }
  return 0.0;
}

double coef_d2(CoefficientKind k, double chi, bool is_a) {
  switch (k) {
    case CoefficientKind::Damage: return softplus_d2(chi);
    case CoefficientKind::PhaseTransition: return is_a ? softplus_d2(1.0 - chi) : softplus_d2(chi);
    case CoefficientKind::Quadratic: return 2.0;
  }
  return 0.0;
}

double gamma_hat(double x, const PotentialW& w) {
  switch (w.gamma) {
    case GammaKind::DoubleWell: return x * x * (x - 1.0) * (x - 1.0);
    case GammaKind::Zero: return 0.0;
    case GammaKind::Quadratic: return 0.5 * w.gamma_coef * x * x;
  }
  return 0.0;
}

double gamma_d1(double x, const PotentialW& w) {
  switch (w.gamma) {
    case GammaKind::DoubleWell: return 2.0 * x * (x - 1.0) * (2.0 * x - 1.0);
    case GammaKind::Zero: return 0.0;
    case GammaKind::Quadratic: return w.gamma_coef * x;
  }
  return 0.0;
}

double gamma_d2(double x, const PotentialW& w) {
  switch (w.gamma) {
    case GammaKind::DoubleWell: return 12.0 * x * x - 12.0 * x + 2.0;
    case GammaKind::Zero: return 0.0;
    case GammaKind::Quadratic: return w.gamma_coef;
  }
  return 0.0;
}

double beta_hat(double x, const PotentialW& w) {
  if (w.beta == BetaKind::QuadraticPenalty) {
    const double m = std::min(x, 0.0);
    return 0.5 * w.beta_coef * m * m;
  }
  return 0.0;
}

double beta_d1(double x, const PotentialW& w) {
  if (w.beta == BetaKind::QuadraticPenalty) return w.beta_coef * std::min(x, 0.0);
  return 0.0;
}

double beta_d2(double x, const PotentialW& w) {
  if (w.beta == BetaKind::QuadraticPenalty) return x < 0.0 ? w.beta_coef : 0.0;
  return 0.0;
}

bool in_beta_domain(double x, const PotentialW& w) {
  return w.beta != BetaKind::Indicator || x >= 0.0;
}

PotentialValue eval_potential(double chi, const PotentialW& w) {
  PotentialValue r;
  r.feasible = in_beta_domain(chi, w);
  r.gamma_derivative = gamma_d1(chi, w);
  r.value = r.feasible ? gamma_hat(chi, w) + beta_hat(chi, w) : std::numeric_limits<double>::infinity();
  return r;
}

double lambda_convexity(const PotentialW& w) {
  double mn = std::numeric_limits<double>::infinity();
  const int n = 3001;
  for (int i = 0; i < n; ++i) {
    const double x = -1.0 + 3.0 * i / (n - 1);
    mn = std::min(mn, gamma_d2(x, w));
  }
  // the double well attains its minimum curvature at x = 1/2
  mn = std::min(mn, gamma_d2(0.5, w));
  return std::max(0.0, -mn);
}

double potential_lower_bound(const PotentialW& w) {
  double mn = std::numeric_limits<double>::infinity();
  const int n = 5001;
  for (int i = 0; i < n; ++i) {
    const double x = -2.0 + 5.0 * i / (n - 1);
    if (!in_beta_domain(x, w)) continue;
    mn = std::min(mn, gamma_hat(x, w) + beta_hat(x, w));
  }
  return mn;
}

double elastic_alpha0(const ElasticTensor& e, int dim) {
  if (dim == 1) return e.lambda_l + 2.0 * e.mu_l;
  return std::min(2.0 * e.mu_l, 2.0 * e.mu_l + 2.0 * e.lambda_l);
}

double divergence_bound_constant(const ElasticTensor& e, int dim) {
  if (dim == 1) return e.lambda_l + 2.0 * e.mu_l;
  return e.lambda_l + e.mu_l;
}

std::vector<std::string> validate_material(const MaterialParams& mp, const PotentialW& w, int dim) {
  std::vector<std::string> v;
  if (!(mp.kappa > 1.0)) v.push_back("kappa > 1");
  if (!(mp.c0 > 0.0)) v.push_back("c0 > 0");
  if (!(mp.c1 >= mp.c0)) v.push_back("c1 >= c0");
  if (!(mp.c2 > 0.0)) v.push_back("c2 > 0");
  if (!(mp.omega > 0.0)) v.push_back("omega > 0");
  if (!(mp.p_exponent >= 2.0)) v.push_back("p >= 2");
  if (!mp.laplacian_mode && !(mp.p_exponent > dim)) v.push_back("p > d");
  if (!(mp.delta >= 0.0)) v.push_back("delta >= 0");
  if (mp.mu_flag != 0 && mp.mu_flag != 1) v.push_back("mu in {0,1}");
  if (!(mp.theta_star > 0.0)) v.push_back("theta_star > 0");
  if (!(elastic_alpha0(mp.elastic, dim) > 0.0) || !(mp.elastic.mu_l >= 0.0))
    v.push_back("elastic tensor positive definite");
  if (mp.mu_flag == 1 && w.beta != BetaKind::Indicator)
    v.push_back("mu = 1 requires beta_hat = indicator of [0,inf)");
  if (w.beta == BetaKind::QuadraticPenalty && !(w.beta_coef > 0.0)) v.push_back("beta penalty coefficient > 0");

  bool a_floor = true, b_floor = true, b_convex = true, b_monotone = true;
  const int n = 2001;
  const double h = 5.0 / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double x = -2.0 + h * i;
    if (a_coef(x, mp) < mp.c2) a_floor = false;
    if (b_coef(x, mp) < mp.c2) b_floor = false;
    if (b_d1(x, mp) < 0.0) b_monotone = false;
    if (i > 0 && i + 1 < n) {
      const double d2 = b_coef(x + h, mp) - 2.0 * b_coef(x, mp) + b_coef(x - h, mp);
      if (d2 < -1e-12) b_convex = false;
    }
  }
  if (!a_floor) v.push_back("a >= c2");
  if (!b_floor) v.push_back("b >= c2");
  if (!b_convex) v.push_back("b convex");
  if (mp.laplacian_mode) {
    if (mp.mu_flag != 1) v.push_back("laplacian mode requires mu = 1");
    if (!b_monotone) v.push_back("laplacian mode requires b' >= 0");
  }
  return v;
}

std::string to_string(CoefficientKind k) {
  switch (k) {
    case CoefficientKind::Damage: return "damage";
    case CoefficientKind::PhaseTransition: return "phase";
    case CoefficientKind::Quadratic: return "quadratic";
  }
  return "?";
}

std::string to_string(GammaKind k) {
  switch (k) {
    case GammaKind::DoubleWell: return "double_well";
    case GammaKind::Zero: return "zero";
    case GammaKind::Quadratic: return "quadratic";
  }
  return "?";
}

std::string to_string(BetaKind k) {
  switch (k) {
    case BetaKind::Indicator: return "indicator";
    case BetaKind::None: return "none";
    case BetaKind::QuadraticPenalty: return "quadratic_penalty";
  }
  return "?";
}

std::string to_string(ConductivityKind k) {
  return k == ConductivityKind::Power ? "power" : "constant";
}

}  // namespace thermovisc
