// Brute-force reference for the chi step on small 1D meshes. Independent of chi_solver:
// the objective is written out from the material functions and minimized by projected
// gradient descent with backtracking.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "thermovisc/assembly.hpp"
#include "thermovisc/chi_solver.hpp"
#include "thermovisc/material.hpp"

namespace oracle {

using thermovisc::Vec;

struct ChiInstance {
  thermovisc::Mesh mesh;
  thermovisc::MaterialParams mp;
  thermovisc::PotentialW pot;
  Vec chi_prev, theta, e;  // e = elastic energy density per node
  double tau = 0.01;
};

inline double objective(const ChiInstance& c, const Vec& x) {
  const auto& m = c.mesh;
  const double q = (1.0 + std::sqrt(c.tau)) / (2.0 * c.tau);
  double J = 0.0;
  for (int i = 0; i < m.n_nodes(); ++i) {
    const double d = x(i) - c.chi_prev(i);
    J += m.lumped[i] * (q * d * d + thermovisc::gamma_hat(x(i), c.pot) + thermovisc::beta_hat(x(i), c.pot) +
                        0.5 * thermovisc::b_coef(x(i), c.mp) * c.e(i) - c.theta(i) * x(i));
  }
  const double p = c.mp.p_exponent;
  for (int k = 0; k < m.n_elems(); ++k) {
    const int a = m.elems[k][0], b = m.elems[k][1];
    const double h = m.measure[k], g = (x(b) - x(a)) / h;
    J += h * std::pow(std::fabs(g), p) / p;
  }
  return J;
}

inline Vec gradient(const ChiInstance& c, const Vec& x) {
  const auto& m = c.mesh;
  const double q = (1.0 + std::sqrt(c.tau)) / c.tau;
  Vec G(m.n_nodes());
  for (int i = 0; i < m.n_nodes(); ++i)
    G(i) = m.lumped[i] * (q * (x(i) - c.chi_prev(i)) + thermovisc::gamma_d1(x(i), c.pot) +
                          thermovisc::beta_d1(x(i), c.pot) + 0.5 * thermovisc::b_d1(x(i), c.mp) * c.e(i) -
                          c.theta(i));
  const double p = c.mp.p_exponent;
  for (int k = 0; k < m.n_elems(); ++k) {
    const int a = m.elems[k][0], b = m.elems[k][1];
    const double h = m.measure[k], g = (x(b) - x(a)) / h;
    const double flux = std::pow(std::fabs(g), p - 2.0) * g;
    G(a) -= flux;
    G(b) += flux;
  }
  return G;
}

inline Vec project(const Vec& x, const Vec& lo, const Vec& hi) { return x.cwiseMax(lo).cwiseMin(hi); }

/// Projected gradient with Armijo backtracking along the projection arc.
inline Vec minimize(const ChiInstance& c, const Vec& lo, const Vec& hi, int max_iter = 200000) {
  Vec x = project(c.chi_prev, lo, hi);
  double J = objective(c, x);
  double s = 1e-3;
  for (int it = 0; it < max_iter; ++it) {
    const Vec g = gradient(c, x);
    Vec y;
    double Jy;
    s *= 2.0;
    for (;;) {
      y = project(x - s * g, lo, hi);
      Jy = objective(c, y);
      if (Jy <= J + 1e-4 * g.dot(y - x) || s < 1e-20) break;
      s *= 0.5;
    }
    const double step = (y - x).lpNorm<Eigen::Infinity>();
    x = y;
    J = Jy;
    if (step < 1e-15) break;
  }
  return x;
}

inline ChiInstance random_instance(std::mt19937& rng, int nodes, int mu) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  ChiInstance c;
  thermovisc::MeshSpec s;
  s.dim = 1;
  s.res = {nodes, 1};
  c.mesh = thermovisc::build_mesh(s);
  c.mp.mu_flag = mu;
  c.mp.p_exponent = 2.5 + U(rng);
  c.mp.a_choice = c.mp.b_choice = U(rng) < 0.5 ? thermovisc::CoefficientKind::Damage
                                                : thermovisc::CoefficientKind::PhaseTransition;
  c.tau = std::pow(10.0, -3.0 + 2.0 * U(rng));
  const int n = nodes;
  c.chi_prev.resize(n);
  c.theta.resize(n);
  c.e.resize(n);
  for (int i = 0; i < n; ++i) {
    c.chi_prev(i) = U(rng) < 0.2 ? 0.0 : U(rng);
    c.theta(i) = 0.1 + 2.0 * U(rng);
    c.e(i) = 8.0 * U(rng);
  }
  return c;
}

inline thermovisc::ChiStepContext context(const ChiInstance& c) {
  thermovisc::ChiStepContext ctx;
  ctx.mesh = &c.mesh;
  ctx.mp = &c.mp;
  ctx.pot = &c.pot;
  ctx.chi_prev = c.chi_prev;
  ctx.theta = c.theta;
  ctx.elastic_density = c.e;
  ctx.tau = c.tau;
  return ctx;
}

inline Vec lower(const ChiInstance& c) { return Vec::Zero(c.mesh.n_nodes()); }
inline Vec upper(const ChiInstance& c) {
  return c.mp.mu_flag == 1 ? c.chi_prev : Vec::Constant(c.mesh.n_nodes(), std::numeric_limits<double>::infinity());
}

}  // namespace oracle
