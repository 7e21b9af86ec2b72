#include "thermovisc/chi_solver.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace thermovisc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool yosida_active(const ChiStepContext& c) { return c.mp->mu_flag == 1 && c.nu > 0.0; }

// Nodal part of the objective density (without the gradient energy), per unit mass.
double nodal_density(double x, int i, const ChiStepContext& c, double quad_coef, double lin_rate) {
  const double d = x - c.chi_prev(i);
  double v = quad_coef * d * d + lin_rate * x + gamma_hat(x, *c.pot) + 0.5 * b_coef(x, *c.mp) * c.elastic_density(i) -
             c.theta(i) * x + beta_hat(x, *c.pot);
  if (c.nu_reg > 0.0) v += c.nu_reg / c.eta_reg * std::pow(std::fabs(x), c.eta_reg);
  if (yosida_active(c)) {
    const double r = std::max(d / c.tau, 0.0);
    v += c.tau * r * r / (2.0 * c.nu);
  }
  return v;
}

// Smooth flow-rule terms without beta and Yosida parts, per unit mass (A_p excluded).
double nodal_force(double x, int i, const ChiStepContext& c) {
  double v = gamma_d1(x, *c.pot) + 0.5 * b_d1(x, *c.mp) * c.elastic_density(i) - c.theta(i);
  if (c.nu_reg > 0.0) v += c.nu_reg * std::pow(std::fabs(x), c.eta_reg - 2.0) * x;
  return v;
}

bool feasible(const Vec& chi, const Vec& lo, const Vec& hi) {
  for (int i = 0; i < chi.size(); ++i)
    if (chi(i) < lo(i) || chi(i) > hi(i)) return false;
  return true;
}

double objective_impl(const Vec& chi, const ChiStepContext& c, double quad_coef, const Vec* rate_frozen) {
  if (!feasible(chi, c.lower_bounds(), c.upper_bounds())) return kInf;
  const Mesh& m = *c.mesh;
  double J = 0.0;
  for (int i = 0; i < chi.size(); ++i)
    J += m.lumped[i] * nodal_density(chi(i), i, c, quad_coef, rate_frozen ? (*rate_frozen)(i) : 0.0);
  return J + gradient_energy(m, chi, grad_flow_params(*c.mp));
}

Vec projected_residual(const Vec& chi, const Vec& g, const Vec& mass, const Vec& lo, const Vec& hi) {
  Vec r(chi.size());
  for (int i = 0; i < chi.size(); ++i) r(i) = chi(i) - std::clamp(chi(i) - g(i) / mass(i), lo(i), hi(i));
  return r;
}

}  // namespace

Vec ChiStepContext::lower_bounds() const {
  return Vec::Constant(chi_prev.size(), pot->beta == BetaKind::Indicator ? 0.0 : -kInf);
}

Vec ChiStepContext::upper_bounds() const {
  if (mp->mu_flag == 1 && nu == 0.0) return chi_prev;
  return Vec::Constant(chi_prev.size(), kInf);
}

ChiStepContext make_chi_context(const Mesh& m, const MaterialParams& mp, const PotentialW& pot, const Vec& chi_prev,
                                const Vec& theta, const Vec& u_prev, double tau, double nu) {
  ChiStepContext c;
  c.mesh = &m;
  c.mp = &mp;
  c.pot = &pot;
  c.chi_prev = chi_prev;
  c.theta = theta;
  c.tau = tau;
  c.nu = nu;
  const Vec D = nodal_energy_weights(m, u_prev, mp.elastic);
  c.elastic_density = D.cwiseQuotient(lumped_mass(m));
  return c;
}

double chi_objective(const Vec& chi, const ChiStepContext& c) {
  return objective_impl(chi, c, (1.0 + std::sqrt(c.tau)) / (2.0 * c.tau), nullptr);
}

double chi_objective_frozen(const Vec& chi, const ChiStepContext& c, const Vec& rate_frozen) {
  // tau^{3/2}/2 |(chi - chi_prev)/tau|^2 = (1/(2 sqrt tau)) (chi - chi_prev)^2
  return objective_impl(chi, c, 0.5 / std::sqrt(c.tau), &rate_frozen);
}

Vec chi_gradient(const Vec& chi, const ChiStepContext& c) {
  const Mesh& m = *c.mesh;
  const double q = (1.0 + std::sqrt(c.tau)) / c.tau;
  Vec g = gradient_flow_residual(m, chi, grad_flow_params(*c.mp));
  for (int i = 0; i < chi.size(); ++i) {
    const double d = chi(i) - c.chi_prev(i);
    double v = q * d + nodal_force(chi(i), i, c) + beta_d1(chi(i), *c.pot);
    if (yosida_active(c)) v += yosida_alpha(d / c.tau, c.nu);
    g(i) += m.lumped[i] * v;
  }
  return g;
}

SpMat chi_hessian(const Vec& chi, const ChiStepContext& c) {
  const Mesh& m = *c.mesh;
  const double q = (1.0 + std::sqrt(c.tau)) / c.tau;
  SpMat H = gradient_flow_jacobian(m, chi, grad_flow_params(*c.mp));
  for (int i = 0; i < chi.size(); ++i) {
    const double x = chi(i);
    double v = q + gamma_d2(x, *c.pot) + 0.5 * b_d2(x, *c.mp) * c.elastic_density(i) + beta_d2(x, *c.pot);
    if (c.nu_reg > 0.0) v += c.nu_reg * (c.eta_reg - 1.0) * std::pow(std::fabs(x) + 1e-300, c.eta_reg - 2.0);
    if (yosida_active(c) && x > c.chi_prev(i)) v += 1.0 / (c.nu * c.tau);
    H.coeffRef(i, i) += m.lumped[i] * v;
  }
  return H;
}

ChiStepResult solve_chi_step(const ChiStepContext& c, const ChiSolveOptions& opt) {
  const Mesh& m = *c.mesh;
  const int n = static_cast<int>(c.chi_prev.size());
  const Vec lo = c.lower_bounds(), hi = c.upper_bounds();
  const Vec mass = lumped_mass(m);
  ChiStepResult res;
  Vec chi(n);
  for (int i = 0; i < n; ++i) chi(i) = std::clamp(c.chi_prev(i), lo(i), hi(i));
  res.objective_prev = chi_objective(chi, c);
  double J = res.objective_prev;
  double r = kInf;
  int it = 0;
  for (; it <= opt.max_iter; ++it) {
    const Vec g = chi_gradient(chi, c);
    r = projected_residual(chi, g, mass, lo, hi).lpNorm<Eigen::Infinity>();
    if (r <= opt.tol) break;
    if (it == opt.max_iter) break;
    const double eps = std::min(1e-6, r);
    std::vector<char> active(n, 0);
    for (int i = 0; i < n; ++i) {
      if (chi(i) <= lo(i) + eps && g(i) > 0.0) active[i] = 1;
      if (chi(i) >= hi(i) - eps && g(i) < 0.0) active[i] = 1;
    }
    const SpMat H = chi_hessian(chi, c);
    std::vector<int> freemap(n, -1);
    int nf = 0;
    for (int i = 0; i < n; ++i)
      if (!active[i]) freemap[i] = nf++;
    Vec d = Vec::Zero(n);
    for (int i = 0; i < n; ++i)
      if (active[i]) d(i) = -g(i) / H.coeff(i, i);
    if (nf > 0) {
      std::vector<Eigen::Triplet<double>> t;
      for (int k = 0; k < H.outerSize(); ++k)
        for (SpMat::InnerIterator itH(H, k); itH; ++itH) {
          const int a = freemap[itH.row()], b = freemap[itH.col()];
          if (a >= 0 && b >= 0) t.emplace_back(a, b, itH.value());
        }
      SpMat Hf(nf, nf);
      Hf.setFromTriplets(t.begin(), t.end());
      Vec gf(nf);
      for (int i = 0; i < n; ++i)
        if (freemap[i] >= 0) gf(freemap[i]) = g(i);
      Eigen::SimplicialLDLT<SpMat> ldlt(Hf);
      if (ldlt.info() != Eigen::Success) throw ChiStepFailure("chi step: Hessian factorization failed", chi, r);
      const Vec df = ldlt.solve(-gf);
      for (int i = 0; i < n; ++i)
        if (freemap[i] >= 0) d(i) = df(freemap[i]);
    }
    double alpha = 1.0;
    bool accepted = false;
    Vec trial(n);
    for (int ls = 0; ls < 60; ++ls) {
      for (int i = 0; i < n; ++i) trial(i) = std::clamp(chi(i) + alpha * d(i), lo(i), hi(i));
      const double Jt = chi_objective(trial, c);
      const double slope = g.dot(trial - chi);
      if (Jt <= J + 1e-4 * slope) {
        accepted = true;
        J = Jt;
        break;
      }
      // near the solution the decrease drops below rounding of J; accept Newton steps that shrink the residual
      if (ls == 0 && Jt <= J + 1e-13 * (1.0 + std::fabs(J))) {
        const double rt = projected_residual(trial, chi_gradient(trial, c), mass, lo, hi).lpNorm<Eigen::Infinity>();
        if (rt < 0.5 * r) {
          accepted = true;
          J = std::min(J, Jt);
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) throw ChiStepFailure("chi step: line search failed", chi, r);
    chi = trial;
  }
  res.iterations = it;
  res.residual = r;
  if (!(r <= opt.tol)) throw ChiStepFailure("chi step: no convergence", chi, r);

  // multipliers from the nodal gradient density
  Vec force(n);
  const Vec Ap = gradient_flow_residual(m, chi, grad_flow_params(*c.mp));
  const double q = (1.0 + std::sqrt(c.tau)) / c.tau;
  res.xi = Vec::Zero(n);
  res.zeta = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double F = q * (chi(i) - c.chi_prev(i)) + nodal_force(chi(i), i, c) + Ap(i) / mass(i);
    if (c.pot->beta == BetaKind::QuadraticPenalty) res.xi(i) = beta_d1(chi(i), *c.pot);
    if (yosida_active(c)) res.zeta(i) = yosida_alpha((chi(i) - c.chi_prev(i)) / c.tau, c.nu);
    const bool at_lo = chi(i) == lo(i), at_hi = chi(i) == hi(i);
    if (at_lo && at_hi) {
      res.xi(i) = -std::max(F, 0.0);
      res.zeta(i) = std::max(-F, 0.0);
    } else if (at_lo) {
      res.xi(i) = -std::max(F, 0.0);
    } else if (at_hi) {
      res.zeta(i) = std::max(-F, 0.0);
    }
    if (at_lo) ++res.active_lower;
    if (at_hi) ++res.active_upper;
  }
  res.chi = chi;
  res.objective = chi_objective(chi, c);
  return res;
}

Vec chi_force_terms(const ChiStepContext& c, const Vec& chi) {
  Vec f(chi.size());
  for (int i = 0; i < chi.size(); ++i) f(i) = nodal_force(chi(i), i, c);
  return f;
}

Vec chi_stationarity_residual(const ChiStepContext& c, const Vec& chi, const Vec& xi, const Vec& zeta) {
  const Mesh& m = *c.mesh;
  const Vec Ap = gradient_flow_residual(m, chi, grad_flow_params(*c.mp));
  const double q = (1.0 + std::sqrt(c.tau)) / c.tau;
  Vec r(chi.size());
  for (int i = 0; i < chi.size(); ++i)
    r(i) = q * (chi(i) - c.chi_prev(i)) + xi(i) + zeta(i) + nodal_force(chi(i), i, c) + Ap(i) / m.lumped[i];
  return r;
}

Vec xi_from_complementarity(const Vec& chi, const Vec& force, double tol_zero) {
  Vec xi = Vec::Zero(chi.size());
  for (int i = 0; i < chi.size(); ++i)
    if (chi(i) <= tol_zero) xi(i) = -std::max(force(i), 0.0);
  return xi;
}

double one_sided_vi_residual(const ChiStepContext& c, const Vec& chi, const Vec& xi, const Vec& psi) {
  for (int i = 0; i < psi.size(); ++i)
    if (psi(i) > 0.0) throw std::invalid_argument("one_sided_vi_residual: test function must be nonpositive");
  const Mesh& m = *c.mesh;
  const Vec Ap = gradient_flow_residual(m, chi, grad_flow_params(*c.mp));
  const double q = (1.0 + std::sqrt(c.tau)) / c.tau;
  double s = 0.0;
  for (int i = 0; i < chi.size(); ++i)
    s += psi(i) * (m.lumped[i] * (q * (chi(i) - c.chi_prev(i)) + xi(i) + nodal_force(chi(i), i, c)) + Ap(i));
  return s;
}

}  // namespace thermovisc
