#include "thermovisc/stepper.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace thermovisc {

namespace {

double inf_norm(const Vec& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

void apply_dirichlet(SpMat& S, Vec& rhs, const std::vector<char>& fixed) {
  for (int k = 0; k < S.outerSize(); ++k)
    for (SpMat::InnerIterator it(S, k); it; ++it)
      if (fixed[it.row()] || fixed[it.col()]) it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
  for (int i = 0; i < rhs.size(); ++i)
    if (fixed[i]) rhs(i) = 0.0;
}

Vec nodal_map(const Vec& chi, double (*f)(double, const MaterialParams&), const MaterialParams& mp) {
  Vec r(chi.size());
  for (int i = 0; i < chi.size(); ++i) r(i) = f(chi(i), mp);
  return r;
}

}  // namespace

StepData local_mean(const Sources& s, const Mesh& m, double t0, double t1, bool validate) {
  const int n = m.n_nodes(), d = m.dim;
  StepData sd;
  sd.f = Vec::Zero(n * d);
  sd.g = Vec::Zero(n);
  sd.h = Vec::Zero(n);
  const int nsub = 4;
  const double gs = 0.5 * std::sqrt(0.6);
  const double gx[3] = {0.5 - gs, 0.5, 0.5 + gs};
  const double gw[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  const double L = t1 - t0;
  for (int sub = 0; sub < nsub; ++sub) {
    for (int q = 0; q < 3; ++q) {
      const double t = t0 + L * (sub + gx[q]) / nsub;
      const double w = gw[q] / nsub;
      for (int i = 0; i < n; ++i) {
        const auto& x = m.nodes[i];
        for (int k = 0; k < d; ++k)
          if (s.f[k]) sd.f(i * d + k) += w * s.f[k](x, t);
        if (s.g) sd.g(i) += w * s.g(x, t);
        if (s.h && m.boundary_node[i]) sd.h(i) += w * s.h(x, t);
      }
    }
  }
  for (int i = 0; validate && i < n; ++i) {
    if (sd.g(i) < 0.0) throw std::invalid_argument("local means: g must be nonnegative");
    if (sd.h(i) < 0.0) throw std::invalid_argument("local means: h must be nonnegative");
  }
  return sd;
}

std::vector<StepData> local_means(const Sources& s, const Mesh& m, const std::vector<double>& times) {
  std::vector<StepData> r;
  for (size_t k = 0; k + 1 < times.size(); ++k) r.push_back(local_mean(s, m, times[k], times[k + 1]));
  return r;
}

std::vector<double> positivity_floor_sequence(double theta_star, double C, const std::vector<double>& taus) {
  std::vector<double> v{theta_star};
  for (double tau : taus) {
    const double p = v.back();
    // (-1 + sqrt(1 + 4 C tau p)) / (2 C tau), written without cancellation
    v.push_back(C == 0.0 ? p : 2.0 * p / (1.0 + std::sqrt(1.0 + 4.0 * C * tau * p)));
  }
  return v;
}

PositivityFloor positivity_floor(double theta_star, double C, double T, double tau) {
  if (!(theta_star > 0.0) || !(C >= 0.0)) throw std::invalid_argument("positivity_floor: need theta_star > 0, C >= 0");
  PositivityFloor r;
  const int K = static_cast<int>(std::llround(T / tau));
  r.recursion = positivity_floor_sequence(theta_star, C, std::vector<double>(K, tau));
  r.closed_form = theta_star / (1.0 + C * T * theta_star);
  return r;
}

double positivity_constant(const MaterialParams& mp, int dim) {
  return 0.25 + mp.rho * mp.rho / (4.0 * mp.omega * mp.c2 * divergence_bound_constant(mp.elastic, dim));
}

std::vector<char> dirichlet_dofs(const Mesh& m) {
  std::vector<char> fixed(m.n_nodes() * m.dim, 0);
  for (int i = 0; i < m.n_nodes(); ++i)
    if (m.boundary_node[i])
      for (int k = 0; k < m.dim; ++k) fixed[i * m.dim + k] = 1;
  return fixed;
}

Vec solve_momentum_subsystem(const Problem& pb, const Vec& u_prev, const Vec& v_prev, const Vec& chi_prev,
                             const Vec& chi_k, const Vec& theta_k, const Vec& f_k, double tau) {
  const Mesh& m = pb.mesh;
  const MaterialParams& mp = pb.mp;
  const int nd = m.n_nodes() * m.dim;
  const SpMat V = assemble_weighted_form(m, nodal_map(chi_prev, a_coef, mp), mp.omega, mp.elastic);
  const SpMat E = assemble_weighted_form(m, nodal_map(chi_k, b_coef, mp), 1.0, mp.elastic);
  Vec mdiag(nd);
  for (int i = 0; i < m.n_nodes(); ++i)
    for (int k = 0; k < m.dim; ++k) mdiag(i * m.dim + k) = m.lumped[i];
  SpMat S = tau * V + tau * tau * E;
  for (int i = 0; i < nd; ++i) S.coeffRef(i, i) += mdiag(i);
  Vec rhs = mdiag.cwiseProduct(u_prev + tau * v_prev) + tau * (V * u_prev) +
            tau * tau * (body_force_load(m, f_k) - assemble_coupling(m, theta_k, mp.rho));
  const auto fixed = dirichlet_dofs(m);
  const double nu = pb.opts.nu_reg, eta = pb.opts.eta_reg;
  if (nu == 0.0) {
    apply_dirichlet(S, rhs, fixed);
    Eigen::SimplicialLDLT<SpMat> ldlt(S);
    if (ldlt.info() != Eigen::Success) throw StepFailure("momentum: factorization failed");
    Vec u = ldlt.solve(rhs);
    const double res = inf_norm(S * u - rhs);
    const double scale = inf_norm(rhs) + inf_norm(u) * inf_norm(S.cwiseAbs() * Vec::Ones(nd));
    if (!(res <= pb.opts.tol_lin * scale)) throw StepFailure("momentum: linear residual above tolerance");
    return u;
  }
  // Newton for S u + tau^2 R_nu(u) = rhs
  Vec u = u_prev;
  for (int i = 0; i < nd; ++i)
    if (fixed[i]) u(i) = 0.0;
  for (int it = 0; it < pb.opts.max_newton; ++it) {
    Vec G = S * u + tau * tau * strain_power_residual(m, u, nu, eta) - rhs;
    for (int i = 0; i < nd; ++i)
      if (fixed[i]) G(i) = 0.0;
    if (inf_norm(G) <= pb.opts.tol_lin * (1.0 + inf_norm(rhs))) return u;
    SpMat J = S + tau * tau * strain_power_jacobian(m, u, nu, eta);
    Vec mG = -G;
    apply_dirichlet(J, mG, fixed);
    Eigen::SimplicialLDLT<SpMat> ldlt(J);
    if (ldlt.info() != Eigen::Success) throw StepFailure("momentum: factorization failed");
    u += ldlt.solve(mG);
  }
  throw StepFailure("momentum: Newton did not converge");
}

Vec heat_source_density(const Problem& pb, const HeatInputs& in) {
  const Mesh& m = pb.mesh;
  const Vec s = viscous_source_density(m, nodal_map(in.chi_prev, a_coef, pb.mp), pb.mp.omega, pb.mp.elastic, in.v_k);
  const Vec rate = (in.chi_k - in.chi_prev) / in.tau;
  return in.g + s + (1.0 + 0.5 * std::sqrt(in.tau)) * rate.cwiseProduct(rate);
}

namespace {

struct HeatTerms {
  Vec r;    // chi rate + rho * lumped div v
  Vec src;  // source density
  Vec H;    // boundary load
};

HeatTerms heat_terms(const Problem& pb, const HeatInputs& in) {
  HeatTerms t;
  t.r = (in.chi_k - in.chi_prev) / in.tau + pb.mp.rho * lumped_divergence(pb.mesh, in.v_k);
  t.src = heat_source_density(pb, in);
  t.H = boundary_flux_load(pb.mesh, in.h);
  return t;
}

Vec heat_residual_impl(const Problem& pb, const HeatInputs& in, const HeatTerms& ht, const Vec& theta, double M) {
  const Mesh& m = pb.mesh;
  Vec R = heat_flux_operator(m, theta, M, pb.mp) - ht.H;
  for (int i = 0; i < m.n_nodes(); ++i)
    R(i) += m.lumped[i] * ((theta(i) - in.theta_prev(i)) / in.tau + ht.r(i) * truncate_value(theta(i), M) - ht.src(i));
  return R;
}

double density_norm(const Mesh& m, const Vec& R) {
  double s = 0.0;
  for (int i = 0; i < R.size(); ++i) s = std::max(s, std::fabs(R(i)) / m.lumped[i]);
  return s;
}

}  // namespace

Vec heat_step_residual(const Problem& pb, const HeatInputs& in, const Vec& theta, double M) {
  return heat_residual_impl(pb, in, heat_terms(pb, in), theta, M);
}

HeatSolve solve_heat_subsystem(const Problem& pb, const HeatInputs& in, double M) {
  const Mesh& m = pb.mesh;
  const HeatTerms ht = heat_terms(pb, in);
  const int n = m.n_nodes();
  HeatSolve hs;
  for (int attempt = 0; attempt < 40; ++attempt) {
    Vec theta = in.theta_prev;
    Vec R = heat_residual_impl(pb, in, ht, theta, M);
    double res = density_norm(m, R);
    bool ok = false;
    int it = 0;
    for (; it < pb.opts.max_newton; ++it) {
      if (res <= pb.opts.tol_heat * (1.0 + inf_norm(theta))) {
        ok = true;
        break;
      }
      SpMat J = heat_flux_jacobian(m, theta, M, pb.mp);
      for (int i = 0; i < n; ++i) {
        const double dT = std::fabs(theta(i)) < M ? 1.0 : 0.0;
        J.coeffRef(i, i) += m.lumped[i] * (1.0 / in.tau + ht.r(i) * dT);
      }
      Eigen::SparseLU<SpMat> lu;
      lu.analyzePattern(J);
      lu.factorize(J);
      if (lu.info() != Eigen::Success) throw StepFailure("heat: Jacobian factorization failed");
      const Vec d = lu.solve(-R);
      double alpha = 1.0;
      bool acc = false;
      for (int ls = 0; ls < 40; ++ls) {
        const Vec trial = theta + alpha * d;
        const Vec Rt = heat_residual_impl(pb, in, ht, trial, M);
        const double rt = density_norm(m, Rt);
        if (rt <= (1.0 - 1e-4 * alpha) * res || (ls == 0 && rt <= 1e-3 * (1.0 + res))) {
          theta = trial;
          R = Rt;
          res = rt;
          acc = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!acc) {
        // the residual is at rounding level if a full step no longer moves theta
        if (inf_norm(d) <= 1e-13 * (1.0 + inf_norm(theta))) {
          ok = true;
          break;
        }
        throw StepFailure("heat: line search failed");
      }
    }
    if (!ok) throw StepFailure("heat: Newton did not converge");
    hs.iterations += it;
    hs.residual = res;
    if (theta.maxCoeff() > M) {
      M *= 2.0;
      continue;
    }
    if (!(theta.minCoeff() > 0.0)) throw StepFailure("heat: nonpositive temperature");
    hs.theta = theta;
    hs.M = M;
    return hs;
  }
  throw StepFailure("heat: truncation level could not be made sufficient");
}

StepResult solve_time_step(const Problem& pb, const State& prev, const StepData& data, double tau, double& M) {
  const double lam = lambda_convexity(pb.pot);
  if (!(1.0 / (2.0 * std::sqrt(tau)) > lam)) throw StepFailure("step: tau violates 1/(2 sqrt(tau)) > lambda");
  StepResult sr;
  StepDiagnostics& dg = sr.diag;
  dg.tau = tau;
  Vec theta_it = prev.theta;
  Vec chi_it = prev.chi, u_it = prev.u;
  ChiStepResult cr;
  Vec u;
  HeatSolve hs;
  bool conv = false;
  for (int outer = 1; outer <= pb.opts.max_outer; ++outer) {
    ChiStepContext ctx = make_chi_context(pb.mesh, pb.mp, pb.pot, prev.chi, theta_it, prev.u, tau, pb.opts.nu);
    ctx.nu_reg = pb.opts.nu_reg;
    ctx.eta_reg = pb.opts.eta_reg;
    try {
      ChiSolveOptions co;
      co.tol = pb.opts.tol_chi;
      cr = solve_chi_step(ctx, co);
    } catch (const ChiStepFailure& e) {
      throw StepFailure(std::string("chi: ") + e.what());
    }
    u = solve_momentum_subsystem(pb, prev.u, prev.v, prev.chi, cr.chi, theta_it, data.f, tau);
    HeatInputs hin{prev.theta, prev.chi, cr.chi, (u - prev.u) / tau, tau, data.g, data.h};
    hs = solve_heat_subsystem(pb, hin, M);
    M = hs.M;
    const double dchi = inf_norm(cr.chi - chi_it) / (1.0 + inf_norm(cr.chi));
    const double du = inf_norm(u - u_it) / (1.0 + inf_norm(u));
    const double dth = inf_norm(hs.theta - theta_it) / (1.0 + inf_norm(hs.theta));
    dg.outer_iterations = outer;
    dg.chi_iterations += cr.iterations;
    dg.heat_iterations += hs.iterations;
    dg.fp_increment = std::max({dchi, du, dth});
    chi_it = cr.chi;
    u_it = u;
    theta_it = hs.theta;
    if (outer > 1 && dg.fp_increment < pb.opts.tol_fp) {
      conv = true;
      break;
    }
    if (!std::isfinite(dg.fp_increment)) break;
  }
  if (!conv) throw StepFailure("step: staggered iteration did not converge");
  dg.M = M;
  dg.chi_objective_prev = cr.objective_prev;
  dg.chi_objective = cr.objective;
  dg.heat_residual = hs.residual;
  dg.chi_residual = cr.residual;
  State& s = sr.state;
  s.t = prev.t + tau;
  s.theta = hs.theta;
  s.u = u;
  s.v = (u - prev.u) / tau;
  s.chi = cr.chi;
  s.xi = cr.xi;
  s.zeta = cr.zeta;
  return sr;
}

State make_initial_state(const Mesh& m, const Vec& theta0, const Vec& u0, const Vec& v0, const Vec& chi0) {
  State s;
  s.t = 0.0;
  s.theta = theta0;
  s.u = u0;
  s.v = v0;
  s.chi = chi0;
  s.xi = Vec::Zero(m.n_nodes());
  s.zeta = Vec::Zero(m.n_nodes());
  return s;
}

Trajectory run_simulation(const Problem& pb, const State& init, const Sources& src, double T, double tau) {
  if (!(tau > 0.0) || !(T >= 0.0)) throw std::invalid_argument("run_simulation: need tau > 0 and T >= 0");
  Trajectory tr;
  tr.states.push_back(init);
  double M = pb.opts.M0 > 0.0 ? pb.opts.M0 : 10.0 * (1.0 + init.theta.maxCoeff());
  double t = init.t;
  const double tend = init.t + T;
  double h_try = tau;
  while (tend - t > 1e-12 * std::max(1.0, tend)) {
    double h = std::min(h_try, tend - t);
    if (tend - (t + h) < 1e-9 * h) h = tend - t;
    int halvings = 0;
    for (;;) {
      const StepData data = local_mean(src, pb.mesh, t, t + h);
      try {
        double Mtry = M;
        StepResult r = solve_time_step(pb, tr.states.back(), data, h, Mtry);
        M = Mtry;
        r.state.t = (std::fabs(t + h - tend) <= 1e-12 * std::max(1.0, tend)) ? tend : t + h;
        r.diag.halvings = halvings;
        r.diag.tau = h;
        tr.states.push_back(r.state);
        tr.data.push_back(data);
        tr.diag.push_back(r.diag);
        break;
      } catch (const StepFailure& e) {
        h *= 0.5;
        ++halvings;
        if (h < pb.opts.min_tau) {
          std::ostringstream os;
          os << "run aborted at t=" << t << ": step size below min_tau (" << e.what() << ")";
          throw std::runtime_error(os.str());
        }
      }
    }
    t = tr.states.back().t;
    h_try = std::min(tau, 2.0 * h);
  }
  return tr;
}

}  // namespace thermovisc
