#include "thermovisc/verification.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace thermovisc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mass_dot(const Mesh& m, const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < m.n_nodes(); ++i) s += m.lumped[i] * a(i) * b(i);
  return s;
}

double kinetic(const Mesh& m, const Vec& v) {
  double s = 0.0;
  for (int i = 0; i < m.n_nodes(); ++i)
    for (int k = 0; k < m.dim; ++k) s += m.lumped[i] * v(i * m.dim + k) * v(i * m.dim + k);
  return 0.5 * s;
}

double chi_regularization(const Problem& pb, const Vec& chi) {
  if (pb.opts.nu_reg == 0.0) return 0.0;
  double s = 0.0;
  for (int i = 0; i < chi.size(); ++i)
    s += pb.mesh.lumped[i] * pb.opts.nu_reg / pb.opts.eta_reg * std::pow(std::fabs(chi(i)), pb.opts.eta_reg);
  return s;
}

// Scaled defect: LHS - RHS relative to 1 + |LHS| + |RHS|.
double scaled(double lhs, double rhs) { return (lhs - rhs) / (1.0 + std::fabs(lhs) + std::fabs(rhs)); }

}  // namespace

bool VerificationReport::pass() const {
  for (const auto& c : checks)
    if (c.applicable && !c.pass) return false;
  return true;
}

const CheckRecord* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string VerificationReport::table() const {
  std::ostringstream os;
  os << std::left << std::setw(26) << "check" << std::setw(8) << "status" << std::setw(16) << "worst" << std::setw(12)
     << "tolerance" << "location\n";
  for (const auto& c : checks) {
    os << std::setw(26) << c.name << std::setw(8) << (!c.applicable ? "n/a" : c.pass ? "PASS" : "FAIL")
       << std::setw(16) << std::setprecision(6) << c.worst << std::setw(12) << c.tolerance;
    if (c.step_s >= 0 || c.step_t >= 0) os << "s=" << c.step_s << " t=" << c.step_t;
    if (c.test >= 0) os << " test=" << c.test;
    if (!c.note.empty()) os << " (" << c.note << ")";
    os << '\n';
  }
  os << "summary " << (pass() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

std::string VerificationReport::key_values() const {
  std::ostringstream os;
  os << std::setprecision(17);
  for (const auto& c : checks) {
    const std::string p = "check." + c.name + ".";
    os << p << "applicable=" << c.applicable << '\n'
       << p << "pass=" << c.pass << '\n'
       << p << "worst=" << c.worst << '\n'
       << p << "tolerance=" << c.tolerance << '\n'
       << p << "step_s=" << c.step_s << '\n'
       << p << "step_t=" << c.step_t << '\n'
       << p << "test=" << c.test << '\n';
  }
  for (const auto& [k, v] : info) os << "info." << k << '=' << v << '\n';
  os << "summary.pass=" << pass() << '\n';
  return os.str();
}

double EnergyParts::total() const {
  if (!feasible) return kInf;
  return thermal + kinetic + elastic + gradient + potential + regularization;
}

EnergyParts total_energy_parts(const Problem& pb, const State& s) {
  const Mesh& m = pb.mesh;
  EnergyParts e;
  e.thermal = mass_dot(m, s.theta, Vec::Ones(m.n_nodes()));
  e.kinetic = kinetic(m, s.v);
  const Vec D = nodal_energy_weights(m, s.u, pb.mp.elastic);
  for (int i = 0; i < m.n_nodes(); ++i) {
    e.elastic += 0.5 * b_coef(s.chi(i), pb.mp) * D(i);
    const auto w = eval_potential(s.chi(i), pb.pot);
    if (!w.feasible) e.feasible = false;
    else e.potential += m.lumped[i] * w.value;
  }
  e.gradient = gradient_energy(m, s.chi, grad_flow_params(pb.mp));
  e.regularization = strain_power_energy(m, s.u, pb.opts.nu_reg, pb.opts.eta_reg) + chi_regularization(pb, s.chi);
  return e;
}

double total_energy(const Problem& pb, const State& s) { return total_energy_parts(pb, s).total(); }

double chi_free_energy(const Problem& pb, const Vec& chi) {
  const Mesh& m = pb.mesh;
  double s = gradient_energy(m, chi, grad_flow_params(pb.mp)) + chi_regularization(pb, chi);
  for (int i = 0; i < m.n_nodes(); ++i) {
    const auto w = eval_potential(chi(i), pb.pot);
    if (!w.feasible) return kInf;
    s += m.lumped[i] * w.value;
  }
  return s;
}

std::vector<int> sample_steps(int K, int max_points) {
  std::vector<int> r;
  if (K + 1 <= max_points) {
    for (int k = 0; k <= K; ++k) r.push_back(k);
    return r;
  }
  for (int j = 0; j < max_points; ++j) {
    const int k = static_cast<int>(std::llround(static_cast<double>(j) * K / (max_points - 1)));
    if (r.empty() || r.back() != k) r.push_back(k);
  }
  return r;
}

double EntropyTest::profile_value(double t, double T) const {
  const double s = T > 0.0 ? t / T : 0.0;
  if (profile == 1) return 1.0 + s;
  if (profile == 2) return 1.0 - 0.5 * s;
  return 1.0;
}

std::vector<EntropyTest> default_test_bank(const Mesh& m, double T) {
  (void)T;
  const int n = m.n_nodes();
  std::vector<EntropyTest> bank;
  bank.push_back({"constant", Vec::Ones(n), 0});
  bank.push_back({"constant_lin", Vec::Ones(n), 1});
  // hats at a boundary node, a quarter node and the central node
  std::vector<int> hats{0, n / 4, n / 2};
  if (m.dim == 2) {
    // pick the node closest to the domain centre for the central hat
    double best = kInf;
    double cx = 0, cy = 0;
    for (const auto& p : m.nodes) cx += p[0] / n, cy += p[1] / n;
    for (int i = 0; i < n; ++i) {
      const double d = std::hypot(m.nodes[i][0] - cx, m.nodes[i][1] - cy);
      if (d < best) best = d, hats[2] = i;
    }
  }
  for (size_t j = 0; j < hats.size(); ++j) {
    Vec h = Vec::Zero(n);
    h(hats[j]) = 1.0;
    bank.push_back({"hat" + std::to_string(hats[j]), h, 0});
    bank.push_back({"hat" + std::to_string(hats[j]) + "_dec", h, 2});
  }
  double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
  for (const auto& p : m.nodes) {
    xmin = std::min(xmin, p[0]), xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]), ymax = std::max(ymax, p[1]);
  }
  for (double frac : {0.3, 0.7}) {
    Vec b(n);
    const double x0 = xmin + frac * (xmax - xmin), y0 = 0.5 * (ymin + ymax), w = 0.2 * (xmax - xmin);
    for (int i = 0; i < n; ++i) {
      const double dx = m.nodes[i][0] - x0, dy = m.dim == 2 ? m.nodes[i][1] - y0 : 0.0;
      b(i) = std::exp(-(dx * dx + dy * dy) / (w * w));
    }
    const std::string nm = "bump" + std::to_string(static_cast<int>(frac * 10));
    bank.push_back({nm, b, 0});
    bank.push_back({nm + "_lin", b, 1});
  }
  return bank;
}

CheckRecord check_total_energy_inequality(const Problem& pb, const Trajectory& tr, double tol, int max_points) {
  const Mesh& m = pb.mesh;
  CheckRecord c;
  c.name = "total_energy";
  c.tolerance = tol;
  const int K = tr.n_steps();
  std::vector<double> E(K + 1), work(K + 1, 0.0);
  for (int k = 0; k <= K; ++k) E[k] = total_energy(pb, tr.states[k]);
  for (int k = 0; k < K; ++k) {
    const StepData& d = tr.data[k];
    const double w = mass_dot(m, d.g, Vec::Ones(m.n_nodes())) + boundary_flux_load(m, d.h).sum() +
                     body_force_load(m, d.f).dot(tr.states[k + 1].v);
    work[k + 1] = work[k] + tr.tau(k) * w;
  }
  c.worst = -kInf;
  const auto grid = sample_steps(K, max_points);
  for (size_t a = 0; a < grid.size(); ++a)
    for (size_t b = a + 1; b < grid.size(); ++b) {
      const int s = grid[a], t = grid[b];
      const double lhs = E[t] - E[s], rhs = work[t] - work[s];
      const double d = std::isfinite(lhs) ? scaled(lhs, rhs) : kInf;
      if (d > c.worst) c.worst = d, c.step_s = s, c.step_t = t;
    }
  if (grid.size() < 2) c.worst = 0.0;
  c.pass = c.worst <= tol;
  return c;
}

CheckRecord check_entropy_inequality(const Problem& pb, const Trajectory& tr, const std::vector<EntropyTest>& bank,
                                     double tol, int max_points) {
  const Mesh& m = pb.mesh;
  CheckRecord c;
  c.name = "entropy";
  c.tolerance = tol;
  const int K = tr.n_steps(), n = m.n_nodes();
  const double T = tr.states.back().t - tr.states.front().t;
  std::vector<Vec> L(K + 1);
  for (int k = 0; k <= K; ++k) {
    const Vec& th = tr.states[k].theta;
    if (!(th.minCoeff() > 0.0)) throw DomainError("entropy check: nonpositive temperature at step " + std::to_string(k));
    L[k] = th.array().log().matrix() + tr.states[k].chi;
  }
  // per-step fields that do not depend on the test
  std::vector<Vec> dv(K + 1), Aop(K + 1), q(K + 1), H(K + 1);
  for (int k = 1; k <= K; ++k) {
    const State& s = tr.states[k];
    const State& p = tr.states[k - 1];
    const double tau = tr.tau(k - 1);
    dv[k] = lumped_divergence(m, s.v);
    const double M = std::max(tr.diag[k - 1].M, 2.0 * s.theta.maxCoeff());
    Aop[k] = heat_flux_operator(m, s.theta, M, pb.mp);
    HeatInputs hin{p.theta, p.chi, s.chi, s.v, tau, tr.data[k - 1].g, tr.data[k - 1].h};
    q[k] = heat_source_density(pb, hin);
    H[k] = boundary_flux_load(m, tr.data[k - 1].h);
  }
  const auto grid = sample_steps(K, max_points);
  c.worst = grid.size() < 2 ? 0.0 : -kInf;
  for (size_t it = 0; it < bank.size(); ++it) {
    const EntropyTest& test = bank[it];
    auto phi = [&](int k) { return Vec(test.space * test.profile_value(tr.states[k].t - tr.states[0].t, T)); };
    // cumulative sums of the per-step terms and of their magnitudes
    std::vector<double> cum(K + 1, 0.0), mag(K + 1, 0.0);
    for (int k = 1; k <= K; ++k) {
      const double tau = tr.tau(k - 1);
      const Vec pk = phi(k), pk1 = phi(k - 1);
      const Vec& th = tr.states[k].theta;
      const double t1 = mass_dot(m, L[k - 1], pk - pk1);
      const double t2 = tau * pb.mp.rho * mass_dot(m, dv[k], pk);
      double t3 = 0.0, t5 = 0.0;
      for (int i = 0; i < n; ++i) {
        t3 += tau * pk(i) / th(i) * Aop[k](i);
        t5 += tau * (m.lumped[i] * pk(i) * q[k](i) / th(i) + pk(i) * H[k](i) / th(i));
      }
      cum[k] = cum[k - 1] + t1 - t2 - t3 + t5;
      mag[k] = mag[k - 1] + std::fabs(t1) + std::fabs(t2) + std::fabs(t3) + std::fabs(t5);
    }
    for (size_t a = 0; a < grid.size(); ++a)
      for (size_t b = a + 1; b < grid.size(); ++b) {
        const int s = grid[a], t = grid[b];
        const double ends = mass_dot(m, L[t], phi(t)) - mass_dot(m, L[s], phi(s));
        const double defect = cum[t] - cum[s] - ends;
        const double scale = 1.0 + (mag[t] - mag[s]) + std::fabs(ends);
        const double d = defect / scale;
        if (d > c.worst) c.worst = d, c.step_s = s, c.step_t = t, c.test = static_cast<int>(it);
      }
  }
  if (bank.empty()) c.worst = 0.0;
  c.pass = c.worst <= tol;
  c.note = std::to_string(bank.size()) + " tests";
  return c;
}

CheckRecord check_chi_energy_dissipation(const Problem& pb, const Trajectory& tr, double tol, int max_points) {
  const Mesh& m = pb.mesh;
  CheckRecord c;
  c.name = "chi_dissipation";
  c.tolerance = tol;
  if (pb.mp.mu_flag != 1) {
    c.applicable = false;
    c.note = "mu = 0";
    return c;
  }
  const int K = tr.n_steps(), n = m.n_nodes();
  const double lam = lambda_convexity(pb.pot);
  std::vector<double> Phi(K + 1), lhs(K + 1, 0.0), rhs(K + 1, 0.0);
  for (int k = 0; k <= K; ++k) Phi[k] = chi_free_energy(pb, tr.states[k].chi);
  for (int k = 1; k <= K; ++k) {
    const State& s = tr.states[k];
    const State& p = tr.states[k - 1];
    const double tau = tr.tau(k - 1);
    const Vec D = nodal_energy_weights(m, p.u, pb.mp.elastic);
    double dis = 0.0, pw = 0.0, rr = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = (s.chi(i) - p.chi(i)) / tau;
      const double e = D(i) / m.lumped[i];
      dis += m.lumped[i] * r * r;
      pw += m.lumped[i] * r * (-0.5 * b_d1(s.chi(i), pb.mp) * e + s.theta(i));
    }
    rr = dis;
    lhs[k] = lhs[k - 1] + tau * (1.0 + std::sqrt(tau)) * dis;
    rhs[k] = rhs[k - 1] + tau * pw + 0.5 * lam * tau * tau * rr;
  }
  const auto grid = sample_steps(K, max_points);
  c.worst = grid.size() < 2 ? 0.0 : -kInf;
  for (size_t a = 0; a < grid.size(); ++a)
    for (size_t b = a + 1; b < grid.size(); ++b) {
      const int s = grid[a], t = grid[b];
      const double L = lhs[t] - lhs[s] + Phi[t], R = Phi[s] + rhs[t] - rhs[s];
      const double d = std::isfinite(L) ? scaled(L, R) : kInf;
      if (d > c.worst) c.worst = d, c.step_s = s, c.step_t = t;
    }
  c.pass = c.worst <= tol;
  return c;
}

std::vector<double> trajectory_floor(const Problem& pb, const Trajectory& tr) {
  std::vector<double> taus;
  for (int k = 0; k < tr.n_steps(); ++k) taus.push_back(tr.tau(k));
  return positivity_floor_sequence(pb.mp.theta_star, positivity_constant(pb.mp, pb.mesh.dim), taus);
}

double observed_floor_rate(const Problem& pb, const Trajectory& tr) {
  double C = 0.0;
  for (int k = 1; k <= tr.n_steps(); ++k) {
    const State& s = tr.states[k];
    const State& p = tr.states[k - 1];
    const Vec dv = lumped_divergence(pb.mesh, s.v);
    for (int i = 0; i < pb.mesh.n_nodes(); ++i) {
      const double r = (s.chi(i) - p.chi(i)) / tr.tau(k - 1);
      C = std::max(C, std::max(-r, 0.0) + pb.mp.rho * std::fabs(dv(i)));
    }
  }
  return C;
}

std::vector<CheckRecord> check_constraints(const Problem& pb, const Trajectory& tr) {
  const Mesh& m = pb.mesh;
  const int K = tr.n_steps();
  std::vector<CheckRecord> out;

  CheckRecord pos;
  pos.name = "positivity";
  const auto floor = trajectory_floor(pb, tr);
  pos.worst = -kInf;
  for (int k = 0; k <= K; ++k) {
    const double d = floor[k] - tr.states[k].theta.minCoeff();
    if (d > pos.worst) pos.worst = d, pos.step_t = k;
  }
  pos.pass = pos.worst <= 0.0 && tr.states.back().theta.minCoeff() > 0.0;
  pos.note = "floor " + std::to_string(floor.back());
  out.push_back(pos);

  CheckRecord irr;
  irr.name = "irreversibility";
  if (pb.mp.mu_flag != 1 || pb.opts.nu > 0.0) {
    irr.applicable = false;
    irr.note = pb.mp.mu_flag != 1 ? "mu = 0" : "penalized constraint";
  } else {
    irr.worst = K > 0 ? -kInf : 0.0;
    for (int k = 1; k <= K; ++k) {
      const double d = (tr.states[k].chi - tr.states[k - 1].chi).maxCoeff();
      if (d > irr.worst) irr.worst = d, irr.step_t = k;
    }
    irr.pass = irr.worst <= 0.0;
  }
  out.push_back(irr);

  CheckRecord box;
  box.name = "box";
  box.tolerance = 1e-10;
  box.worst = -kInf;
  // chi <= 1 follows from exact irreversibility; the penalized path only approximates it
  const bool upper = pb.mp.mu_flag == 1 && pb.opts.nu == 0.0;
  const bool lower = pb.pot.beta == BetaKind::Indicator;
  double excess = 0.0;
  for (int k = 0; k <= K; ++k) {
    const Vec& chi = tr.states[k].chi;
    double d = -kInf;
    if (lower) d = std::max(d, -chi.minCoeff());
    if (upper) d = std::max(d, chi.maxCoeff() - 1.0);
    excess = std::max(excess, chi.maxCoeff() - 1.0);
    if (d > box.worst) box.worst = d, box.step_t = k;
  }
  if (!lower && !upper) {
    box.applicable = false;
    box.note = "no bounds in this mode";
  } else {
    box.pass = box.worst <= box.tolerance;
    if (pb.mp.mu_flag != 1) box.note = "lower bound only (mu = 0)";
    else if (!upper) box.note = "lower bound only (penalized); max chi - 1 = " + std::to_string(excess);
  }
  out.push_back(box);

  CheckRecord dir;
  dir.name = "dirichlet";
  const auto fixed = dirichlet_dofs(m);
  for (int k = 0; k <= K; ++k)
    for (size_t i = 0; i < fixed.size(); ++i)
      if (fixed[i]) {
        const double d = std::fabs(tr.states[k].u(static_cast<int>(i)));
        if (d > dir.worst) dir.worst = d, dir.step_t = k;
      }
  dir.pass = dir.worst <= 0.0;
  out.push_back(dir);

  CheckRecord comp;
  comp.name = "complementarity";
  comp.tolerance = 1e-10;
  if (pb.pot.beta != BetaKind::Indicator) {
    comp.applicable = false;
    comp.note = "no constraint on chi";
  } else {
    for (int k = 1; k <= K; ++k) {
      const State& s = tr.states[k];
      for (int i = 0; i < m.n_nodes(); ++i) {
        const double d = std::max(std::fabs(s.xi(i) * s.chi(i)), std::max(s.xi(i), 0.0));
        if (d > comp.worst) comp.worst = d, comp.step_t = k;
      }
    }
    comp.pass = comp.worst <= comp.tolerance;
  }
  out.push_back(comp);
  return out;
}

CheckRecord check_chi_descent(const Trajectory& tr) {
  CheckRecord c;
  c.name = "chi_descent";
  c.tolerance = 1e-12;
  c.worst = tr.diag.empty() ? 0.0 : -kInf;
  for (size_t k = 0; k < tr.diag.size(); ++k) {
    const auto& d = tr.diag[k];
    const double v = (d.chi_objective - d.chi_objective_prev) / (1.0 + std::fabs(d.chi_objective_prev));
    if (v > c.worst) c.worst = v, c.step_t = static_cast<int>(k) + 1;
  }
  c.pass = c.worst <= c.tolerance;
  return c;
}

Monitors apriori_monitors(const Problem& pb, const Trajectory& tr, double alpha) {
  const Mesh& m = pb.mesh;
  const int K = tr.n_steps(), n = m.n_nodes();
  const SpMat A = stiffness_matrix(m);
  const Vec one = Vec::Ones(n);
  double sup_l1 = 0, th_l2h1 = 0, log_l2h1 = 0, kgrad = 0, v_l2h1 = 0, v_linf = 0, chi_w1p = 0, rate_l2 = 0, var = 0;
  const double p = pb.mp.p_exponent;
  const auto bank = default_test_bank(m, 1.0);
  auto w1p = [&](const Vec& chi) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += m.lumped[i] * std::pow(std::fabs(chi(i)), p);
    GradFlowParams gp;
    gp.p = p;
    s += p * gradient_energy(m, chi, gp);
    return std::pow(s, 1.0 / p);
  };
  auto vel_h1 = [&](const Vec& v) {
    double s = 0.0;
    for (int c = 0; c < m.dim; ++c) {
      Vec vc(n);
      for (int i = 0; i < n; ++i) vc(i) = v(i * m.dim + c);
      s += mass_dot(m, vc, vc) + vc.dot(A * vc);
    }
    return s;
  };
  for (int k = 0; k <= K; ++k) {
    const State& s = tr.states[k];
    sup_l1 = std::max(sup_l1, mass_dot(m, s.theta.cwiseAbs(), one));
    v_linf = std::max(v_linf, std::sqrt(2.0 * kinetic(m, s.v)));
    chi_w1p = std::max(chi_w1p, w1p(s.chi));
    if (k == 0) continue;
    const double tau = tr.tau(k - 1);
    const Vec& th = s.theta;
    const Vec lg = th.array().log().matrix();
    th_l2h1 += tau * (mass_dot(m, th, th) + th.dot(A * th));
    log_l2h1 += tau * (mass_dot(m, lg, lg) + lg.dot(A * lg));
    const Vec pw = th.array().pow(0.5 * alpha).matrix();
    const Vec thT = element_average(m, th);
    for (int e = 0; e < m.n_elems(); ++e) {
      double g2 = 0.0;
      for (int c = 0; c < m.dim; ++c) {
        double gc = 0.0;
        for (int a = 0; a <= m.dim; ++a) gc += pw(m.elems[e][a]) * m.grad[e][a][c];
        g2 += gc * gc;
      }
      kgrad += tau * m.measure[e] * heat_conductivity(thT(e), pb.mp) * g2;
    }
    v_l2h1 += tau * vel_h1(s.v);
    const Vec r = (s.chi - tr.states[k - 1].chi) / tau;
    rate_l2 += tau * mass_dot(m, r, r);
    const Vec dl = lg - tr.states[k - 1].theta.array().log().matrix();
    double best = 0.0;
    for (const auto& t : bank) best = std::max(best, std::fabs(mass_dot(m, dl, t.space)));
    var += best;
  }
  return {{"sup_theta_L1", sup_l1},
          {"theta_L2H1", std::sqrt(th_l2h1)},
          {"log_theta_L2H1", std::sqrt(log_l2h1)},
          {"K_grad_theta_alpha", kgrad},
          {"v_L2H1", std::sqrt(v_l2h1)},
          {"v_LinfL2", v_linf},
          {"chi_LinfW1p", chi_w1p},
          {"chi_rate_L2L2", std::sqrt(rate_l2)},
          {"log_theta_variation", var}};
}

double monitor_value(const Monitors& ms, const std::string& name) {
  for (const auto& [k, v] : ms)
    if (k == name) return v;
  return std::numeric_limits<double>::quiet_NaN();
}

VerificationReport verify_trajectory(const Problem& pb, const Trajectory& tr, const VerifyOptions& opt) {
  VerificationReport rep;
  rep.checks.push_back(check_total_energy_inequality(pb, tr, opt.tol_energy, opt.max_points));
  const double T = tr.states.back().t - tr.states.front().t;
  rep.checks.push_back(check_entropy_inequality(pb, tr, default_test_bank(pb.mesh, T), opt.tol_entropy, opt.max_points));
  rep.checks.push_back(check_chi_energy_dissipation(pb, tr, opt.tol_dissipation, opt.max_points));
  for (auto& c : check_constraints(pb, tr)) rep.checks.push_back(c);
  rep.checks.push_back(check_chi_descent(tr));

  CheckRecord msuf;
  msuf.name = "truncation_inactive";
  for (int k = 1; k <= tr.n_steps(); ++k) {
    const double d = tr.states[k].theta.cwiseAbs().maxCoeff() - tr.diag[k - 1].M;
    if (k == 1 || d > msuf.worst) msuf.worst = d, msuf.step_t = k;
  }
  msuf.pass = msuf.worst <= 0.0;
  rep.checks.push_back(msuf);

  const auto floor = trajectory_floor(pb, tr);
  rep.info.push_back({"floor_constant", positivity_constant(pb.mp, pb.mesh.dim)});
  rep.info.push_back({"floor_final", floor.back()});
  rep.info.push_back({"observed_floor_rate", observed_floor_rate(pb, tr)});
  double thmin = kInf;
  for (const auto& s : tr.states) thmin = std::min(thmin, s.theta.minCoeff());
  rep.info.push_back({"theta_min", thmin});
  for (const auto& [k, v] : apriori_monitors(pb, tr)) rep.info.push_back({"monitor." + k, v});
  return rep;
}

}  // namespace thermovisc
