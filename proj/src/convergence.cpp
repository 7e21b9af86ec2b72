#include "thermovisc/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace thermovisc {

namespace {

const Vec& field_of(const State& s, Field f) {
  switch (f) {
    case Field::Theta: return s.theta;
    case Field::U: return s.u;
    case Field::V: return s.v;
    case Field::Chi: return s.chi;
  }
  return s.theta;
}

int components(const Mesh& m, const Vec& x) { return static_cast<int>(x.size()) / m.n_nodes(); }

double l2sq(const Mesh& m, const Vec& x) {
  const int c = components(m, x);
  double s = 0.0;
  for (int i = 0; i < m.n_nodes(); ++i)
    for (int k = 0; k < c; ++k) s += m.lumped[i] * x(i * c + k) * x(i * c + k);
  return s;
}

double h1sq(const Mesh& m, const SpMat& A, const Vec& x) {
  const int c = components(m, x);
  double s = l2sq(m, x);
  for (int k = 0; k < c; ++k) {
    Vec xc(m.n_nodes());
    for (int i = 0; i < m.n_nodes(); ++i) xc(i) = x(i * c + k);
    s += xc.dot(A * xc);
  }
  return s;
}

std::vector<double> merged_times(const Trajectory& a, const Trajectory& b) {
  std::vector<double> t;
  for (const auto& s : a.states) t.push_back(s.t);
  for (const auto& s : b.states) t.push_back(s.t);
  std::sort(t.begin(), t.end());
  std::vector<double> r;
  const double eps = 1e-12 * std::max(1.0, t.empty() ? 1.0 : std::fabs(t.back()));
  for (double x : t)
    if (r.empty() || x - r.back() > eps) r.push_back(x);
  return r;
}

// index of the first state with t_k >= t (within rounding)
int right_index(const Trajectory& tr, double t) {
  const double eps = 1e-12 * std::max(1.0, std::fabs(tr.states.back().t));
  for (size_t k = 0; k < tr.states.size(); ++k)
    if (tr.states[k].t >= t - eps) return static_cast<int>(k);
  return static_cast<int>(tr.states.size()) - 1;
}

template <class Norm>
double pwc_integral(const Trajectory& a, const Trajectory& b, Field f, Norm norm) {
  const auto t = merged_times(a, b);
  double s = 0.0;
  for (size_t j = 1; j < t.size(); ++j) {
    const Vec d = field_of(a.states[right_index(a, t[j])], f) - field_of(b.states[right_index(b, t[j])], f);
    s += (t[j] - t[j - 1]) * norm(d);
  }
  return s;
}

double min_order(const std::vector<double>& err, const std::vector<double>& step) {
  double o = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j + 1 < err.size(); ++j) o = std::min(o, std::log(err[j] / err[j + 1]) / std::log(step[j] / step[j + 1]));
  return o;
}

}  // namespace

int Interpolants::interval(double t) const {
  const int K = tr_->n_steps();
  for (int k = 1; k <= K; ++k)
    if (t <= tr_->states[k].t) return k;
  return std::max(K, 1);
}

const Vec& Interpolants::at(int k) const { return field_of(tr_->states[k], field_); }

Vec Interpolants::right_constant(double t) const {
  if (tr_->n_steps() == 0) return at(0);
  return at(interval(t));
}

Vec Interpolants::left_constant(double t) const {
  if (tr_->n_steps() == 0) return at(0);
  return at(interval(t) - 1);
}

Vec Interpolants::linear(double t) const {
  if (tr_->n_steps() == 0) return at(0);
  const int k = interval(t);
  const double t0 = tr_->states[k - 1].t, t1 = tr_->states[k].t;
  const double s = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
  return (1.0 - s) * at(k - 1) + s * at(k);
}

double distance_L2L2(const Mesh& m, const Trajectory& a, const Trajectory& b, Field f) {
  return std::sqrt(pwc_integral(a, b, f, [&](const Vec& d) { return l2sq(m, d); }));
}

double distance_L2H1(const Mesh& m, const Trajectory& a, const Trajectory& b, Field f) {
  const SpMat A = stiffness_matrix(m);
  return std::sqrt(pwc_integral(a, b, f, [&](const Vec& d) { return h1sq(m, A, d); }));
}

double distance_LinfL2(const Mesh& m, const Trajectory& a, const Trajectory& b, Field f) {
  const auto t = merged_times(a, b);
  double s = 0.0;
  for (size_t j = 1; j < t.size(); ++j) {
    const Vec d = field_of(a.states[right_index(a, t[j])], f) - field_of(b.states[right_index(b, t[j])], f);
    s = std::max(s, std::sqrt(l2sq(m, d)));
  }
  return s;
}

double distance_C0L2(const Mesh& m, const Trajectory& a, const Trajectory& b, Field f) {
  const Interpolants ia(a, f), ib(b, f);
  double s = 0.0;
  for (double t : merged_times(a, b)) s = std::max(s, std::sqrt(l2sq(m, ia.linear(t) - ib.linear(t))));
  return s;
}

bool StudyTable::pass() const {
  for (const auto& [k, v] : verdicts)
    if (!v) return false;
  return true;
}

double study_value(const StudyLevel& l, const std::string& key) {
  for (const auto& [k, v] : l.distances)
    if (k == key) return v;
  return monitor_value(l.monitors, key);
}

std::string StudyTable::to_text(char delim) const {
  std::ostringstream os;
  os << std::setprecision(10);
  std::vector<std::string> keys;
  for (const auto& l : levels) {
    for (const auto& [k, v] : l.distances)
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    for (const auto& [k, v] : l.monitors)
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  }
  os << "level" << delim << "parameter" << delim << "verified";
  for (const auto& k : keys) os << delim << k;
  os << '\n';
  for (const auto& l : levels) {
    os << l.label << delim << l.parameter << delim << (l.verified ? 1 : 0);
    for (const auto& k : keys) {
      const double v = study_value(l, k);
      os << delim;
      if (std::isnan(v)) os << '-';
      else os << v;
    }
    os << '\n';
  }
  for (const auto& [k, v] : verdicts) os << "# " << k << delim << (v ? "PASS" : "FAIL") << '\n';
  return os.str();
}

StudyTable tau_refinement_study(const RunSetup& base, int levels) {
  StudyTable tab;
  tab.name = "tau_refinement";
  const Mesh& m = base.pb.mesh;
  std::vector<Trajectory> runs;
  for (int l = 0; l < levels; ++l) {
    const double tau = base.tau / std::pow(2.0, l);
    runs.push_back(run_simulation(base.pb, base.init, base.src, base.T, tau));
    StudyLevel lv;
    lv.label = "tau" + std::to_string(l);
    lv.parameter = tau;
    lv.verified = verify_trajectory(base.pb, runs.back()).pass();
    lv.monitors = apriori_monitors(base.pb, runs.back());
    if (l > 0) {
      const Trajectory& a = runs[l - 1];
      const Trajectory& b = runs[l];
      lv.distances = {{"d_theta_L2L2", distance_L2L2(m, a, b, Field::Theta)},
                      {"d_theta_L2H1", distance_L2H1(m, a, b, Field::Theta)},
                      {"d_v_L2L2", distance_L2L2(m, a, b, Field::V)},
                      {"d_v_L2H1", distance_L2H1(m, a, b, Field::V)},
                      {"d_chi_C0L2", distance_C0L2(m, a, b, Field::Chi)}};
    }
    tab.levels.push_back(lv);
  }
  bool verified = true;
  for (const auto& l : tab.levels) verified = verified && l.verified;
  tab.verdicts.push_back({"all_levels_verified", verified});
  for (const char* key : {"d_theta_L2L2", "d_v_L2L2", "d_chi_C0L2"}) {
    bool dec = true;
    for (size_t l = 2; l < tab.levels.size(); ++l)
      dec = dec && study_value(tab.levels[l], key) < study_value(tab.levels[l - 1], key);
    tab.verdicts.push_back({std::string(key + 2) + "_decreasing", dec});
  }
  // one constant bounds every monitor on all levels: consecutive relative changes stay below 20% and the
  // increments contract, so the level sequence has a finite limit as tau -> 0
  bool bounded = true;
  if (!tab.levels.empty())
    for (const auto& [k, v0] : tab.levels[0].monitors) {
      double prev_inc = -1.0;
      for (size_t l = 1; l < tab.levels.size(); ++l) {
        const double a = monitor_value(tab.levels[l - 1].monitors, k), b = monitor_value(tab.levels[l].monitors, k);
        const double inc = std::fabs(b - a), noise = 1e-12 * (1.0 + std::fabs(a));
        if (!(inc <= 0.2 * std::max(std::fabs(a), 1e-12) + noise)) bounded = false;
        if (prev_inc >= 0.0 && !(inc <= prev_inc + noise)) bounded = false;
        prev_inc = inc;
      }
    }
  tab.verdicts.push_back({"monitors_bounded", bounded});
  return tab;
}

double manufactured_heat_error(int nodes, double tau, double T, double K) {
  MeshSpec ms;
  ms.dim = 1;
  ms.res = {nodes, 1};
  Problem pb;
  pb.mesh = build_mesh(ms);
  pb.mp.conductivity = ConductivityKind::Constant;
  pb.mp.c0 = K;
  pb.mp.c1 = K;
  const Mesh& m = pb.mesh;
  const double pi = std::numbers::pi;
  auto exact = [&](double x, double t) { return 2.0 + std::sin(t) * std::cos(pi * x); };
  Sources src;
  src.g = [&](const std::array<double, 2>& x, double t) {
    return std::cos(pi * x[0]) * (std::cos(t) + K * pi * pi * std::sin(t));
  };
  const int n = m.n_nodes();
  Vec theta(n);
  for (int i = 0; i < n; ++i) theta(i) = exact(m.nodes[i][0], 0.0);
  const Vec zero = Vec::Zero(n);
  const int steps = static_cast<int>(std::llround(T / tau));
  double err = 0.0;
  for (int k = 1; k <= steps; ++k) {
    const StepData d = local_mean(src, m, (k - 1) * tau, k * tau, false);
    HeatInputs in{theta, zero, zero, zero, tau, d.g, zero};
    theta = solve_heat_subsystem(pb, in, 1e6).theta;
    double e2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = theta(i) - exact(m.nodes[i][0], k * tau);
      e2 += m.lumped[i] * e * e;
    }
    err += tau * e2;
  }
  return std::sqrt(err);
}

ManufacturedResult manufactured_heat_study(const std::vector<double>& taus, int tau_nodes,
                                           const std::vector<int>& node_levels, double h_tau, double T, double K) {
  ManufacturedResult r;
  r.taus = taus;
  for (double tau : taus) r.tau_errors.push_back(manufactured_heat_error(tau_nodes, tau, T, K));
  for (int nn : node_levels) {
    r.hs.push_back(1.0 / (nn - 1));
    r.h_errors.push_back(manufactured_heat_error(nn, h_tau, T, K));
  }
  r.tau_order = min_order(r.tau_errors, r.taus);
  r.h_order = min_order(r.h_errors, r.hs);
  return r;
}

StudyTable delta_study(const RunSetup& base, const std::vector<double>& deltas) {
  StudyTable tab;
  tab.name = "delta";
  const Mesh& m = base.pb.mesh;
  auto run_at = [&](double delta, bool& verified) {
    RunSetup s = base;
    s.pb.mp.laplacian_mode = true;
    s.pb.mp.delta = delta;
    Trajectory tr = run_simulation(s.pb, s.init, s.src, s.T, s.tau);
    verified = verify_trajectory(s.pb, tr).pass();
    return tr;
  };
  bool ref_ok = false;
  const Trajectory ref = run_at(0.0, ref_ok);
  const bool chi0_ok = base.init.chi.minCoeff() >= 0.0 && base.init.chi.maxCoeff() <= 1.0;
  bool verified = ref_ok;
  std::vector<double> vs;
  for (double delta : deltas) {
    StudyLevel lv;
    lv.label = "delta";
    lv.parameter = delta;
    Trajectory tr = delta == 0.0 ? ref : run_at(delta, lv.verified);
    if (delta == 0.0) lv.verified = ref_ok;
    verified = verified && lv.verified;
    const double vsup = distance_LinfL2(m, tr, ref, Field::V), vh1 = distance_L2H1(m, tr, ref, Field::V);
    lv.distances = {{"d_v_LinfL2", vsup},
                    {"d_v_L2H1", vh1},
                    {"d_v_strong", vsup + vh1},
                    {"d_theta_L2L2", distance_L2L2(m, tr, ref, Field::Theta)},
                    {"d_u_LinfL2", distance_LinfL2(m, tr, ref, Field::U)},
                    {"d_chi_C0L2", distance_C0L2(m, tr, ref, Field::Chi)}};
    lv.monitors = apriori_monitors(base.pb, tr);
    if (delta > 0.0) vs.push_back(vsup + vh1);
    tab.levels.push_back(lv);
  }
  bool dec = true;
  for (size_t j = 1; j < vs.size(); ++j) dec = dec && vs[j] < vs[j - 1];
  tab.verdicts.push_back({"initial_chi_in_unit_interval", chi0_ok});
  tab.verdicts.push_back({"all_levels_verified", verified});
  tab.verdicts.push_back({"v_strong_decreasing", dec});
  return tab;
}

StudyTable regularization_study(const RunSetup& base, const std::vector<double>& nus, const std::vector<double>& Ms) {
  StudyTable tab;
  tab.name = "regularization";
  const Mesh& m = base.pb.mesh;
  RunSetup rs = base;
  rs.pb.opts.nu = 0.0;
  rs.pb.opts.M0 = 1e3 * (1.0 + base.init.theta.maxCoeff());
  const Trajectory ref = run_simulation(rs.pb, rs.init, rs.src, rs.T, rs.tau);
  bool verified = verify_trajectory(rs.pb, ref).pass();
  auto maxdiff = [&](const Trajectory& a) {
    double d = 0.0;
    if (a.states.size() != ref.states.size()) return std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < a.states.size(); ++k) {
      d = std::max(d, (a.states[k].theta - ref.states[k].theta).lpNorm<Eigen::Infinity>());
      d = std::max(d, (a.states[k].u - ref.states[k].u).lpNorm<Eigen::Infinity>());
      d = std::max(d, (a.states[k].chi - ref.states[k].chi).lpNorm<Eigen::Infinity>());
    }
    return d;
  };
  std::vector<double> dist;
  for (double nu : nus) {
    RunSetup s = rs;
    s.pb.opts.nu = nu;
    const Trajectory tr = run_simulation(s.pb, s.init, s.src, s.T, s.tau);
    StudyLevel lv;
    lv.label = "nu";
    lv.parameter = nu;
    lv.verified = verify_trajectory(s.pb, tr).pass();
    verified = verified && lv.verified;
    double viol = 0.0;
    for (int k = 1; k <= tr.n_steps(); ++k)
      viol = std::max(viol, (tr.states[k].chi - tr.states[k - 1].chi).maxCoeff());
    lv.distances = {{"d_chi_C0L2", distance_C0L2(m, tr, ref, Field::Chi)},
                    {"d_chi_max_nodal", maxdiff(tr)},
                    {"d_irreversibility_violation", viol}};
    dist.push_back(lv.distances[0].second);
    tab.levels.push_back(lv);
  }
  bool dec = true;
  for (size_t j = 1; j < dist.size(); ++j) dec = dec && dist[j] < dist[j - 1];
  tab.verdicts.push_back({"nu_chi_distance_decreasing", dec});
  if (!dist.empty()) tab.verdicts.push_back({"nu_final_distance_below_1e-4", dist.back() < 1e-4});
  bool m_ok = true, doubled = false;
  for (double M0 : Ms) {
    RunSetup s = rs;
    s.pb.opts.M0 = M0;
    const Trajectory tr = run_simulation(s.pb, s.init, s.src, s.T, s.tau);
    StudyLevel lv;
    lv.label = "M";
    lv.parameter = M0;
    lv.verified = verify_trajectory(s.pb, tr).pass();
    verified = verified && lv.verified;
    const double Mfinal = tr.diag.empty() ? M0 : tr.diag.back().M;
    if (Mfinal > M0) doubled = true;
    lv.distances = {{"d_max_nodal", maxdiff(tr)}, {"M_final", Mfinal}};
    m_ok = m_ok && lv.distances[0].second <= 1e-8;
    tab.levels.push_back(lv);
  }
  tab.verdicts.push_back({"all_levels_verified", verified});
  if (!Ms.empty()) {
    tab.verdicts.push_back({"M_runs_match_reference_1e-8", m_ok});
    tab.verdicts.push_back({"M_doubling_exercised", doubled});
  }
  return tab;
}

}  // namespace thermovisc
