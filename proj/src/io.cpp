#include "thermovisc/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace thermovisc {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << std::setprecision(17);
  return f;
}

void write_vec(std::ostream& os, const char* tag, const Vec& v) {
  os << tag << ' ' << v.size();
  for (Eigen::Index i = 0; i < v.size(); ++i) os << ' ' << v(i);
  os << '\n';
}

Vec read_vec(std::istream& is, const char* tag) {
  std::string t;
  long n = 0;
  if (!(is >> t >> n) || t != tag || n < 0) throw std::runtime_error(std::string("trajectory: expected ") + tag);
  Vec v(n);
  for (long i = 0; i < n; ++i)
    if (!(is >> v(i))) throw std::runtime_error(std::string("trajectory: truncated ") + tag);
  return v;
}

void expect(std::istream& is, const std::string& word) {
  std::string t;
  if (!(is >> t) || t != word) throw std::runtime_error("trajectory: expected " + word + ", got '" + t + "'");
}

}  // namespace

void write_trajectory(const std::string& path, const RunConfig& c, const Trajectory& tr) {
  auto f = open_out(path);
  const std::string cfg = config_to_text(c);
  int lines = 0;
  for (char ch : cfg) lines += ch == '\n';
  f << "TRAJECTORY v1\nCONFIG " << lines << '\n' << cfg;
  f << "STEPS " << tr.n_steps() << '\n';
  for (const auto& s : tr.states) {
    f << "STATE " << s.t << '\n';
    write_vec(f, "theta", s.theta);
    write_vec(f, "u", s.u);
    write_vec(f, "v", s.v);
    write_vec(f, "chi", s.chi);
    write_vec(f, "xi", s.xi);
    write_vec(f, "zeta", s.zeta);
  }
  for (int k = 0; k < tr.n_steps(); ++k) {
    const auto& d = tr.data[k];
    const auto& g = tr.diag[k];
    f << "STEP\n";
    write_vec(f, "f", d.f);
    write_vec(f, "g", d.g);
    write_vec(f, "h", d.h);
    f << "diag " << g.tau << ' ' << g.outer_iterations << ' ' << g.chi_iterations << ' ' << g.heat_iterations << ' '
      << g.halvings << ' ' << g.M << ' ' << g.fp_increment << ' ' << g.chi_objective_prev << ' ' << g.chi_objective
      << ' ' << g.heat_residual << ' ' << g.chi_residual << '\n';
  }
  f << "END\n";
}

StoredRun read_trajectory(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open trajectory file: " + path);
  std::string line;
  std::getline(f, line);
  if (line != "TRAJECTORY v1") throw std::runtime_error("not a trajectory file: " + path);
  expect(f, "CONFIG");
  int lines = 0;
  f >> lines;
  std::getline(f, line);
  std::string cfg;
  for (int i = 0; i < lines && std::getline(f, line); ++i) cfg += line + '\n';
  StoredRun r;
  r.config = parse_config(cfg);
  expect(f, "STEPS");
  int K = 0;
  if (!(f >> K) || K < 0) throw std::runtime_error("trajectory: bad step count");
  r.trajectory.states.resize(K + 1);
  for (auto& s : r.trajectory.states) {
    expect(f, "STATE");
    f >> s.t;
    s.theta = read_vec(f, "theta");
    s.u = read_vec(f, "u");
    s.v = read_vec(f, "v");
    s.chi = read_vec(f, "chi");
    s.xi = read_vec(f, "xi");
    s.zeta = read_vec(f, "zeta");
  }
  r.trajectory.data.resize(K);
  r.trajectory.diag.resize(K);
  for (int k = 0; k < K; ++k) {
    expect(f, "STEP");
    auto& d = r.trajectory.data[k];
    d.f = read_vec(f, "f");
    d.g = read_vec(f, "g");
    d.h = read_vec(f, "h");
    expect(f, "diag");
    auto& g = r.trajectory.diag[k];
    if (!(f >> g.tau >> g.outer_iterations >> g.chi_iterations >> g.heat_iterations >> g.halvings >> g.M >>
          g.fp_increment >> g.chi_objective_prev >> g.chi_objective >> g.heat_residual >> g.chi_residual))
      throw std::runtime_error("trajectory: truncated diagnostics");
  }
  expect(f, "END");
  const Problem pb = build_problem(r.config);
  const long n = pb.mesh.n_nodes(), nd = n * pb.mesh.dim;
  for (const auto& s : r.trajectory.states)
    if (s.theta.size() != n || s.chi.size() != n || s.u.size() != nd || s.v.size() != nd)
      throw std::runtime_error("trajectory: state size does not match the mesh");
  return r;
}

void write_timeseries(const std::string& path, const Problem& pb, const Trajectory& tr) {
  auto f = open_out(path);
  f << "# t tau energy theta_min theta_max chi_min chi_max outer chi_iter heat_iter halvings M\n";
  for (int k = 0; k < static_cast<int>(tr.states.size()); ++k) {
    const auto& s = tr.states[k];
    const StepDiagnostics d = k > 0 ? tr.diag[k - 1] : StepDiagnostics{};
    f << s.t << ' ' << d.tau << ' ' << total_energy(pb, s) << ' ' << s.theta.minCoeff() << ' '
      << s.theta.maxCoeff() << ' ' << s.chi.minCoeff() << ' ' << s.chi.maxCoeff() << ' ' << d.outer_iterations
      << ' ' << d.chi_iterations << ' ' << d.heat_iterations << ' ' << d.halvings << ' ' << d.M << '\n';
  }
}

std::pair<std::vector<std::string>, std::vector<TimeseriesRow>> read_timeseries(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> names;
  std::vector<TimeseriesRow> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    if (line[0] == '#') {
      std::string w;
      is >> w;
      while (is >> w) names.push_back(w);
      continue;
    }
    TimeseriesRow r;
    double x;
    while (is >> x) r.values.push_back(x);
    rows.push_back(std::move(r));
  }
  return {names, rows};
}

void write_snapshot(const std::string& path, const Mesh& m, const State& s) {
  auto f = open_out(path);
  const int d = m.dim;
  f << "# t = " << s.t << "\n# node x" << (d == 2 ? " y" : "") << " theta";
  for (int k = 0; k < d; ++k) f << " u" << k;
  for (int k = 0; k < d; ++k) f << " v" << k;
  f << " chi xi\n";
  for (int i = 0; i < m.n_nodes(); ++i) {
    f << i << ' ' << m.nodes[i][0];
    if (d == 2) f << ' ' << m.nodes[i][1];
    f << ' ' << s.theta(i);
    for (int k = 0; k < d; ++k) f << ' ' << s.u(i * d + k);
    for (int k = 0; k < d; ++k) f << ' ' << s.v(i * d + k);
    f << ' ' << s.chi(i) << ' ' << (s.xi.size() > i ? s.xi(i) : 0.0) << '\n';
  }
}

void write_report(const std::string& dir, const VerificationReport& rep) {
  std::filesystem::create_directories(dir);
  auto t = open_out(dir + "/report.txt");
  t << rep.table();
  auto kv = open_out(dir + "/report.kv");
  kv << rep.key_values();
}

void write_outputs(const std::string& dir, const RunConfig& c, const Problem& pb, const Trajectory& tr,
                   const VerificationReport& rep) {
  std::filesystem::create_directories(dir);
  write_timeseries(dir + "/timeseries.dat", pb, tr);
  const int K = static_cast<int>(tr.states.size()) - 1;
  for (int k = 0; k <= K; ++k)
    if (k == K || (c.snapshot_every > 0 && k % c.snapshot_every == 0)) {
      char name[32];
      std::snprintf(name, sizeof name, "/snapshot_%06d.dat", k);
      write_snapshot(dir + name, pb.mesh, tr.states[k]);
    }
  write_trajectory(dir + "/trajectory.txt", c, tr);
  auto cf = open_out(dir + "/config.ini");
  cf << config_to_text(c);
  write_report(dir, rep);
}

}  // namespace thermovisc
