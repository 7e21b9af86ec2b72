#include "thermovisc/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

namespace thermovisc {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& s) {
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (trim(s.substr(pos)) != "") throw std::invalid_argument("not a number: " + s);
  return v;
}

int to_int(const std::string& s) {
  const double v = to_double(s);
  if (v != std::floor(v)) throw std::invalid_argument("not an integer: " + s);
  return static_cast<int>(v);
}

bool to_bool(const std::string& s) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw std::invalid_argument("not a boolean: " + s);
}

std::vector<double> to_list(const std::string& s) {
  std::istringstream is(s);
  std::vector<double> v;
  std::string tok;
  while (is >> tok) v.push_back(to_double(tok));
  return v;
}

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string list_str(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + num(v[i]);
  return s;
}

CoefficientKind to_coef(const std::string& s) {
  if (s == "damage") return CoefficientKind::Damage;
  if (s == "phase") return CoefficientKind::PhaseTransition;
  if (s == "quadratic") return CoefficientKind::Quadratic;
  throw std::invalid_argument("unknown coefficient preset: " + s);
}

GammaKind to_gamma(const std::string& s) {
  if (s == "double_well") return GammaKind::DoubleWell;
  if (s == "zero") return GammaKind::Zero;
  if (s == "quadratic") return GammaKind::Quadratic;
  throw std::invalid_argument("unknown gamma preset: " + s);
}

BetaKind to_beta(const std::string& s) {
  if (s == "indicator") return BetaKind::Indicator;
  if (s == "none") return BetaKind::None;
  if (s == "quadratic_penalty") return BetaKind::QuadraticPenalty;
  throw std::invalid_argument("unknown beta preset: " + s);
}

ConductivityKind to_conductivity(const std::string& s) {
  if (s == "power") return ConductivityKind::Power;
  if (s == "constant") return ConductivityKind::Constant;
  throw std::invalid_argument("unknown conductivity: " + s);
}

struct Entry {
  std::string section, key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define TV_NUM(sec, key, field)                                                        \
  Entry {                                                                              \
    sec, key, [](RunConfig& c, const std::string& v) { c.field = to_double(v); },      \
        [](const RunConfig& c) { return num(c.field); }                                \
  }
#define TV_INT(sec, key, field)                                                        \
  Entry {                                                                              \
    sec, key, [](RunConfig& c, const std::string& v) { c.field = to_int(v); },         \
        [](const RunConfig& c) { return std::to_string(c.field); }                     \
  }
#define TV_PRESET(sec, key, field)                                                     \
  Entry {                                                                              \
    sec, key, [](RunConfig& c, const std::string& v) { c.field = parse_preset(v); },   \
        [](const RunConfig& c) { return c.field.str(); }                               \
  }
#define TV_LIST(sec, key, field)                                                       \
  Entry {                                                                              \
    sec, key, [](RunConfig& c, const std::string& v) { c.field = to_list(v); },        \
        [](const RunConfig& c) { return list_str(c.field); }                           \
  }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e = {
      TV_INT("mesh", "dim", mesh.dim),
      TV_NUM("mesh", "x0", mesh.lo[0]),
      TV_NUM("mesh", "x1", mesh.hi[0]),
      TV_NUM("mesh", "y0", mesh.lo[1]),
      TV_NUM("mesh", "y1", mesh.hi[1]),
      TV_INT("mesh", "nx", mesh.res[0]),
      TV_INT("mesh", "ny", mesh.res[1]),
      TV_NUM("material", "kappa", mp.kappa),
      TV_NUM("material", "c0", mp.c0),
      TV_NUM("material", "c1", mp.c1),
      TV_NUM("material", "c2", mp.c2),
      TV_NUM("material", "rho", mp.rho),
      TV_NUM("material", "omega", mp.omega),
      TV_NUM("material", "p", mp.p_exponent),
      TV_NUM("material", "delta", mp.delta),
      TV_NUM("material", "theta_star", mp.theta_star),
      TV_NUM("material", "lame_lambda", mp.elastic.lambda_l),
      TV_NUM("material", "lame_mu", mp.elastic.mu_l),
      Entry{"material", "a", [](RunConfig& c, const std::string& v) { c.mp.a_choice = to_coef(v); },
            [](const RunConfig& c) { return to_string(c.mp.a_choice); }},
      Entry{"material", "b", [](RunConfig& c, const std::string& v) { c.mp.b_choice = to_coef(v); },
            [](const RunConfig& c) { return to_string(c.mp.b_choice); }},
      Entry{"material", "conductivity",
            [](RunConfig& c, const std::string& v) { c.mp.conductivity = to_conductivity(v); },
            [](const RunConfig& c) { return to_string(c.mp.conductivity); }},
      Entry{"potential", "gamma", [](RunConfig& c, const std::string& v) { c.pot.gamma = to_gamma(v); },
            [](const RunConfig& c) { return to_string(c.pot.gamma); }},
      TV_NUM("potential", "gamma_coef", pot.gamma_coef),
      Entry{"potential", "beta", [](RunConfig& c, const std::string& v) { c.pot.beta = to_beta(v); },
            [](const RunConfig& c) { return to_string(c.pot.beta); }},
      TV_NUM("potential", "beta_coef", pot.beta_coef),
      TV_PRESET("initial", "theta0", theta0),
      TV_PRESET("initial", "chi0", chi0),
      TV_PRESET("initial", "u0", u0[0]),
      TV_PRESET("initial", "u0_y", u0[1]),
      TV_PRESET("initial", "v0", v0[0]),
      TV_PRESET("initial", "v0_y", v0[1]),
      TV_PRESET("sources", "f", f[0]),
      TV_PRESET("sources", "f_y", f[1]),
      TV_PRESET("sources", "g", g),
      TV_PRESET("sources", "h", h),
      TV_NUM("time", "T", T),
      TV_NUM("time", "tau", tau),
      TV_NUM("time", "min_tau", opts.min_tau),
      TV_INT("mode", "mu", mp.mu_flag),
      Entry{"mode", "laplacian_mode", [](RunConfig& c, const std::string& v) { c.mp.laplacian_mode = to_bool(v); },
            [](const RunConfig& c) { return std::string(c.mp.laplacian_mode ? "1" : "0"); }},
      TV_NUM("mode", "nu", opts.nu),
      TV_NUM("mode", "nu_reg", opts.nu_reg),
      TV_NUM("mode", "eta_reg", opts.eta_reg),
      TV_NUM("mode", "M0", opts.M0),
      TV_NUM("tolerances", "tol_fp", opts.tol_fp),
      TV_NUM("tolerances", "tol_heat", opts.tol_heat),
      TV_NUM("tolerances", "tol_chi", opts.tol_chi),
      TV_NUM("tolerances", "tol_lin", opts.tol_lin),
      TV_INT("tolerances", "max_outer", opts.max_outer),
      TV_INT("tolerances", "max_newton", opts.max_newton),
      Entry{"output", "dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; },
            [](const RunConfig& c) { return c.output_dir; }},
      TV_INT("output", "snapshot_every", snapshot_every),
      Entry{"study", "kind", [](RunConfig& c, const std::string& v) { c.study.kind = v; },
            [](const RunConfig& c) { return c.study.kind; }},
      TV_INT("study", "levels", study.levels),
      TV_LIST("study", "deltas", study.deltas),
      TV_LIST("study", "nus", study.nus),
      TV_LIST("study", "Ms", study.Ms),
  };
  return e;
}

#undef TV_NUM
#undef TV_INT
#undef TV_PRESET
#undef TV_LIST

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += "\n  " + x;
  return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> v)
    : std::runtime_error("invalid configuration:" + join(v)), violations(std::move(v)) {}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::vector<std::string> errs;
  std::istringstream is(text);
  std::string line, section;
  int ln = 0;
  while (std::getline(is, line)) {
    ++ln;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errs.push_back("line " + std::to_string(ln) + ": malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errs.push_back("line " + std::to_string(ln) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    bool found = false;
    for (const auto& e : entries())
      if (e.section == section && e.key == key) {
        found = true;
        try {
          e.set(c, val);
        } catch (const std::exception& ex) {
          errs.push_back("[" + section + "] " + key + ": " + ex.what());
        }
      }
    if (!found) errs.push_back("unknown key [" + section + "] " + key);
  }
  if (errs.empty()) errs = validate_config(c);
  if (!errs.empty()) throw ConfigError(errs);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_text(const RunConfig& c) {
  std::ostringstream os;
  std::string section;
  for (const auto& e : entries()) {
    if (e.section != section) {
      section = e.section;
      os << (os.tellp() > 0 ? "\n" : "") << '[' << section << "]\n";
    }
    os << e.key << " = " << e.get(c) << '\n';
  }
  return os.str();
}

std::vector<std::string> validate_config(const RunConfig& c) {
  std::vector<std::string> v;
  if (c.mesh.dim != 1 && c.mesh.dim != 2) {
    v.push_back("mesh dimension in {1,2}");
    return v;
  }
  for (int k = 0; k < c.mesh.dim; ++k) {
    if (c.mesh.res[k] < 2) v.push_back("mesh resolution >= 2 nodes per axis");
    if (!(c.mesh.hi[k] > c.mesh.lo[k])) v.push_back("mesh extents nondegenerate");
  }
  const bool mesh_ok = v.empty();
  for (auto& s : validate_material(c.mp, c.pot, c.mesh.dim)) v.push_back(s);
  if (!(c.tau > 0.0)) v.push_back("tau > 0");
  if (!(c.T >= 0.0)) v.push_back("T >= 0");
  if (c.tau > 0.0 && !(1.0 / (2.0 * std::sqrt(c.tau)) > lambda_convexity(c.pot)))
    v.push_back("1/(2 sqrt(tau)) > lambda");
  if (!(c.opts.nu >= 0.0)) v.push_back("nu >= 0");
  if (!(c.opts.nu_reg >= 0.0)) v.push_back("nu_reg >= 0");
  if (c.opts.nu_reg > 0.0 && !(c.opts.eta_reg > 2.0)) v.push_back("eta_reg > 2");
  if (!(c.opts.min_tau > 0.0)) v.push_back("min_tau > 0");
  if (c.snapshot_every < 0) v.push_back("snapshot_every >= 0");
  if (c.study.kind != "tau" && c.study.kind != "delta" && c.study.kind != "regularization")
    v.push_back("study kind in {tau, delta, regularization}");
  if (!mesh_ok) return v;  // data checks need a mesh

  const Mesh m = build_mesh(c.mesh);
  bool th_ok = true, chi_ok = true, chi_dom = true, u_bc = true, g_ok = true, h_ok = true;
  const int nt = 17;
  for (int i = 0; i < m.n_nodes(); ++i) {
    const auto& x = m.nodes[i];
    if (!(c.theta0(x) >= c.mp.theta_star)) th_ok = false;
    const double chi = c.chi0(x);
    if (!(chi >= 0.0 && chi <= 1.0)) chi_ok = false;
    if (!in_beta_domain(chi, c.pot)) chi_dom = false;
    if (m.boundary_node[i])
      for (int k = 0; k < c.mesh.dim; ++k)
        if (c.u0[k](x) != 0.0 || c.v0[k](x) != 0.0) u_bc = false;
    for (int j = 0; j < nt; ++j) {
      const double t = c.T * j / (nt - 1);
      if (!(c.g(x, t) >= 0.0)) g_ok = false;
      if (m.boundary_node[i] && !(c.h(x, t) >= 0.0)) h_ok = false;
    }
  }
  if (!th_ok) v.push_back("theta0 >= theta_star > 0");
  if (!chi_ok) v.push_back("chi0 in [0,1]");
  if (!chi_dom) v.push_back("chi0 in dom beta_hat");
  if (!u_bc) v.push_back("u0 = v0 = 0 on the boundary");
  if (!g_ok) v.push_back("g must be nonnegative");
  if (!h_ok) v.push_back("h must be nonnegative");
  return v;
}

Problem build_problem(const RunConfig& c) {
  Problem pb;
  pb.mesh = build_mesh(c.mesh);
  pb.mp = c.mp;
  pb.pot = c.pot;
  pb.opts = c.opts;
  return pb;
}

State initial_state(const RunConfig& c, const Mesh& m) {
  const int n = m.n_nodes(), d = m.dim;
  Vec th(n), chi(n), u(n * d), v(n * d);
  for (int i = 0; i < n; ++i) {
    const auto& x = m.nodes[i];
    th(i) = c.theta0(x);
    chi(i) = c.chi0(x);
    for (int k = 0; k < d; ++k) {
      u(i * d + k) = m.boundary_node[i] ? 0.0 : c.u0[k](x);
      v(i * d + k) = m.boundary_node[i] ? 0.0 : c.v0[k](x);
    }
  }
  return make_initial_state(m, th, u, v, chi);
}

Sources make_sources(const RunConfig& c) {
  Sources s;
  s.f[0] = c.f[0];
  s.f[1] = c.f[1];
  s.g = c.g;
  s.h = c.h;
  return s;
}

RunSetup make_run_setup(const RunConfig& c) {
  RunSetup r;
  r.pb = build_problem(c);
  r.init = initial_state(c, r.pb.mesh);
  r.src = make_sources(c);
  r.T = c.T;
  r.tau = c.tau;
  return r;
}

std::string resolve_output_dir(const RunConfig& c) {
  if (const char* env = std::getenv("THERMOVISC_OUTPUT_DIR"); env && *env) return env;
  return c.output_dir;
}

}  // namespace thermovisc
