#include "thermovisc/assembly.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace thermovisc {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SpMat from_triplets(int n, const Triplets& t) {
  SpMat A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  return A;
}

// Strain-displacement matrix for one element: Voigt rows (xx, yy, 2xy), columns = local dofs.
Eigen::Matrix<double, 3, 6> strain_matrix(const Mesh& m, int e) {
  Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
  const auto& g = m.grad[e];
  if (m.dim == 1) {
    B(0, 0) = g[0][0];
    B(0, 1) = g[1][0];
    return B;
  }
  for (int a = 0; a < 3; ++a) {
    B(0, 2 * a) = g[a][0];
    B(1, 2 * a + 1) = g[a][1];
    B(2, 2 * a) = g[a][1];
    B(2, 2 * a + 1) = g[a][0];
  }
  return B;
}

Eigen::Matrix3d elastic_matrix(const ElasticTensor& E, int dim) {
  Eigen::Matrix3d D = Eigen::Matrix3d::Zero();
  if (dim == 1) {
    D(0, 0) = E.lambda_l + 2.0 * E.mu_l;
    return D;
  }
  D << E.lambda_l + 2.0 * E.mu_l, E.lambda_l, 0.0,
       E.lambda_l, E.lambda_l + 2.0 * E.mu_l, 0.0,
       0.0, 0.0, E.mu_l;
  return D;
}

int local_dofs(const Mesh& m) { return (m.dim + 1) * m.dim; }

int global_dof(const Mesh& m, int e, int l) {
  const int a = l / m.dim, c = l % m.dim;
  return m.elems[e][a] * m.dim + c;
}

Eigen::Matrix<double, 6, 1> gather(const Mesh& m, int e, const Vec& u) {
  Eigen::Matrix<double, 6, 1> ue = Eigen::Matrix<double, 6, 1>::Zero();
  for (int l = 0; l < local_dofs(m); ++l) ue(l) = u(global_dof(m, e, l));
  return ue;
}

struct QuadRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> w;  // sums to 1
};

const QuadRule& heat_rule(int dim) {
  static const QuadRule r1 = [] {
    QuadRule q;
    const double s = 0.5 * std::sqrt(0.6);
    q.bary = {{0.5 - s, 0.5 + s, 0.0}, {0.5, 0.5, 0.0}, {0.5 + s, 0.5 - s, 0.0}};
    q.w = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    return q;
  }();
  static const QuadRule r2 = [] {
    QuadRule q;
    const double a1 = 0.445948490915965, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, w2 = 0.109951743655322;
    for (auto [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
      const double b = 1.0 - 2.0 * a;
      q.bary.push_back({a, a, b});
      q.bary.push_back({a, b, a});
      q.bary.push_back({b, a, a});
      for (int k = 0; k < 3; ++k) q.w.push_back(w);
    }
    return q;
  }();
  return dim == 1 ? r1 : r2;
}

std::array<double, 2> scalar_gradient(const Mesh& m, int e, const Vec& f) {
  std::array<double, 2> g{0.0, 0.0};
  for (int a = 0; a <= m.dim; ++a)
    for (int k = 0; k < m.dim; ++k) g[k] += f(m.elems[e][a]) * m.grad[e][a][k];
  return g;
}

double dot(const std::array<double, 2>& a, const std::array<double, 2>& b) { return a[0] * b[0] + a[1] * b[1]; }

}  // namespace

Vec lumped_mass(const Mesh& m) { return Eigen::Map<const Vec>(m.lumped.data(), m.n_nodes()); }

SpMat mass_matrix(const Mesh& m, bool lumped) {
  Triplets t;
  const int nv = m.dim + 1;
  for (int e = 0; e < m.n_elems(); ++e) {
    for (int a = 0; a < nv; ++a)
      for (int b = 0; b < nv; ++b) {
        double v;
        if (lumped) v = (a == b) ? m.measure[e] / nv : 0.0;
        else v = m.measure[e] * (a == b ? 2.0 : 1.0) / ((nv) * (nv + 1));
        if (v != 0.0) t.emplace_back(m.elems[e][a], m.elems[e][b], v);
      }
  }
  return from_triplets(m.n_nodes(), t);
}

SpMat stiffness_matrix(const Mesh& m) {
  Triplets t;
  for (int e = 0; e < m.n_elems(); ++e)
    for (int a = 0; a <= m.dim; ++a)
      for (int b = 0; b <= m.dim; ++b)
        t.emplace_back(m.elems[e][a], m.elems[e][b], m.measure[e] * dot(m.grad[e][a], m.grad[e][b]));
  return from_triplets(m.n_nodes(), t);
}

Eigen::Vector3d element_strain(const Mesh& m, int e, const Vec& u) {
  return strain_matrix(m, e) * gather(m, e, u);
}

double strain_energy_density(const Eigen::Vector3d& eps, const ElasticTensor& E, int dim) {
  return eps.dot(elastic_matrix(E, dim) * eps);
}

double element_divergence(const Mesh& m, int e, const Vec& u) {
  const Eigen::Vector3d eps = element_strain(m, e, u);
  return m.dim == 1 ? eps(0) : eps(0) + eps(1);
}

SpMat assemble_weighted_form(const Mesh& m, const Vec& eta, double scale, const ElasticTensor& E) {
  for (int i = 0; i < eta.size(); ++i)
    if (eta(i) < 0.0) throw std::invalid_argument("assemble_weighted_form: negative weight breaks coercivity");
  const Eigen::Matrix3d D = elastic_matrix(E, m.dim);
  const Vec etaT = element_average(m, eta);
  const int nl = local_dofs(m);
  Triplets t;
  for (int e = 0; e < m.n_elems(); ++e) {
    const auto B = strain_matrix(m, e);
    const Eigen::Matrix<double, 6, 6> K = B.transpose() * D * B * (m.measure[e] * etaT(e) * scale);
    for (int a = 0; a < nl; ++a)
      for (int b = 0; b < nl; ++b) t.emplace_back(global_dof(m, e, a), global_dof(m, e, b), K(a, b));
  }
  return from_triplets(m.n_nodes() * m.dim, t);
}

Vec nodal_energy_weights(const Mesh& m, const Vec& u, const ElasticTensor& E) {
  Vec D = Vec::Zero(m.n_nodes());
  for (int e = 0; e < m.n_elems(); ++e) {
    const double dens = strain_energy_density(element_strain(m, e, u), E, m.dim);
    for (int a = 0; a <= m.dim; ++a) D(m.elems[e][a]) += m.measure[e] / (m.dim + 1) * dens;
  }
  return D;
}

Vec element_average(const Mesh& m, const Vec& nodal) {
  Vec r(m.n_elems());
  for (int e = 0; e < m.n_elems(); ++e) {
    double s = 0.0;
    for (int a = 0; a <= m.dim; ++a) s += nodal(m.elems[e][a]);
    r(e) = s / (m.dim + 1);
  }
  return r;
}

Vec assemble_coupling(const Mesh& m, const Vec& theta, double rho) {
  Vec F = Vec::Zero(m.n_nodes() * m.dim);
  if (rho == 0.0) return F;
  const Vec thT = element_average(m, theta);
  for (int e = 0; e < m.n_elems(); ++e) {
    const double c = -rho * m.measure[e] * thT(e);
    for (int a = 0; a <= m.dim; ++a)
      for (int k = 0; k < m.dim; ++k) F(m.elems[e][a] * m.dim + k) += c * m.grad[e][a][k];
  }
  return F;
}

Vec lumped_divergence(const Mesh& m, const Vec& v) {
  Vec dv = Vec::Zero(m.n_nodes());
  for (int e = 0; e < m.n_elems(); ++e) {
    const double d = element_divergence(m, e, v);
    for (int a = 0; a <= m.dim; ++a) dv(m.elems[e][a]) += m.measure[e] / (m.dim + 1) * d;
  }
  for (int i = 0; i < m.n_nodes(); ++i) dv(i) /= m.lumped[i];
  return dv;
}

Vec viscous_source_density(const Mesh& m, const Vec& a_nodal, double omega, const ElasticTensor& E,
                           const Vec& w) {
  const Vec aT = element_average(m, a_nodal);
  Vec s = Vec::Zero(m.n_nodes());
  for (int e = 0; e < m.n_elems(); ++e) {
    const double dens = aT(e) * omega * strain_energy_density(element_strain(m, e, w), E, m.dim);
    for (int a = 0; a <= m.dim; ++a) s(m.elems[e][a]) += m.measure[e] / (m.dim + 1) * dens;
  }
  for (int i = 0; i < m.n_nodes(); ++i) s(i) /= m.lumped[i];
  return s;
}

Vec body_force_load(const Mesh& m, const Vec& f) {
  Vec F(f.size());
  for (int i = 0; i < m.n_nodes(); ++i)
    for (int k = 0; k < m.dim; ++k) F(i * m.dim + k) = m.lumped[i] * f(i * m.dim + k);
  return F;
}

Vec boundary_flux_load(const Mesh& m, const Vec& h_nodal) {
  Vec H = Vec::Zero(m.n_nodes());
  for (int i = 0; i < m.n_nodes(); ++i) H(i) = m.boundary_weight[i] * h_nodal(i);
  return H;
}

Vec heat_flux_operator(const Mesh& m, const Vec& theta, double M, const MaterialParams& mp) {
  const QuadRule& q = heat_rule(m.dim);
  Vec A = Vec::Zero(m.n_nodes());
  for (int e = 0; e < m.n_elems(); ++e) {
    const auto& el = m.elems[e];
    double kbar = 0.0;
    for (size_t iq = 0; iq < q.w.size(); ++iq) {
      double th = 0.0;
      for (int a = 0; a <= m.dim; ++a) th += q.bary[iq][a] * theta(el[a]);
      kbar += q.w[iq] * truncate_conductivity(th, M, mp);
    }
    kbar *= m.measure[e];
    const auto gth = scalar_gradient(m, e, theta);
    for (int a = 0; a <= m.dim; ++a) A(el[a]) += kbar * dot(gth, m.grad[e][a]);
  }
  return A;
}

SpMat heat_flux_jacobian(const Mesh& m, const Vec& theta, double M, const MaterialParams& mp) {
  const QuadRule& q = heat_rule(m.dim);
  Triplets t;
  for (int e = 0; e < m.n_elems(); ++e) {
    const auto& el = m.elems[e];
    double kbar = 0.0;
    std::array<double, 3> dk{0.0, 0.0, 0.0};
    for (size_t iq = 0; iq < q.w.size(); ++iq) {
      double th = 0.0;
      for (int a = 0; a <= m.dim; ++a) th += q.bary[iq][a] * theta(el[a]);
      kbar += q.w[iq] * truncate_conductivity(th, M, mp);
      const double kp = truncate_conductivity_derivative(th, M, mp);
      for (int b = 0; b <= m.dim; ++b) dk[b] += q.w[iq] * kp * q.bary[iq][b];
    }
    kbar *= m.measure[e];
    const auto gth = scalar_gradient(m, e, theta);
    for (int a = 0; a <= m.dim; ++a) {
      const double ga = dot(gth, m.grad[e][a]);
      for (int b = 0; b <= m.dim; ++b) {
        const double v = m.measure[e] * dk[b] * ga + kbar * dot(m.grad[e][b], m.grad[e][a]);
        t.emplace_back(el[a], el[b], v);
      }
    }
  }
  return from_triplets(m.n_nodes(), t);
}

HeatResidual assemble_heat_residual(const Mesh& m, const Vec& theta, double M, const Vec& h_nodal,
                                    const MaterialParams& mp) {
  HeatResidual r;
  r.residual = heat_flux_operator(m, theta, M, mp) - boundary_flux_load(m, h_nodal);
  r.jacobian = heat_flux_jacobian(m, theta, M, mp);
  return r;
}

GradFlowParams grad_flow_params(const MaterialParams& mp) {
  GradFlowParams g;
  g.p = mp.p_exponent;
  g.delta = mp.delta;
  g.laplacian_mode = mp.laplacian_mode;
  return g;
}

namespace {

// Energy density Phi(s) with s = |grad chi|^2, and phi(s) = 2 Phi'(s), phi'(s).
double gf_density(double s, const GradFlowParams& gp) {
  const double pw = std::pow(s, 0.5 * gp.p) / gp.p;
  return gp.laplacian_mode ? 0.5 * s + gp.delta * pw : pw;
}

double gf_phi(double s, const GradFlowParams& gp) {
  const double pw = (gp.p == 2.0) ? 1.0 : std::pow(s, 0.5 * (gp.p - 2.0));
  return gp.laplacian_mode ? 1.0 + gp.delta * pw : pw;
}

double gf_phi_prime(double s, const GradFlowParams& gp) {
  if (gp.p == 2.0) return 0.0;
  const double d = 0.5 * (gp.p - 2.0) * std::pow(s, 0.5 * (gp.p - 4.0));
  return gp.laplacian_mode ? gp.delta * d : d;
}

}  // namespace

double gradient_energy(const Mesh& m, const Vec& chi, const GradFlowParams& gp) {
  double E = 0.0;
  for (int e = 0; e < m.n_elems(); ++e) {
    const auto g = scalar_gradient(m, e, chi);
    E += m.measure[e] * gf_density(dot(g, g), gp);
  }
  return E;
}

Vec gradient_flow_residual(const Mesh& m, const Vec& chi, const GradFlowParams& gp) {
  Vec r = Vec::Zero(m.n_nodes());
  for (int e = 0; e < m.n_elems(); ++e) {
    const auto g = scalar_gradient(m, e, chi);
    const double s = dot(g, g);
    const double c = m.measure[e] * gf_phi(s, gp);
    for (int a = 0; a <= m.dim; ++a) r(m.elems[e][a]) += c * dot(g, m.grad[e][a]);
  }
  return r;
}

SpMat gradient_flow_jacobian(const Mesh& m, const Vec& chi, const GradFlowParams& gp) {
  Triplets t;
  for (int e = 0; e < m.n_elems(); ++e) {
    const auto g = scalar_gradient(m, e, chi);
    const double s = dot(g, g) + gp.eps_reg;
    const double ph = gf_phi(s, gp), php = gf_phi_prime(s, gp);
    for (int a = 0; a <= m.dim; ++a) {
      const double ga = dot(g, m.grad[e][a]);
      for (int b = 0; b <= m.dim; ++b) {
        const double gb = dot(g, m.grad[e][b]);
        const double v = m.measure[e] * (ph * dot(m.grad[e][a], m.grad[e][b]) + 2.0 * php * ga * gb);
        t.emplace_back(m.elems[e][a], m.elems[e][b], v);
      }
    }
  }
  return from_triplets(m.n_nodes(), t);
}

namespace {

Eigen::Vector3d frobenius_weights(int dim) {
  return dim == 1 ? Eigen::Vector3d(1.0, 0.0, 0.0) : Eigen::Vector3d(1.0, 1.0, 0.5);
}

}  // namespace

double strain_power_energy(const Mesh& m, const Vec& u, double nu, double eta) {
  if (nu == 0.0) return 0.0;
  const Eigen::Vector3d W = frobenius_weights(m.dim);
  double E = 0.0;
  for (int e = 0; e < m.n_elems(); ++e) {
    const Eigen::Vector3d eps = element_strain(m, e, u);
    const double s = eps.dot(W.asDiagonal() * eps);
    E += m.measure[e] * nu / eta * std::pow(s, 0.5 * eta);
  }
  return E;
}

Vec strain_power_residual(const Mesh& m, const Vec& u, double nu, double eta) {
  Vec r = Vec::Zero(u.size());
  if (nu == 0.0) return r;
  const Eigen::Vector3d W = frobenius_weights(m.dim);
  for (int e = 0; e < m.n_elems(); ++e) {
    const auto B = strain_matrix(m, e);
    const Eigen::Vector3d eps = B * gather(m, e, u);
    const double s = eps.dot(W.asDiagonal() * eps);
    const Eigen::Matrix<double, 6, 1> re =
        B.transpose() * (W.asDiagonal() * eps) * (m.measure[e] * nu * std::pow(s, 0.5 * (eta - 2.0)));
    for (int l = 0; l < local_dofs(m); ++l) r(global_dof(m, e, l)) += re(l);
  }
  return r;
}

SpMat strain_power_jacobian(const Mesh& m, const Vec& u, double nu, double eta) {
  Triplets t;
  const int n = static_cast<int>(u.size());
  if (nu == 0.0) return from_triplets(n, t);
  const Eigen::Vector3d W = frobenius_weights(m.dim);
  for (int e = 0; e < m.n_elems(); ++e) {
    const auto B = strain_matrix(m, e);
    const Eigen::Vector3d eps = B * gather(m, e, u);
    const double s = eps.dot(W.asDiagonal() * eps) + 1e-12;
    const Eigen::Matrix<double, 6, 1> q = B.transpose() * (W.asDiagonal() * eps);
    const Eigen::Matrix<double, 6, 6> K =
        m.measure[e] * nu *
        (std::pow(s, 0.5 * (eta - 2.0)) * (B.transpose() * W.asDiagonal() * B) +
         (eta - 2.0) * std::pow(s, 0.5 * (eta - 4.0)) * q * q.transpose());
    for (int a = 0; a < local_dofs(m); ++a)
      for (int b = 0; b < local_dofs(m); ++b) t.emplace_back(global_dof(m, e, a), global_dof(m, e, b), K(a, b));
  }
  return from_triplets(n, t);
}

}  // namespace thermovisc
