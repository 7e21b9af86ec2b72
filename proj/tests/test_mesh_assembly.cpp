#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>

#include "thermovisc/assembly.hpp"
#include "thermovisc/mesh.hpp"

using namespace thermovisc;

namespace {

Mesh line(int n) {
  MeshSpec s;
  s.dim = 1;
  s.res = {n, 1};
  return build_mesh(s);
}

Mesh square(int nx, int ny) {
  MeshSpec s;
  s.dim = 2;
  s.res = {nx, ny};
  s.hi = {1.0, 0.5};
  return build_mesh(s);
}

Vec random_vec(int n, std::mt19937& rng, double lo, double hi) {
  std::uniform_real_distribution<double> U(lo, hi);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = U(rng);
  return v;
}

// Central-difference Jacobian of r at x, column by column.
template <class F>
Eigen::MatrixXd fd_jacobian(F r, const Vec& x, double h) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd J(r(x).size(), n);
  for (int j = 0; j < n; ++j) {
    Vec xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    J.col(j) = (r(xp) - r(xm)) / (2 * h);
  }
  return J;
}

double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(1e-14, b.norm());
}

}  // namespace

TEST_CASE("mesh construction and measures") {
  const Mesh m1 = line(5);
  CHECK(m1.n_nodes() == 5);
  CHECK(m1.n_elems() == 4);
  CHECK(m1.volume() == doctest::Approx(1.0));
  CHECK(lumped_mass(m1).sum() == doctest::Approx(1.0));
  CHECK(m1.boundary_node[0]);
  CHECK(m1.boundary_node[4]);
  CHECK_FALSE(m1.boundary_node[2]);

  const Mesh m2 = square(4, 3);
  CHECK(m2.n_nodes() == 12);
  CHECK(m2.n_elems() == 2 * 3 * 2);
  CHECK(m2.volume() == doctest::Approx(0.5));
  CHECK(lumped_mass(m2).sum() == doctest::Approx(0.5));
  double perim = 0.0;
  for (double w : m2.facet_measure) perim += w;
  CHECK(perim == doctest::Approx(3.0));
  CHECK_THROWS(build_mesh(MeshSpec{1, {0, 0}, {1, 1}, {1, 1}}));
  CHECK_THROWS(build_mesh(MeshSpec{3, {0, 0}, {1, 1}, {3, 3}}));
  CHECK_THROWS(build_mesh(MeshSpec{2, {0, 0}, {0, 1}, {3, 3}}));
}

TEST_CASE("mesh text round trip") {
  const Mesh m = square(3, 4);
  std::stringstream ss;
  write_mesh(ss, m);
  const Mesh r = read_mesh(ss);
  REQUIRE(r.n_nodes() == m.n_nodes());
  REQUIRE(r.n_elems() == m.n_elems());
  for (int i = 0; i < m.n_nodes(); ++i) {
    CHECK(r.nodes[i][0] == m.nodes[i][0]);
    CHECK(r.nodes[i][1] == m.nodes[i][1]);
  }
  CHECK(r.facets.size() == m.facets.size());
  CHECK(r.volume() == doctest::Approx(m.volume()));
}

TEST_CASE("1D stiffness matches hand assembly") {
  const int n = 6;
  const Mesh m = line(n);
  const double h = 1.0 / (n - 1);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < n - 1; ++e) {
    K(e, e) += 1 / h;
    K(e + 1, e + 1) += 1 / h;
    K(e, e + 1) -= 1 / h;
    K(e + 1, e) -= 1 / h;
  }
  CHECK((Eigen::MatrixXd(stiffness_matrix(m)) - K).norm() < 1e-12);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < n - 1; ++e) {
    M(e, e) += h / 3;
    M(e + 1, e + 1) += h / 3;
    M(e, e + 1) += h / 6;
    M(e + 1, e) += h / 6;
  }
  CHECK((Eigen::MatrixXd(mass_matrix(m, false)) - M).norm() < 1e-12);
}

TEST_CASE("2D stiffness is an M-matrix with zero row sums") {
  const Mesh m = square(5, 4);
  const Eigen::MatrixXd K(stiffness_matrix(m));
  for (int i = 0; i < K.rows(); ++i) {
    CHECK(std::fabs(K.row(i).sum()) < 1e-12);
    for (int j = 0; j < K.cols(); ++j)
      if (i != j) CHECK(K(i, j) <= 1e-14);
  }
}

TEST_CASE("weighted elastic form: energy identity and coercivity") {
  std::mt19937 rng(3);
  for (int dim : {1, 2}) {
    const Mesh m = dim == 1 ? line(9) : square(5, 4);
    ElasticTensor E{1.3, 0.7};
    const Vec u = random_vec(m.n_nodes() * dim, rng, -1, 1);
    const SpMat K = assemble_weighted_form(m, Vec::Ones(m.n_nodes()), 1.0, E);
    CHECK(u.dot(K * u) == doctest::Approx(nodal_energy_weights(m, u, E).sum()));

    // Korn-type coercivity on Dirichlet dofs, by dense eigensolve.
    std::vector<int> free;
    for (int i = 0; i < m.n_nodes(); ++i)
      if (!m.boundary_node[i])
        for (int k = 0; k < dim; ++k) free.push_back(i * dim + k);
    const Eigen::MatrixXd Kd(K);
    Eigen::MatrixXd Kf(free.size(), free.size());
    for (size_t a = 0; a < free.size(); ++a)
      for (size_t b = 0; b < free.size(); ++b) Kf(a, b) = Kd(free[a], free[b]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kf);
    CHECK(es.eigenvalues().minCoeff() > 1e-8);
    CHECK((Kf - Kf.transpose()).norm() < 1e-12);

    Vec eta = Vec::Ones(m.n_nodes());
    eta(0) = -0.1;
    CHECK_THROWS_AS(assemble_weighted_form(m, eta, 1.0, E), std::invalid_argument);
  }
}

TEST_CASE("coupling term vanishes for constant temperature and Dirichlet velocities") {
  std::mt19937 rng(5);
  for (int dim : {1, 2}) {
    const Mesh m = dim == 1 ? line(9) : square(5, 4);
    Vec v = random_vec(m.n_nodes() * dim, rng, -1, 1);
    for (int i = 0; i < m.n_nodes(); ++i)
      if (m.boundary_node[i])
        for (int k = 0; k < dim; ++k) v(i * dim + k) = 0.0;
    const Vec F = assemble_coupling(m, Vec::Constant(m.n_nodes(), 2.0), 0.5);
    CHECK(std::fabs(F.dot(v)) < 1e-12);
    // consistency with the lumped divergence: F.v = -rho sum m_i theta dv_i for constant theta
    const Vec dv = lumped_divergence(m, v);
    CHECK(lumped_mass(m).dot(dv) == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("viscous source is nonnegative and integrates to the viscous power") {
  std::mt19937 rng(9);
  const Mesh m = square(4, 4);
  ElasticTensor E;
  const Vec w = random_vec(m.n_nodes() * 2, rng, -1, 1);
  const Vec a = Vec::Constant(m.n_nodes(), 0.4);
  const Vec s = viscous_source_density(m, a, 2.0, E, w);
  CHECK(s.minCoeff() >= 0.0);
  const SpMat V = assemble_weighted_form(m, a, 2.0, E);
  CHECK(lumped_mass(m).dot(s) == doctest::Approx(w.dot(V * w)));
}

TEST_CASE("heat operator annihilates constants and its Jacobian matches finite differences") {
  std::mt19937 rng(13);
  for (int dim : {1, 2}) {
    const Mesh m = dim == 1 ? line(8) : square(4, 4);
    MaterialParams mp;
    mp.kappa = 2.5;
    CHECK(heat_flux_operator(m, Vec::Constant(m.n_nodes(), 1.7), 10.0, mp).cwiseAbs().maxCoeff() < 1e-12);
    for (int trial = 0; trial < 5; ++trial) {
      const Vec th = random_vec(m.n_nodes(), rng, 0.2, 2.0);
      const Vec h = random_vec(m.n_nodes(), rng, 0.0, 1.0);
      const double M = 1.5;  // some nodes above M exercise the truncation branch
      auto r = [&](const Vec& x) { return assemble_heat_residual(m, x, M, h, mp).residual; };
      const Eigen::MatrixXd J(assemble_heat_residual(m, th, M, h, mp).jacobian);
      CHECK(rel_err(J, fd_jacobian(r, th, 1e-6)) < 1e-5);
    }
  }
}

TEST_CASE("p-Laplacian residual is the energy gradient and its Jacobian matches finite differences") {
  std::mt19937 rng(17);
  for (int dim : {1, 2}) {
    const Mesh m = dim == 1 ? line(8) : square(4, 4);
    for (bool lap : {false, true}) {
      GradFlowParams gp;
      gp.p = 3.0;
      gp.delta = 0.3;
      gp.laplacian_mode = lap;
      for (int trial = 0; trial < 4; ++trial) {
        const Vec chi = random_vec(m.n_nodes(), rng, 0.0, 1.0);
        auto E = [&](const Vec& x) {
          Vec r(1);
          r(0) = gradient_energy(m, x, gp);
          return r;
        };
        const Eigen::MatrixXd gfd = fd_jacobian(E, chi, 1e-6).transpose();
        CHECK(rel_err(gradient_flow_residual(m, chi, gp), gfd) < 1e-5);
        auto r = [&](const Vec& x) { return gradient_flow_residual(m, x, gp); };
        const Eigen::MatrixXd J(gradient_flow_jacobian(m, chi, gp));
        CHECK(rel_err(J, fd_jacobian(r, chi, 1e-6)) < 1e-5);
      }
    }
  }
}

TEST_CASE("strain power regularization derivatives") {
  std::mt19937 rng(19);
  const Mesh m = square(4, 3);
  const Vec u = random_vec(m.n_nodes() * 2, rng, -1, 1);
  auto E = [&](const Vec& x) {
    Vec r(1);
    r(0) = strain_power_energy(m, x, 0.2, 4.0);
    return r;
  };
  CHECK(rel_err(strain_power_residual(m, u, 0.2, 4.0), fd_jacobian(E, u, 1e-6).transpose()) < 1e-5);
  auto r = [&](const Vec& x) { return strain_power_residual(m, x, 0.2, 4.0); };
  CHECK(rel_err(Eigen::MatrixXd(strain_power_jacobian(m, u, 0.2, 4.0)), fd_jacobian(r, u, 1e-6)) < 1e-5);
}

TEST_CASE("boundary flux load uses boundary weights only") {
  const Mesh m = line(5);
  const Vec H = boundary_flux_load(m, Vec::Ones(5));
  CHECK(H(0) == doctest::Approx(1.0));
  CHECK(H(4) == doctest::Approx(1.0));
  CHECK(H(2) == 0.0);
  const Mesh s = square(3, 3);
  CHECK(boundary_flux_load(s, Vec::Ones(s.n_nodes())).sum() == doctest::Approx(3.0));
}
