#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include "chi_oracle.hpp"

using namespace thermovisc;

namespace {

double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(1e-14, b.norm());
}

}  // namespace

TEST_CASE("objective matches the independent oracle objective") {
  std::mt19937 rng(1);
  for (int k = 0; k < 20; ++k) {
    const auto inst = oracle::random_instance(rng, 5, k % 2);
    const auto ctx = oracle::context(inst);
    Vec x = oracle::project(inst.chi_prev * 0.9, oracle::lower(inst), oracle::upper(inst));
    CHECK(chi_objective(x, ctx) == doctest::Approx(oracle::objective(inst, x)).epsilon(1e-12));
    CHECK(rel_err(chi_gradient(x, ctx), oracle::gradient(inst, x)) < 1e-10);
  }
}

TEST_CASE("gradient and Hessian match finite differences") {
  std::mt19937 rng(2);
  for (int k = 0; k < 10; ++k) {
    auto inst = oracle::random_instance(rng, 5, 0);
    const auto ctx = oracle::context(inst);
    Vec x = inst.chi_prev.array() + 0.3;  // interior point, objective finite
    const int n = static_cast<int>(x.size());
    Eigen::MatrixXd Hfd(n, n);
    Vec gfd(n);
    const double h = 1e-6;
    for (int j = 0; j < n; ++j) {
      Vec xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      gfd(j) = (chi_objective(xp, ctx) - chi_objective(xm, ctx)) / (2 * h);
      Hfd.col(j) = (chi_gradient(xp, ctx) - chi_gradient(xm, ctx)) / (2 * h);
    }
    CHECK(rel_err(chi_gradient(x, ctx), gfd) < 1e-5);
    CHECK(rel_err(Eigen::MatrixXd(chi_hessian(x, ctx)), Hfd) < 1e-5);
  }
}

TEST_CASE("solver agrees with the projected-gradient oracle on random small instances") {
  std::mt19937 rng(2024);
  int cases = 0;
  double worst = 0.0, worst_compl = 0.0;
  for (int k = 0; k < 60; ++k) {
    const int nodes = 2 + k % 4;  // 2..5 nodes
    const auto inst = oracle::random_instance(rng, nodes, k % 3 == 0 ? 0 : 1);
    const auto ctx = oracle::context(inst);
    const ChiStepResult r = solve_chi_step(ctx);
    const Vec ref = oracle::minimize(inst, oracle::lower(inst), oracle::upper(inst));
    worst = std::max(worst, (r.chi - ref).lpNorm<Eigen::Infinity>());
    worst_compl = std::max(worst_compl, r.xi.cwiseProduct(r.chi).cwiseAbs().maxCoeff());
    CHECK(r.objective <= r.objective_prev + 1e-12 * (1 + std::fabs(r.objective_prev)));
    CHECK(r.xi.maxCoeff() <= 0.0);
    CHECK(r.zeta.minCoeff() >= 0.0);
    CHECK(chi_stationarity_residual(ctx, r.chi, r.xi, r.zeta).lpNorm<Eigen::Infinity>() < 1e-8);
    ++cases;
  }
  CHECK(cases >= 50);
  CHECK(worst <= 1e-6);
  CHECK(worst_compl <= 1e-10);
}

TEST_CASE("irreversible step never increases chi and stays nonnegative") {
  std::mt19937 rng(5);
  for (int k = 0; k < 30; ++k) {
    auto inst = oracle::random_instance(rng, 5, 1);
    inst.theta *= 5.0;  // strong pull upwards
    const auto r = solve_chi_step(oracle::context(inst));
    for (int i = 0; i < r.chi.size(); ++i) {
      CHECK(r.chi(i) <= inst.chi_prev(i));
      CHECK(r.chi(i) >= 0.0);
    }
  }
}

TEST_CASE("zero-temperature pull into the lower bound activates xi") {
  oracle::ChiInstance inst;
  MeshSpec s;
  s.dim = 1;
  s.res = {3, 1};
  inst.mesh = build_mesh(s);
  inst.mp.mu_flag = 0;
  inst.chi_prev = Vec::Constant(3, 0.05);
  inst.theta = Vec::Zero(3);
  inst.e = Vec::Constant(3, 50.0);
  inst.tau = 0.1;
  const auto ctx = oracle::context(inst);
  const auto r = solve_chi_step(ctx);
  CHECK(r.chi.maxCoeff() == 0.0);
  CHECK(r.active_lower == 3);
  CHECK(r.xi.maxCoeff() < 0.0);
  const Vec force = chi_stationarity_residual(ctx, r.chi, Vec::Zero(3), Vec::Zero(3));
  const Vec xi = xi_from_complementarity(r.chi, force, 0.0);
  CHECK((xi - r.xi).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("one-sided variational inequality holds for nonpositive tests") {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> U(-1.0, 0.0);
  for (int k = 0; k < 20; ++k) {
    const auto inst = oracle::random_instance(rng, 5, 1);
    const auto ctx = oracle::context(inst);
    const auto r = solve_chi_step(ctx);
    for (int j = 0; j < 5; ++j) {
      Vec psi(5);
      for (int i = 0; i < 5; ++i) psi(i) = U(rng);
      CHECK(one_sided_vi_residual(ctx, r.chi, r.xi, psi) >= -1e-9);
    }
  }
  const auto inst = oracle::random_instance(rng, 3, 1);
  CHECK_THROWS(one_sided_vi_residual(oracle::context(inst), inst.chi_prev, Vec::Zero(3), Vec::Ones(3)));
}

TEST_CASE("Yosida path relaxes the upper bound and penalizes increases") {
  std::mt19937 rng(12);
  auto inst = oracle::random_instance(rng, 5, 1);
  inst.theta *= 10.0;
  auto ctx = oracle::context(inst);
  ctx.nu = 1e-2;
  CHECK(std::isinf(ctx.upper_bounds()(0)));
  const auto r = solve_chi_step(ctx);
  CHECK(r.zeta.minCoeff() >= 0.0);
  CHECK(chi_stationarity_residual(ctx, r.chi, r.xi, r.zeta).lpNorm<Eigen::Infinity>() < 1e-8);
  // smaller nu tracks the exact constraint more closely
  ctx.nu = 1e-5;
  const auto r2 = solve_chi_step(ctx);
  const auto exact = solve_chi_step(oracle::context(inst));
  CHECK((r2.chi - exact.chi).lpNorm<Eigen::Infinity>() < (r.chi - exact.chi).lpNorm<Eigen::Infinity>());
}

TEST_CASE("context from a displacement uses lumped energy densities") {
  MeshSpec s;
  s.dim = 1;
  s.res = {4, 1};
  const Mesh m = build_mesh(s);
  MaterialParams mp;
  PotentialW pot;
  Vec u(4);
  u << 0.0, 0.1, 0.3, 0.0;
  const auto ctx = make_chi_context(m, mp, pot, Vec::Ones(4), Vec::Ones(4), u, 0.01);
  const Vec D = nodal_energy_weights(m, u, mp.elastic);
  for (int i = 0; i < 4; ++i) CHECK(ctx.elastic_density(i) * m.lumped[i] == doctest::Approx(D(i)));
}
