#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "convhash/common.hpp"
#include "convhash/simplex.hpp"
#include "support.hpp"

using namespace convhash;

namespace {

Eigen::VectorXd dense_solution(const SimplexFit& fit, Eigen::Index n) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < fit.support.size(); ++i)
    y(fit.support[i]) = fit.coeffs(static_cast<Eigen::Index>(i));
  return y;
}

double objective(const Eigen::MatrixXd& D, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return (x - D * y).squaredNorm();
}

}  // namespace

TEST_CASE("solution is always a simplex point") {
  std::mt19937_64 rng(21);
  GaussianSource gauss(77);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index K = 6, n = 10;
    Eigen::MatrixXd D(K, n);
    Eigen::VectorXd x(K);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < K; ++i) D(i, j) = gauss.next();
    for (Eigen::Index i = 0; i < K; ++i) x(i) = gauss.next();

    const SimplexFit fit = simplex_ls_dense(D, x);
    const Eigen::VectorXd y = dense_solution(fit, n);
    CHECK(y.minCoeff() >= 0.0);
    CHECK(std::abs(y.sum() - 1.0) <= 1e-9);
    for (std::size_t i = 1; i < fit.support.size(); ++i)
      CHECK(fit.support[i - 1] < fit.support[i]);
  }
}

TEST_CASE("recovers a vertex when the target is an atom") {
  GaussianSource gauss(3);
  const Eigen::Index K = 8, n = 12;
  Eigen::MatrixXd D(K, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < K; ++i) D(i, j) = gauss.next();
  for (Eigen::Index j = 0; j < n; ++j) {
    const SimplexFit fit = simplex_ls_dense(D, D.col(j));
    const Eigen::VectorXd y = dense_solution(fit, n);
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(n);
    expected(j) = 1.0;
    CHECK((y - expected).lpNorm<Eigen::Infinity>() <= 1e-4);
  }
}

TEST_CASE("matches barycentric coordinates inside a triangle") {
  std::mt19937_64 rng(31);
  GaussianSource gauss(13);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd V(7, 3);
    for (Eigen::Index j = 0; j < 3; ++j)
      for (Eigen::Index i = 0; i < 7; ++i) V(i, j) = gauss.next();
    const Eigen::VectorXd w = test_support::random_simplex_point(rng, 3);
    const Eigen::VectorXd x = V * w;

    const SimplexFit fit = simplex_ls_dense(V, x);
    const Eigen::VectorXd y = dense_solution(fit, 3);
    const Eigen::Vector3d oracle = test_support::barycentric_coordinates(x, V);
    CHECK((y - oracle).lpNorm<Eigen::Infinity>() <= 1e-4);
  }
}

TEST_CASE("objective beats every simplex grid point") {
  std::mt19937_64 rng(41);
  GaussianSource gauss(19);
  const auto grid = test_support::simplex_grid(5, 50);
  const Eigen::Index K = 6;
  Eigen::MatrixXd D(K, 5);
  for (Eigen::Index j = 0; j < 5; ++j)
    for (Eigen::Index i = 0; i < K; ++i) D(i, j) = gauss.next();

  for (int trial = 0; trial < 25; ++trial) {
    Eigen::VectorXd x(K);
    for (Eigen::Index i = 0; i < K; ++i) x(i) = gauss.next();
    const SimplexFit fit = simplex_ls_dense(D, x);
    const double got = objective(D, x, dense_solution(fit, 5));
    double best_grid = std::numeric_limits<double>::infinity();
    for (const auto& y : grid) best_grid = std::min(best_grid, objective(D, x, y));
    CHECK(got <= best_grid + 1e-9);
  }
}

TEST_CASE("KKT conditions hold at the reported solution") {
  GaussianSource gauss(23);
  const Eigen::Index K = 10, n = 30;
  Eigen::MatrixXd D(K, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < K; ++i) D(i, j) = gauss.next();
  const Eigen::MatrixXd G = D.transpose() * D;

  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd x(K);
    for (Eigen::Index i = 0; i < K; ++i) x(i) = gauss.next();
    const Eigen::VectorXd c = D.transpose() * x;
    const SimplexFit fit = simplex_ls(G, c);
    const Eigen::VectorXd y = dense_solution(fit, n);

    // Stationarity: gradient g = Gy - c satisfies g_i = -mu on the support
    // and g_i >= -mu (within tolerance) off it.
    const Eigen::VectorXd g = G * y - c;
    double mu = 0.0;
    for (std::uint32_t s : fit.support) mu -= g(s);
    mu /= static_cast<double>(fit.support.size());
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    for (std::uint32_t s : fit.support) CHECK(std::abs(g(s) + mu) <= 1e-6 * scale);
    for (Eigen::Index i = 0; i < n; ++i)
      CHECK(g(i) + mu >= -1e-6 * scale);
  }
}

TEST_CASE("equally correlated atoms resolve to the lower index") {
  // Two identical atoms: the tie must deterministically pick index 0.
  Eigen::MatrixXd D(3, 3);
  D.col(0) << 1.0, 0.0, 0.0;
  D.col(1) << 1.0, 0.0, 0.0;
  D.col(2) << 0.0, 1.0, 0.0;
  Eigen::VectorXd x(3);
  x << 1.0, 0.0, 0.0;
  const SimplexFit fit = simplex_ls_dense(D, x);
  REQUIRE(fit.support.size() == 1);
  CHECK(fit.support[0] == 0);
  CHECK(fit.coeffs(0) == doctest::Approx(1.0));
}

TEST_CASE("zero target still yields a well-posed simplex solution") {
  GaussianSource gauss(29);
  Eigen::MatrixXd D(4, 8);
  for (Eigen::Index j = 0; j < 8; ++j)
    for (Eigen::Index i = 0; i < 4; ++i) D(i, j) = gauss.next();
  const SimplexFit fit = simplex_ls_dense(D, Eigen::VectorXd::Zero(4));
  const Eigen::VectorXd y = dense_solution(fit, 8);
  CHECK(y.minCoeff() >= 0.0);
  CHECK(std::abs(y.sum() - 1.0) <= 1e-9);

  // No simplex point does better at minimizing ||D y||.
  std::mt19937_64 rng(5);
  const double got = (D * y).squaredNorm();
  for (int i = 0; i < 2000; ++i) {
    const Eigen::VectorXd z = test_support::random_simplex_point(rng, 8);
    CHECK(got <= (D * z).squaredNorm() + 1e-9);
  }
}

TEST_CASE("max_support caps the active set size") {
  GaussianSource gauss(37);
  Eigen::MatrixXd D(12, 40);
  for (Eigen::Index j = 0; j < 40; ++j)
    for (Eigen::Index i = 0; i < 12; ++i) D(i, j) = gauss.next();
  Eigen::VectorXd x(12);
  for (Eigen::Index i = 0; i < 12; ++i) x(i) = gauss.next();

  SimplexOptions opt;
  opt.max_support = 3;
  const SimplexFit fit = simplex_ls_dense(D, x, opt);
  CHECK(fit.support.size() <= 3);
  const Eigen::VectorXd y = dense_solution(fit, 40);
  CHECK(y.minCoeff() >= 0.0);
  CHECK(std::abs(y.sum() - 1.0) <= 1e-9);
}

TEST_CASE("determinism: identical inputs give identical fits") {
  GaussianSource gauss(43);
  Eigen::MatrixXd D(6, 15);
  for (Eigen::Index j = 0; j < 15; ++j)
    for (Eigen::Index i = 0; i < 6; ++i) D(i, j) = gauss.next();
  Eigen::VectorXd x(6);
  for (Eigen::Index i = 0; i < 6; ++i) x(i) = gauss.next();

  const SimplexFit a = simplex_ls_dense(D, x);
  const SimplexFit b = simplex_ls_dense(D, x);
  CHECK(a.support == b.support);
  CHECK(a.coeffs == b.coeffs);
}
