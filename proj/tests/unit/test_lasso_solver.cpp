#include <cmath>
#include <random>

#include "doctest.h"
#include "lassonse/lasso_solver.hpp"
#include "oracles.hpp"

using namespace lassonse;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd gaussian_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols,
                         double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  MatrixXd A(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) A(i, j) = normal(gen);
  return A;
}

ProblemInstance small_l1_instance(std::uint64_t seed, Eigen::Index m, Eigen::Index n,
                                  std::size_t k, double sigma, double lambda) {
  std::mt19937_64 gen(seed);
  const auto spec = RegularizerSpec::l1_sparse(static_cast<std::size_t>(n), k);
  MatrixXd A = gaussian_matrix(gen, m, n, 1.0 / std::sqrt(static_cast<double>(m)));
  VectorXd x0 = VectorXd::Zero(n);
  for (std::size_t i = 0; i < k; ++i) x0[static_cast<Eigen::Index>(i)] = 1.0;
  std::normal_distribution<double> normal;
  VectorXd v(m);
  for (auto& e : v) e = normal(gen);
  VectorXd y = A * x0 + sigma * v;
  return {std::move(A), std::move(y), sigma, lambda, spec, std::move(x0)};
}

}  // namespace

TEST_SUITE("lasso_solver") {

TEST_CASE("spectral norm matches Jacobi eigenvalues") {
  std::mt19937_64 gen(3);
  for (auto [r, c] : {std::pair{30, 50}, std::pair{50, 30}, std::pair{8, 8}}) {
    const MatrixXd A = gaussian_matrix(gen, r, c, 1.0);
    const double top = oracle::jacobi_eigenvalues(A.transpose() * A).back();
    const double L = spectral_norm_sq(A);
    CHECK(L >= top);
    CHECK(L / 1.01 == doctest::Approx(top).epsilon(1e-6));
  }
  CHECK_THROWS_AS(spectral_norm_sq(MatrixXd::Zero(3, 4)), std::invalid_argument);
}

TEST_CASE("lambda = 0 gives least squares") {
  std::mt19937_64 gen(5);
  const MatrixXd A = gaussian_matrix(gen, 60, 20, 1.0 / std::sqrt(60.0));
  const VectorXd y = gaussian_matrix(gen, 60, 1, 1.0).col(0);
  const ProblemInstance inst{A, y, 1.0, 0.0, RegularizerSpec::l1_sparse(20, 2),
                             VectorXd::Zero(20)};
  const auto rep = solve(inst);
  CHECK(rep.converged);
  const VectorXd ls = (A.transpose() * A).ldlt().solve(A.transpose() * y);
  CHECK((rep.x_hat - ls).norm() <= 1e-6 * ls.norm());
}

TEST_CASE("identity design reduces to the proximal denoiser") {
  std::mt19937_64 gen(9);
  const VectorXd y = gaussian_matrix(gen, 15, 1, 2.0).col(0);
  const auto spec = RegularizerSpec::l1_sparse(15, 3);
  const ProblemInstance inst{MatrixXd::Identity(15, 15), y, 0.5, 1.3, spec,
                             VectorXd::Zero(15)};
  const auto rep = solve(inst);
  CHECK(rep.converged);
  VectorXd expected(15);
  for (Eigen::Index i = 0; i < 15; ++i) {
    const double mag = std::abs(y[i]) - 0.65;
    expected[i] = mag > 0.0 ? std::copysign(mag, y[i]) : 0.0;
  }
  CHECK((rep.x_hat - expected).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("objective matches a subgradient + KKT oracle") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto inst = small_l1_instance(seed, 10, 20, 2, 0.3, 1.5);
    const auto rep = solve(inst);
    CHECK(rep.converged);
    const auto ref = oracle::l1_lasso(inst.A, inst.y, inst.sigma * inst.lambda);
    REQUIRE(ref.kkt_verified);
    CHECK(std::abs(rep.objective - ref.objective) <= 1e-9 * std::max(1.0, ref.objective));
    CHECK(rep.objective <= ref.objective_subgradient + 1e-12);
    CHECK((rep.x_hat - ref.x).norm() <= 1e-5);
  }
}

TEST_CASE("solution is a fixed point of the proximal gradient map") {
  const auto inst = small_l1_instance(17, 40, 80, 6, 0.2, 2.0);
  const auto rep = solve(inst);
  CHECK(rep.converged);
  const double step = 1.0 / rep.lipschitz;
  const VectorXd grad = inst.A.transpose() * (inst.A * rep.x_hat - inst.y);
  const VectorXd again =
      prox(inst.spec, rep.x_hat - step * grad, step * inst.sigma * inst.lambda);
  CHECK((again - rep.x_hat).lpNorm<Eigen::Infinity>() <= 1e-8);
  CHECK(rep.fixed_point_residual <= 1e-8);

  // optimality certificate: A'(y - A x) lies in sigma lambda df(x)
  const VectorXd corr = inst.A.transpose() * (inst.y - inst.A * rep.x_hat);
  const double gamma = inst.sigma * inst.lambda;
  for (Eigen::Index i = 0; i < corr.size(); ++i) {
    if (rep.x_hat[i] != 0.0) {
      CHECK(corr[i] == doctest::Approx(std::copysign(gamma, rep.x_hat[i])).epsilon(1e-6));
    } else {
      CHECK(std::abs(corr[i]) <= gamma * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("block regularizer optimality certificate") {
  std::mt19937_64 gen(23);
  VectorXd d(3);
  d << 1.0, 0.0, 0.0;
  const auto spec = RegularizerSpec::block_l12(30, 3, {0, 4}, {d, d});
  const MatrixXd A = gaussian_matrix(gen, 20, 30, 1.0 / std::sqrt(20.0));
  VectorXd x0 = VectorXd::Zero(30);
  x0[0] = 1.0;
  x0[12] = 1.0;
  const VectorXd y = A * x0 + 0.1 * gaussian_matrix(gen, 20, 1, 1.0).col(0);
  const ProblemInstance inst{A, y, 0.1, 3.0, spec, x0};
  const auto rep = solve(inst);
  CHECK(rep.converged);
  const VectorXd corr = A.transpose() * (y - A * rep.x_hat);
  const double gamma = 0.3;
  for (Eigen::Index b = 0; b < 10; ++b) {
    const VectorXd xs = rep.x_hat.segment(3 * b, 3);
    const VectorXd cs = corr.segment(3 * b, 3);
    if (xs.norm() > 0.0) {
      CHECK((cs - gamma * xs / xs.norm()).norm() <= 1e-6 * gamma);
    } else {
      CHECK(cs.norm() <= gamma * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("objective history never increases") {
  const auto inst = small_l1_instance(31, 50, 100, 10, 0.5, 1.0);
  const auto rep = solve(inst);
  REQUIRE(rep.objective_history.size() == static_cast<std::size_t>(rep.iterations) + 1);
  for (std::size_t i = 1; i < rep.objective_history.size(); ++i) {
    CHECK(rep.objective_history[i] <= rep.objective_history[i - 1]);
  }
  CHECK(rep.objective == rep.objective_history.back());
  CHECK(rep.objective == doctest::Approx(lasso_objective(inst, rep.x_hat)).epsilon(1e-15));
}

TEST_CASE("iteration cap reports non-convergence") {
  const auto inst = small_l1_instance(31, 50, 100, 10, 0.5, 1.0);
  const auto rep = solve(inst, 1e-12, 5);
  CHECK_FALSE(rep.converged);
  CHECK(rep.iterations == 5);
  CHECK(rep.x_hat.size() == 100);
}

TEST_CASE("solver argument checks") {
  auto inst = small_l1_instance(1, 10, 20, 2, 0.3, 1.5);
  CHECK_THROWS_AS(solve(inst, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve(inst, 1e-12, 0), std::invalid_argument);
  inst.lambda = -1.0;
  CHECK_THROWS_AS(solve(inst), std::invalid_argument);
  inst.lambda = 1.0;
  inst.y = VectorXd::Zero(11);
  CHECK_THROWS_AS(solve(inst), std::invalid_argument);
}

TEST_CASE("nse") {
  VectorXd x0 = VectorXd::Zero(4);
  VectorXd x = x0;
  x[0] = 0.1;
  CHECK(nse(x, x0, 0.1) == doctest::Approx(1.0).epsilon(1e-15));
  x[1] = -0.2;
  CHECK(nse(x, x0, 0.1) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(nse(x0, x0, 2.0) == 0.0);
  CHECK_THROWS_AS(nse(x, x0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(nse(x, VectorXd::Zero(3), 1.0), std::invalid_argument);
}

}
