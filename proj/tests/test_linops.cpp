#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "illposed/linops.hpp"
#include "illposed/problems.hpp"
#include "illposed/variational.hpp"
#include "oracles.hpp"

using namespace illposed;

namespace {

DiscreteOperator random_operator(std::mt19937_64& rng, std::size_t n) {
  return DiscreteOperator(Grid(n), oracle::random_matrix(rng, static_cast<Eigen::Index>(n)));
}

}  // namespace

TEST(Grid, MidpointNodes) {
  Grid g(4);
  EXPECT_DOUBLE_EQ(g.step(), 0.25);
  EXPECT_NEAR(g.step() * 4.0, 1.0, 1e-16);
  EXPECT_DOUBLE_EQ(g.node(0), 0.125);
  EXPECT_DOUBLE_EQ(g.node(3), 0.875);
  const Vector x = g.nodes();
  for (Eigen::Index i = 1; i < x.size(); ++i) EXPECT_LT(x[i - 1], x[i]);
  EXPECT_THROW(Grid(0), Error);
}

TEST(IntegrationOperator, TwoByTwo) {
  const auto op = build_integration_operator(2);
  Matrix expected(2, 2);
  expected << 0.5, 0.0, 0.5, 0.5;
  EXPECT_EQ(op.matrix(), expected);
  EXPECT_DOUBLE_EQ(op.weight(), 0.5);
}

TEST(IntegrationOperator, IntegratesConstantsExactly) {
  const auto op = build_integration_operator(4);
  const Vector au = op.apply(Vector::Ones(4));
  const Vector expected = (Vector(4) << 0.25, 0.5, 0.75, 1.0).finished();
  EXPECT_LT((au - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_TRUE((op.matrix().diagonal().array() > 0.0).all());
}

TEST(IntegrationOperator, SmallestSingularValueDecaysWithN) {
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t n : {8, 16, 32, 64}) {
    const auto op = build_integration_operator(n);
    const double s_min = oracle::singular_values(op.matrix()).minCoeff();
    EXPECT_LT(s_min, previous) << "n = " << n;
    EXPECT_NEAR(spectral(op).s.minCoeff(), s_min, 1e-12);
    previous = s_min;
  }
}

TEST(IntegrationOperator, RejectsEmptyGrid) {
  try {
    build_integration_operator(0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_argument);
  }
}

TEST(FredholmOperator, ZeroKernel) {
  const auto op = build_fredholm_operator([](double, double) { return 0.0; }, 3);
  EXPECT_TRUE(op.matrix().isZero(0.0));
}

TEST(FredholmOperator, GreenKernelSpectrum) {
  const auto op = build_fredholm_operator(128);
  EXPECT_LT((op.matrix() - op.matrix().transpose()).cwiseAbs().maxCoeff(), 1e-14);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(op.matrix());
  const Vector lambda = eig.eigenvalues().reverse();
  const double pi2 = std::numbers::pi * std::numbers::pi;
  EXPECT_NEAR(lambda[0], 1.0 / pi2, 0.01 / pi2);
  for (int k = 1; k <= 3; ++k) {
    const double analytic = 1.0 / (k * k * pi2);
    EXPECT_NEAR(lambda[k - 1], analytic, 0.02 * analytic) << "k = " << k;
  }
  EXPECT_NEAR(spectral(op).norm(), lambda[0], 1e-12);
}

TEST(FredholmOperator, NonFiniteKernel) {
  try {
    build_fredholm_operator([](double x, double y) { return 1.0 / (x - y); }, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_kernel);
  }
}

TEST(Spectral, DiagonalOperator) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 3.0;
  const auto spec = spectral(DiscreteOperator(Grid(2), d));
  EXPECT_NEAR(spec.s[0], 3.0, 1e-15);
  EXPECT_NEAR(spec.s[1], 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(spec.norm(), 3.0);
}

TEST(Spectral, IntegrationTwoByTwoClosedForm) {
  // M = [[a,0],[b,c]]: s^2 = (T +- sqrt(T^2 - 4 D^2)) / 2 with T = a^2+b^2+c^2, D = ac.
  const double a = 0.5, b = 0.5, c = 0.5;
  const double T = a * a + b * b + c * c, D = a * c;
  const double s1 = std::sqrt((T + std::sqrt(T * T - 4 * D * D)) / 2);
  const double s2 = std::sqrt((T - std::sqrt(T * T - 4 * D * D)) / 2);
  const auto spec = spectral(build_integration_operator(2));
  EXPECT_NEAR(spec.s[0], s1, 1e-14);
  EXPECT_NEAR(spec.s[1], s2, 1e-14);
}

TEST(Spectral, TripletsAndReconstruction) {
  std::mt19937_64 rng(1);
  const auto op = random_operator(rng, 16);
  const auto spec = spectral(op);
  const double h = op.weight();
  for (Eigen::Index j = 0; j < 16; ++j) {
    EXPECT_LT(op.norm_h(op.apply(spec.right.col(j)) - spec.s[j] * spec.left.col(j)), 1e-10);
    if (j > 0) EXPECT_GE(spec.s[j - 1], spec.s[j]);
  }
  const Matrix gram = h * spec.right.transpose() * spec.right;
  EXPECT_LT((gram - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((spec.reconstruct() - op.matrix()).norm(), 1e-10 * spec.norm());
  EXPECT_EQ(spec.eigenvalues(), spec.s.cwiseProduct(spec.s));
}

TEST(ScaleToUnit, NormalizesOperator) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 0.5;
  const auto [scaled, factor] = scale_to_unit(DiscreteOperator(Grid(2), d));
  EXPECT_NEAR(factor, 2.0, 1e-14);
  EXPECT_NEAR(spectral(scaled).norm(), 1.0, 1e-14);

  const auto small = scale_to_unit(DiscreteOperator(Grid(2), 0.25 * d));
  EXPECT_NEAR(small.scale, 0.5, 1e-14);
  EXPECT_NEAR(spectral(small.op).norm(), 1.0, 1e-14);
}

TEST(ScaleToUnit, ZeroOperatorIsDegenerate) {
  try {
    scale_to_unit(DiscreteOperator(Grid(3), Matrix::Zero(3, 3)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::degenerate_operator);
  }
}

TEST(ScaleToUnit, TikhonovSolutionInvariance) {
  std::mt19937_64 rng(5);
  const auto op = build_fredholm_operator(32);
  const Vector f = oracle::random_vector(rng, 32);
  const auto [scaled, s1] = scale_to_unit(op);
  const double alpha = 1e-3;
  const Vector u = tikhonov_solve(op, f, alpha);
  const Vector u_scaled = tikhonov_solve(scaled, f / s1, alpha / (s1 * s1));
  EXPECT_LE((u - u_scaled).norm(), 1e-10 * u.norm());
  // independent route: the filter-factor expansion of the unscaled problem
  EXPECT_LE((u - oracle::tikhonov_filter(op.matrix(), f, alpha)).norm(), 1e-10 * u.norm());
}

TEST(Resolvent, ZeroOperator) {
  const DiscreteOperator zero(Grid(3), Matrix::Zero(3, 3));
  const Vector r = (Vector(3) << 1.0, -2.0, 4.0).finished();
  EXPECT_LT((resolvent_solve(zero, 2.0, r) - r / 2.0).norm(), 1e-15);
}

TEST(Resolvent, Scalar) {
  const DiscreteOperator a(Grid(1), Matrix::Constant(1, 1, 0.5));  // B = 0.25
  EXPECT_NEAR(resolvent_solve(a, 0.75, Vector::Ones(1))[0], 1.0, 1e-15);
}

TEST(Resolvent, RejectsNonPositiveAlpha) {
  const auto op = build_integration_operator(4);
  for (double alpha : {0.0, -1.0}) {
    try {
      resolvent_solve(op, alpha, Vector::Ones(4));
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::invalid_argument);
    }
  }
}

TEST(Resolvent, BoundAndResidual) {
  std::mt19937_64 rng(11);
  const auto op = scale_to_unit(build_integration_operator(24)).op;
  const Vector lambda = spectral(op).eigenvalues();
  for (double alpha : {1e-3, 1e-1, 1.0}) {
    // spectral oracle: ||(B+alpha)^{-1}|| = max_j 1/(lambda_j + alpha) <= 1/alpha
    EXPECT_LE((lambda.array() + alpha).inverse().maxCoeff(), 1.0 / alpha);
    for (int k = 0; k < 100; ++k) {
      const Vector rhs = oracle::random_vector(rng, 24);
      const Vector u = resolvent_solve(op, alpha, rhs);
      EXPECT_LE(op.norm_h(u), op.norm_h(rhs) / alpha * (1 + 1e-12));
      EXPECT_LE(op.norm_h(op.normal_apply(u) + alpha * u - rhs), 1e-10 * op.norm_h(rhs));
    }
  }
}

TEST(Invariants, AdjointIdentity) {
  std::mt19937_64 rng(3);
  const DiscreteOperator ops[] = {build_integration_operator(20), build_fredholm_operator(20),
                                  random_operator(rng, 20)};
  for (const auto& op : ops) {
    for (int k = 0; k < 20; ++k) {
      const Vector u = oracle::random_vector(rng, 20), v = oracle::random_vector(rng, 20);
      const double lhs = op.inner_h(op.apply(u), v);
      const double rhs = op.inner_h(u, op.adjoint_apply(v));
      EXPECT_LE(std::abs(lhs - rhs), 1e-12 * op.norm_h(u) * op.norm_h(v));
    }
  }
}

TEST(Invariants, SmoothingBound) {
  const auto spec = spectral(scale_to_unit(build_fredholm_operator(64)).op);
  const Vector lambda = spec.eigenvalues();
  for (double eps = 1e-6; eps <= 1.0; eps *= 10.0) {
    const double sup = (spec.s.array() / (lambda.array() + eps)).maxCoeff();
    EXPECT_LE(sup, 1.0 / (2.0 * std::sqrt(eps)) + 1e-12);
  }
  // equality exactly when eps = s_j^2
  const double eps = lambda[3];
  const double sup = (spec.s.array() / (lambda.array() + eps)).maxCoeff();
  EXPECT_NEAR(sup, 1.0 / (2.0 * std::sqrt(eps)), 1e-12 / std::sqrt(eps));
}

TEST(Invariants, NormalEquationEquivalence) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 4 + trial;
    Vector s = Vector::LinSpaced(n, 2.0, 0.5);
    s.tail(trial % 3).setZero();  // rank-deficient for two thirds of the trials
    const DiscreteOperator op(Grid(static_cast<std::size_t>(n)), oracle::matrix_with_singular_values(rng, s));
    const Vector f = op.apply(oracle::random_vector(rng, n));  // solvable
    const Vector u_a = minimal_norm_solution(op, f);
    const DiscreteOperator normal(Grid(static_cast<std::size_t>(n)), op.normal());
    const Vector u_b = minimal_norm_solution(normal, op.adjoint_apply(f));
    EXPECT_LE((u_a - u_b).norm(), 1e-9 * std::max(1.0, u_a.norm())) << "trial " << trial;
  }
}
