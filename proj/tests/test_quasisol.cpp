#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "illposed/quasisol.hpp"
#include "oracles.hpp"

using namespace illposed;

namespace {

// Uniform sample in the h-weighted ball of radius R.
Vector sample_in_ball(std::mt19937_64& rng, Eigen::Index n, double R, double h) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector v = oracle::random_vector(rng, n);
  const double radius = R * std::pow(unit(rng), 1.0 / static_cast<double>(n));
  return v * (radius / norm_h(v, h));
}

}  // namespace

TEST(ProjectOntoBall, InteriorPointUnchanged) {
  const BallCompactum K(2.0);
  const Vector v = (Vector(4) << 0.1, -0.2, 0.3, 0.4).finished();
  EXPECT_EQ(project_onto_ball(K, v, 0.25), v);
}

TEST(ProjectOntoBall, RadialScaling) {
  const double h = 0.25;
  const BallCompactum K(1.0);
  Vector v = (Vector(4) << 1.0, 2.0, -1.0, 0.5).finished();
  v *= 2.0 / norm_h(v, h);
  const Vector p = project_onto_ball(K, v, h);
  EXPECT_LT((p - v / 2.0).norm(), 1e-15);
  EXPECT_NEAR(norm_h(p, h), 1.0, 1e-15);
}

TEST(ProjectOntoBall, Nonexpansive) {
  std::mt19937_64 rng(40);
  const BallCompactum K(0.7);
  const double h = 1.0 / 12;
  for (int k = 0; k < 200; ++k) {
    const Vector u = 2.0 * oracle::random_vector(rng, 12), v = 2.0 * oracle::random_vector(rng, 12);
    EXPECT_LE(norm_h(project_onto_ball(K, u, h) - project_onto_ball(K, v, h), h), norm_h(u - v, h) + 1e-15);
  }
}

TEST(BallCompactum, RejectsNonPositiveRadius) {
  try {
    BallCompactum(0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_argument);
  }
}

TEST(QuasiSolution, ScalarKkt) {
  const DiscreteOperator a(Grid(1), Matrix::Ones(1, 1));
  const auto q = quasi_solution(a, Vector::Constant(1, 2.0), BallCompactum(1.0));
  EXPECT_TRUE(q.active);
  EXPECT_NEAR(q.u[0], 1.0, 1e-10);
  EXPECT_NEAR(q.lambda, 1.0, 1e-10);
}

TEST(QuasiSolution, InteriorOptimumIsExact) {
  const Problem p = make_problem("fredholm", 32, "sin1");
  const double R = 2.0 * p.op().norm_h(p.truth());
  const auto q = quasi_solution(p.op(), p.spectrum(), p.data(), BallCompactum(R));
  EXPECT_FALSE(q.active);
  EXPECT_EQ(q.lambda, 0.0);
  EXPECT_LE(p.op().norm_h(q.u - p.truth()), 1e-9);
  EXPECT_LE(q.residual, 1e-12);
}

TEST(QuasiSolution, BeatsRandomFeasiblePoints) {
  std::mt19937_64 rng(41);
  const auto op = scale_to_unit(DiscreteOperator(Grid(16), oracle::random_matrix(rng, 16))).op;
  const double h = op.weight();
  const Vector f = oracle::random_vector(rng, 16);
  const double R = 0.3 * op.norm_h(minimal_norm_solution(op, f));
  const auto q = quasi_solution(op, f, BallCompactum(R));
  ASSERT_TRUE(q.active);
  EXPECT_NEAR(op.norm_h(q.u), R, 1e-9 * R);
  for (int k = 0; k < 500; ++k) {
    const Vector u = sample_in_ball(rng, 16, R, h);
    EXPECT_LE(q.residual, op.residual(u, f) + 1e-8);
  }
}

TEST(QuasiSolution, DistanceIsLipschitzInData) {
  std::mt19937_64 rng(42);
  const Problem p = make_problem("fredholm", 32, "hat");
  const BallCompactum K(0.5 * p.op().norm_h(p.truth()));
  for (int k = 0; k < 20; ++k) {
    const Vector f = p.data() + 0.05 * oracle::random_vector(rng, 32);
    const Vector g = f + 0.01 * oracle::random_vector(rng, 32);
    const double df = distance_to_image(p.op(), p.spectrum(), f, K);
    const double dg = distance_to_image(p.op(), p.spectrum(), g, K);
    EXPECT_LE(std::abs(df - dg), p.op().norm_h(f - g) + 1e-10);
  }
}

TEST(QuasiSolution, StableAsNoiseVanishes) {
  const Problem p = make_problem("fredholm", 64, "hat");
  const BallCompactum K(1.05 * p.op().norm_h(p.truth()));
  double prev = std::numeric_limits<double>::infinity();
  for (double delta : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const NoisyData d = add_noise(p, delta, 0);
    const auto q = quasi_solution(p.op(), p.spectrum(), d.f_delta(), K);
    const double err = p.op().norm_h(q.u - p.truth());
    EXPECT_LT(err, prev) << "delta = " << delta;
    prev = err;
  }
}

TEST(QuasiSolution, ResidualNonincreasingInRadius) {
  const Problem p = make_problem("differentiation", 32, "cospi");
  const NoisyData d = add_noise(p, 1e-2, 2);
  double prev = std::numeric_limits<double>::infinity();
  for (double R = 0.05; R <= 3.0; R *= 1.5) {
    const auto q = quasi_solution(p.op(), p.spectrum(), d.f_delta(), BallCompactum(R));
    EXPECT_LE(q.residual, prev + 1e-12);
    if (q.active) {
      EXPECT_GT(q.lambda, 0.0);
      EXPECT_NEAR(p.op().norm_h(q.u), R, 1e-9 * R);
    } else {
      EXPECT_EQ(q.lambda, 0.0);
    }
    prev = q.residual;
  }
}
