#pragma once

// Quick invariant checks on small instances, run by `illposed selftest`.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "illposed/dsm.hpp"
#include "illposed/landweber.hpp"
#include "illposed/linops.hpp"
#include "illposed/problems.hpp"
#include "illposed/quasisol.hpp"
#include "illposed/variational.hpp"

namespace illposed {

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;  ///< worst observed violation measure (<= 0 or small is good)
};

namespace detail {

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

}  // namespace detail

inline std::vector<CheckResult> run_selftest(std::size_t n = 32) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(2024);
  const Problem fred = make_problem("fredholm", n, "hat");
  const Problem diff = make_problem("differentiation", n, "cospi");
  const auto ni = static_cast<Eigen::Index>(n);

  {
    double worst = 0.0;
    for (const Problem* p : {&fred, &diff}) {
      for (int k = 0; k < 20; ++k) {
        const Vector u = detail::random_vector(rng, ni), v = detail::random_vector(rng, ni);
        const auto& op = p->op();
        const double gap = std::abs(op.inner_h(op.apply(u), v) - op.inner_h(u, op.adjoint_apply(v)));
        worst = std::max(worst, gap / (op.norm_h(u) * op.norm_h(v)));
      }
    }
    out.push_back({"adjoint identity", worst <= 1e-12, worst});
  }
  {
    double worst = -1.0;
    for (const Problem* p : {&fred, &diff}) {
      const Vector lambda = p->spectrum().eigenvalues();
      for (double e = 1e-6; e <= 1.0; e *= 10.0) {
        const double resolvent = (lambda.array() + e).inverse().maxCoeff();
        const double smoothing = (p->spectrum().s.array() / (lambda.array() + e)).maxCoeff();
        worst = std::max({worst, resolvent - 1.0 / e, smoothing - 1.0 / (2.0 * std::sqrt(e))});
      }
    }
    out.push_back({"resolvent and smoothing bounds", worst <= 1e-12, worst});
  }
  {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const NoisyData d = add_noise(fred, 1e-3, seed);
      const auto& op = fred.op();
      worst = std::max(worst, std::abs(op.norm_h(d.f_delta() - fred.data()) - d.delta()) / d.delta());
      worst = std::max(worst, op.norm_h(d.q_delta() - op.adjoint_apply(fred.data())) - d.delta());
    }
    out.push_back({"noise exactness and data contraction", worst <= 1e-12, worst});
  }
  {
    double worst = 0.0;
    const NoisyData d = add_noise(fred, 1e-2, 7);
    const auto& op = fred.op();
    for (double alpha : {1e-6, 1e-3, 1e-1}) {
      const Vector u = tikhonov_solve(op, d.f_delta(), alpha);
      const Vector r = op.normal_apply(u) + alpha * u - d.q_delta();
      worst = std::max(worst, op.norm_h(r) / op.norm_h(d.q_delta()));
    }
    out.push_back({"Tikhonov normal equation", worst <= 1e-10, worst});
  }
  {
    const auto& op = fred.op();
    const NoisyData d = add_noise(fred, 1e-3, 1);
    const NoisyData exact = add_noise(fred, 0.0, 1);
    LandweberIteration noisy(op, d.q_delta(), 0.9), clean(op, exact.q_delta(), 0.9);
    double worst = -1.0;
    double prev_residual = op.residual(noisy.iterate(), d.f_delta());
    for (int k = 1; k <= 500; ++k) {
      noisy.step();
      clean.step();
      const double gap = op.norm_h(noisy.iterate() - clean.iterate());
      worst = std::max(worst, gap - k * 0.9 * d.delta());
      const double r = op.residual(noisy.iterate(), d.f_delta());
      worst = std::max(worst, r - prev_residual - 1e-15);
      prev_residual = r;
    }
    out.push_back({"Landweber noise split and residual monotonicity", worst <= 0.0, worst});
  }
  {
    const auto& op = fred.op();
    const NoisyData d = add_noise(fred, 1e-2, 3);
    const EpsilonSchedule sched;
    const auto noisy = dsm_evolve(op, d.f_delta(), sched, 1e3);
    const auto clean = dsm_evolve(op, fred.data(), sched, 1e3);
    double worst = -1.0;
    for (std::size_t k = 0; k < noisy.times.size(); ++k) {
      const double gap = op.norm_h(noisy.snapshots[k] - clean.snapshots[k]);
      worst = std::max(worst, gap - 1.05 * d.delta() / (2.0 * std::sqrt(sched(noisy.times[k]))));
    }
    out.push_back({"DSM noise propagation", worst <= 0.0, worst});
  }
  {
    const auto& op = fred.op();
    const NoisyData d = add_noise(fred, 1e-2, 4);
    const double R = 0.5 * op.norm_h(fred.truth());
    const auto q = quasi_solution(op, fred.spectrum(), d.f_delta(), BallCompactum(R));
    const double worst = std::abs(op.norm_h(q.u) - R) / R;
    out.push_back({"quasi-solution KKT", q.active && q.lambda > 0.0 && worst <= 1e-9, worst});
  }
  return out;
}

}  // namespace illposed
