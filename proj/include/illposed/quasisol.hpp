#pragma once

// Quasi-solutions: minimize ||Au - f_delta||_h over the ball {||u||_h <= R}.

#include <cmath>
#include <string>

#include "illposed/error.hpp"
#include "illposed/linops.hpp"
#include "illposed/problems.hpp"
#include "illposed/roots.hpp"

namespace illposed {

/// Closed ball {u : ||u||_h <= R}; convex and, in finite dimension, compact.
class BallCompactum {
 public:
  explicit BallCompactum(double radius) : radius_(radius) {
    if (!(radius > 0.0)) throw Error(Errc::invalid_argument, "ball radius must be > 0");
  }
  double radius() const noexcept { return radius_; }
  bool contains(const Vector& u, double h) const { return norm_h(u, h) <= radius_; }

 private:
  double radius_;
};

/// Metric projection v * min(1, R/||v||_h).
inline Vector project_onto_ball(const BallCompactum& ball, const Vector& v, double h) {
  const double nv = norm_h(v, h);
  if (nv <= ball.radius()) return v;
  return v * (ball.radius() / nv);
}

struct QuasiSolution {
  Vector u;
  double lambda = 0.0;  ///< KKT multiplier; 0 when the constraint is inactive
  double residual = 0.0;
  bool active = false;
  int iterations = 0;
};

inline constexpr double kQuasiLogLambdaMin = -14.0;
inline constexpr double kQuasiLogLambdaMax = 6.0;

/// Exact KKT solution. If the minimal-norm least-squares solution lies in the ball it is
/// returned; otherwise u(lambda) = (B + lambda)^{-1} A^* f_delta with ||u(lambda)||_h = R.
inline QuasiSolution quasi_solution(const DiscreteOperator& op, const SpectralData& spec, const Vector& f_delta,
                                    const BallCompactum& ball, double trunc_tol = kDefaultTruncTol,
                                    double rel_tol = 1e-12) {
  QuasiSolution out;
  Vector u_ls = minimal_norm_solution(spec, f_delta, trunc_tol);
  if (op.norm_h(u_ls) <= ball.radius()) {
    out.residual = op.residual(u_ls, f_delta);
    out.u = std::move(u_ls);
    return out;
  }

  const Vector q = op.adjoint_apply(f_delta);
  const double R = ball.radius();
  auto norm_at = [&](double lambda) { return op.norm_h(resolvent_solve(op, lambda, q)); };

  // ||u(lambda)||_h decreases from ||u_ls||_h (lambda -> 0) to 0; widen the top if needed.
  double hi_exp = kQuasiLogLambdaMax;
  while (norm_at(std::pow(10.0, hi_exp)) > R && hi_exp < 18.0) hi_exp += 2.0;
  if (norm_at(std::pow(10.0, kQuasiLogLambdaMin)) < R) {
    // The multiplier would lie below 1e-14: directions with s_j^2 << 1e-14 carry the excess.
    throw Error(Errc::no_root, "ball constraint active but ||u(1e-14)||_h < R; increase trunc_tol");
  }
  const auto root = bisect_log10(norm_at, R, kQuasiLogLambdaMin, hi_exp, false, rel_tol);
  out.lambda = root.x;
  out.iterations = root.iterations;
  out.active = true;
  out.u = resolvent_solve(op, out.lambda, q);
  out.residual = op.residual(out.u, f_delta);
  return out;
}

inline QuasiSolution quasi_solution(const DiscreteOperator& op, const Vector& f_delta, const BallCompactum& ball,
                                    double trunc_tol = kDefaultTruncTol) {
  return quasi_solution(op, spectral(op), f_delta, ball, trunc_tol);
}

/// dist_h(f, A K) realized by the quasi-solution residual.
inline double distance_to_image(const DiscreteOperator& op, const SpectralData& spec, const Vector& f,
                                const BallCompactum& ball) {
  return quasi_solution(op, spec, f, ball).residual;
}

}  // namespace illposed
