#pragma once

// Dense discretized operators on [0,1] in the weighted space (u,v)_h = h * sum u_i v_i.
//
// Because the weight is the uniform scalar h, the adjoint of a matrix operator is its
// transpose and the singular values in the weighted norm coincide with the ordinary
// matrix singular values. Singular vectors are stored normalized in the weighted norm.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "illposed/error.hpp"

namespace illposed {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Weighted inner product (u,v)_h.
inline double inner_h(const Vector& u, const Vector& v, double h) { return h * u.dot(v); }

/// Weighted norm ||u||_h.
inline double norm_h(const Vector& u, double h) { return std::sqrt(h) * u.norm(); }

/// Uniform midpoint grid x_i = (i - 1/2) h on [0,1].
class Grid {
 public:
  explicit Grid(std::size_t n) : n_(n), h_(n > 0 ? 1.0 / static_cast<double>(n) : 0.0) {
    if (n == 0) throw Error(Errc::invalid_argument, "grid needs at least one node");
  }

  std::size_t size() const noexcept { return n_; }
  double step() const noexcept { return h_; }

  /// Zero-based node i corresponds to x = (i + 1/2) h.
  double node(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * h_; }

  Vector nodes() const {
    Vector x(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i) x[static_cast<Eigen::Index>(i)] = node(i);
    return x;
  }

  template <std::invocable<double> F>
  Vector sample(F&& f) const {
    Vector v(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i) v[static_cast<Eigen::Index>(i)] = f(node(i));
    return v;
  }

 private:
  std::size_t n_;
  double h_;
};

/// Matrix representation of A together with the normal operator B = A^T A.
/// Immutable after construction.
class DiscreteOperator {
 public:
  DiscreteOperator(Grid grid, Matrix matrix) : grid_(grid), a_(std::move(matrix)) {
    const auto n = static_cast<Eigen::Index>(grid_.size());
    if (a_.rows() != n || a_.cols() != n)
      throw Error(Errc::invalid_argument, "operator matrix must be n x n with n = grid size");
    if (!a_.allFinite()) throw Error(Errc::invalid_argument, "operator matrix has non-finite entries");
    b_ = a_.transpose() * a_;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.size(); }
  double weight() const noexcept { return grid_.step(); }

  const Matrix& matrix() const noexcept { return a_; }
  /// B = A^* A.
  const Matrix& normal() const noexcept { return b_; }

  Vector apply(const Vector& u) const { return a_ * u; }
  Vector adjoint_apply(const Vector& v) const { return a_.transpose() * v; }
  Vector normal_apply(const Vector& u) const { return b_ * u; }

  double norm_h(const Vector& u) const { return illposed::norm_h(u, weight()); }
  double inner_h(const Vector& u, const Vector& v) const { return illposed::inner_h(u, v, weight()); }

  /// ||Au - f||_h
  double residual(const Vector& u, const Vector& f) const { return norm_h(apply(u) - f); }

  DiscreteOperator scaled(double factor) const { return DiscreteOperator(grid_, a_ * factor); }

 private:
  Grid grid_;
  Matrix a_;
  Matrix b_;
};

/// Singular system of A in the weighted geometry: A phi_j = s_j psi_j, with
/// (phi_j, phi_k)_h = (psi_j, psi_k)_h = delta_jk. The eigenpairs of B are (s_j^2, phi_j).
struct SpectralData {
  double weight = 0.0;
  Vector s;       ///< descending
  Matrix left;    ///< columns psi_j
  Matrix right;   ///< columns phi_j

  std::size_t size() const noexcept { return static_cast<std::size_t>(s.size()); }
  double norm() const { return s.size() > 0 ? s[0] : 0.0; }
  Vector eigenvalues() const { return s.array().square().matrix(); }

  /// Coefficients (f, psi_j)_h.
  Vector left_coefficients(const Vector& f) const { return weight * (left.transpose() * f); }
  /// Coefficients (u, phi_j)_h.
  Vector right_coefficients(const Vector& u) const { return weight * (right.transpose() * u); }

  /// Number of singular values above rel_tol * s_1.
  std::size_t rank(double rel_tol) const {
    const double cut = rel_tol * norm();
    std::size_t r = 0;
    while (r < size() && s[static_cast<Eigen::Index>(r)] > cut) ++r;
    return r;
  }

  /// Norm of the component of u along singular directions with s_j <= rel_tol * s_1.
  double null_component(const Vector& u, double rel_tol) const {
    const auto r = static_cast<Eigen::Index>(rank(rel_tol));
    const Vector c = right_coefficients(u);
    return c.tail(c.size() - r).norm();
  }

  /// Orthogonal projection of u onto span{phi_j : s_j > rel_tol * s_1}.
  Vector project_onto_range(const Vector& u, double rel_tol) const {
    const auto r = static_cast<Eigen::Index>(rank(rel_tol));
    const Vector c = right_coefficients(u);
    return right.leftCols(r) * c.head(r);
  }

  /// Weighted reconstruction sum_j s_j psi_j (phi_j, .)_h as a plain matrix.
  Matrix reconstruct() const { return weight * left * s.asDiagonal() * right.transpose(); }

  SpectralData scaled(double factor) const {
    SpectralData out = *this;
    out.s *= factor;
    return out;
  }
};

inline SpectralData spectral(const DiscreteOperator& op) {
  Eigen::BDCSVD<Matrix> svd(op.matrix(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) {
    throw Error(Errc::numerical_error,
                "SVD failed for " + std::to_string(op.size()) + "x" + std::to_string(op.size()) +
                    " operator with max |a_ij| = " + std::to_string(op.matrix().cwiseAbs().maxCoeff()));
  }
  const double inv_sqrt_h = 1.0 / std::sqrt(op.weight());
  SpectralData out;
  out.weight = op.weight();
  out.s = svd.singularValues();
  out.left = svd.matrixU() * inv_sqrt_h;
  out.right = svd.matrixV() * inv_sqrt_h;
  return out;
}

/// ||A|| = s_1, without the singular vectors.
inline double operator_norm(const DiscreteOperator& op) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(op.normal(), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw Error(Errc::numerical_error, "eigenvalues of A^T A failed");
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

struct ScaledOperator {
  DiscreteOperator op;
  double scale;  ///< the original s_1; op = original / scale
};

/// Returns A / s_1 and s_1. The pair (A/s_1, f/s_1) has the same solution set as (A, f).
inline ScaledOperator scale_to_unit(const DiscreteOperator& op) {
  const double s1 = operator_norm(op);
  if (!(s1 > 0.0)) throw Error(Errc::degenerate_operator, "cannot scale the zero operator");
  return {op.scaled(1.0 / s1), s1};
}

namespace detail {

// Solves (B + shift) u = rhs with a Cholesky factorization. shift may be zero when B
// itself is positive definite (used by frozen schedules in tests).
inline Vector shifted_normal_solve(const DiscreteOperator& op, double shift, const Vector& rhs) {
  Matrix m = op.normal();
  m.diagonal().array() += shift;
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw Error(Errc::numerical_error, "B + shift is not numerically positive definite (shift = " +
                                           std::to_string(shift) + ")");
  return llt.solve(rhs);
}

}  // namespace detail

/// Solves (B + alpha) u = rhs, alpha > 0. ||(B + alpha)^{-1}|| <= 1/alpha.
inline Vector resolvent_solve(const DiscreteOperator& op, double alpha, const Vector& rhs) {
  if (!(alpha > 0.0)) throw Error(Errc::invalid_argument, "resolvent needs alpha > 0");
  if (rhs.size() != static_cast<Eigen::Index>(op.size()))
    throw Error(Errc::invalid_argument, "rhs length does not match operator size");
  return detail::shifted_normal_solve(op, alpha, rhs);
}

/// Volterra operator (Au)(x) = int_0^x u(t) dt with A_ij = h for j <= i.
inline DiscreteOperator build_integration_operator(std::size_t n) {
  Grid grid(n);
  const auto m = static_cast<Eigen::Index>(n);
  Matrix a = Matrix::Zero(m, m);
  a.triangularView<Eigen::Lower>().setConstant(grid.step());
  return DiscreteOperator(grid, std::move(a));
}

/// Green's function of -u'' on [0,1] with Dirichlet conditions; eigenvalues 1/(k pi)^2.
inline double green_kernel(double x, double y) noexcept { return std::min(x, y) - x * y; }

/// (Au)(x) = int_0^1 K(x,y) u(y) dy, midpoint rule: A_ij = h K(x_i, x_j).
template <class Kernel>
  requires std::invocable<Kernel, double, double>
DiscreteOperator build_fredholm_operator(Kernel&& kernel, std::size_t n) {
  Grid grid(n);
  const auto m = static_cast<Eigen::Index>(n);
  Matrix a(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double k = kernel(grid.node(static_cast<std::size_t>(i)), grid.node(static_cast<std::size_t>(j)));
      if (!std::isfinite(k))
        throw Error(Errc::invalid_kernel, "kernel is not finite at node pair (" + std::to_string(i) + ", " +
                                              std::to_string(j) + ")");
      a(i, j) = grid.step() * k;
    }
  }
  return DiscreteOperator(grid, std::move(a));
}

inline DiscreteOperator build_fredholm_operator(std::size_t n) { return build_fredholm_operator(green_kernel, n); }

}  // namespace illposed
