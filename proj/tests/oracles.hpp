#pragma once

// Test-only oracles. These deliberately avoid the library's solver paths: dense Jacobi SVD
// instead of the divide-and-conquer SVD, explicit spectral sums instead of Cholesky solves,
// and closed forms / brute force wherever available.

#include <cmath>
#include <random>

#include <Eigen/Core>
#include <Eigen/SVD>

namespace oracle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = normal(rng);
  return m;
}

/// Random matrix with prescribed singular values (zeros allowed).
inline Matrix matrix_with_singular_values(std::mt19937_64& rng, const Vector& s) {
  const Eigen::Index n = s.size();
  Eigen::JacobiSVD<Matrix> svd(random_matrix(rng, n), Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

inline Vector singular_values(const Matrix& a) { return Eigen::JacobiSVD<Matrix>(a).singularValues(); }

/// Tikhonov solution as the explicit filter expansion sum_j s_j/(s_j^2+alpha) (f,psi_j) phi_j.
/// The weight h cancels, so plain orthonormal vectors suffice.
inline Vector tikhonov_filter(const Matrix& a, const Vector& f, double alpha) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector s = svd.singularValues();
  const Vector c = svd.matrixU().transpose() * f;
  Vector out = Vector::Zero(a.cols());
  for (Eigen::Index j = 0; j < s.size(); ++j) out += s[j] / (s[j] * s[j] + alpha) * c[j] * svd.matrixV().col(j);
  return out;
}

/// Pseudo-inverse solution through Jacobi SVD with relative truncation.
inline Vector pinv_solve(const Matrix& a, const Vector& f, double rel_tol) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector s = svd.singularValues();
  const Vector c = svd.matrixU().transpose() * f;
  Vector out = Vector::Zero(a.cols());
  for (Eigen::Index j = 0; j < s.size(); ++j)
    if (s[j] > rel_tol * s[0]) out += c[j] / s[j] * svd.matrixV().col(j);
  return out;
}

/// Basis of the numerical null space (columns of V with s_j <= rel_tol s_1).
inline Matrix null_basis(const Matrix& a, double rel_tol) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Vector s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s[r] > rel_tol * s[0]) ++r;
  return svd.matrixV().rightCols(s.size() - r);
}

/// Plain bisection for a root of a monotone function g on [lo, hi] with sign change.
template <class G>
double bisect(G&& g, double lo, double hi, int iters = 400) {
  const bool lo_neg = g(lo) < 0.0;
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    ((g(mid) < 0.0) == lo_neg ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
