#pragma once

// Canonical ill-posed test problems, exact-level noise injection, minimal-norm ground
// truth, and the two closed-form demonstrations (stable differentiation, Hadamard's
// Cauchy problem for the Laplace equation).

#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "illposed/error.hpp"
#include "illposed/linops.hpp"

namespace illposed {

/// Relative singular-value floor below which directions count as null-space.
inline constexpr double kDefaultTruncTol = 1e-12;

enum class ProblemKind { differentiation, fredholm };

inline ProblemKind parse_problem_kind(std::string_view name) {
  if (name == "differentiation") return ProblemKind::differentiation;
  if (name == "fredholm") return ProblemKind::fredholm;
  throw Error(Errc::invalid_argument, "unknown problem kind '" + std::string(name) + "'");
}

inline std::string_view to_string(ProblemKind kind) noexcept {
  return kind == ProblemKind::differentiation ? "differentiation" : "fredholm";
}

using TruthFunction = std::function<double(double)>;

/// Named truth profiles: one, cospi, sin1 (sqrt(2) sin(pi x), the first Dirichlet mode),
/// hat (piecewise-linear peak of height 1 at x = 0.5).
inline TruthFunction truth_function(std::string_view name) {
  if (name == "one") return [](double) { return 1.0; };
  if (name == "cospi") return [](double x) { return std::cos(std::numbers::pi * x); };
  if (name == "sin1") return [](double x) { return std::numbers::sqrt2 * std::sin(std::numbers::pi * x); };
  if (name == "hat") return [](double x) { return 1.0 - std::abs(2.0 * x - 1.0); };
  throw Error(Errc::invalid_argument, "unknown truth function '" + std::string(name) + "'");
}

inline bool is_truth_name(std::string_view name) {
  return name == "one" || name == "cospi" || name == "sin1" || name == "hat";
}

/// Operator (scaled to ||A|| = 1) + minimal-norm truth y + exact data f = A y.
class Problem {
 public:
  Problem(std::string label, DiscreteOperator op, SpectralData spectrum, double scale, Vector truth)
      : label_(std::move(label)),
        op_(std::move(op)),
        spectrum_(std::move(spectrum)),
        scale_(scale),
        truth_(std::move(truth)),
        data_(op_.apply(truth_)) {}

  const std::string& label() const noexcept { return label_; }
  const DiscreteOperator& op() const noexcept { return op_; }
  const SpectralData& spectrum() const noexcept { return spectrum_; }
  /// s_1 of the unscaled operator.
  double scale() const noexcept { return scale_; }
  const Vector& truth() const noexcept { return truth_; }
  /// f = A y for the scaled operator.
  const Vector& data() const noexcept { return data_; }
  /// Data of the unscaled operator, scale * f.
  Vector raw_data() const { return scale_ * data_; }
  std::size_t size() const noexcept { return op_.size(); }

 private:
  std::string label_;
  DiscreteOperator op_;
  SpectralData spectrum_;
  double scale_;
  Vector truth_;
  Vector data_;
};

template <std::invocable<double> F>
Problem make_problem(ProblemKind kind, std::size_t n, F&& truth, std::string label = {},
                     double trunc_tol = kDefaultTruncTol) {
  const DiscreteOperator raw =
      kind == ProblemKind::differentiation ? build_integration_operator(n) : build_fredholm_operator(n);
  SpectralData raw_spec = spectral(raw);
  const double s1 = raw_spec.norm();
  if (!(s1 > 0.0)) throw Error(Errc::degenerate_operator, "problem operator is zero");
  DiscreteOperator op = raw.scaled(1.0 / s1);
  SpectralData spec = raw_spec.scaled(1.0 / s1);

  const Vector sampled = raw.grid().sample(truth);
  if (!sampled.allFinite()) throw Error(Errc::invalid_argument, "truth is not finite on the grid");
  Vector y = spec.project_onto_range(sampled, trunc_tol);
  if (label.empty()) label = std::string(to_string(kind));
  return Problem(std::move(label), std::move(op), std::move(spec), s1, std::move(y));
}

inline Problem make_problem(std::string_view kind, std::size_t n, std::string_view truth_name) {
  return make_problem(parse_problem_kind(kind), n, truth_function(truth_name),
                      std::string(kind) + "/" + std::string(truth_name));
}

/// f_delta with its achieved noise level ||f_delta - f||_h and q_delta = A^* f_delta.
class NoisyData {
 public:
  NoisyData(const DiscreteOperator& op, Vector f_delta, double delta, std::uint64_t seed = 0)
      : f_delta_(std::move(f_delta)), delta_(delta), seed_(seed), q_delta_(op.adjoint_apply(f_delta_)) {
    if (f_delta_.size() != static_cast<Eigen::Index>(op.size()))
      throw Error(Errc::invalid_argument, "data length does not match operator size");
    if (!(delta >= 0.0)) throw Error(Errc::invalid_argument, "noise level must be >= 0");
  }

  const Vector& f_delta() const noexcept { return f_delta_; }
  double delta() const noexcept { return delta_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const Vector& q_delta() const noexcept { return q_delta_; }

 private:
  Vector f_delta_;
  double delta_;
  std::uint64_t seed_;
  Vector q_delta_;
};

/// f_delta = f + delta e/||e||_h for a seeded Gaussian direction e. The stored level is the
/// achieved ||f_delta - f||_h, which equals delta up to rounding.
inline NoisyData add_noise(const Problem& problem, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0)) throw Error(Errc::invalid_argument, "noise level must be >= 0");
  const Vector& f = problem.data();
  if (delta == 0.0) return NoisyData(problem.op(), f, 0.0, seed);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector e(f.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = normal(rng);
  const double h = problem.op().weight();
  Vector f_delta = f + (delta / norm_h(e, h)) * e;
  const double achieved = norm_h(f_delta - f, h);
  return NoisyData(problem.op(), std::move(f_delta), achieved, seed);
}

/// Truncated-SVD pseudo-inverse: sum over s_j > trunc_tol * s_1 of (f, psi_j)_h / s_j * phi_j.
inline Vector minimal_norm_solution(const SpectralData& spec, const Vector& f, double trunc_tol = kDefaultTruncTol) {
  if (!(trunc_tol > 0.0 && trunc_tol < 1.0))
    throw Error(Errc::invalid_argument, "trunc_tol must lie in (0,1)");
  if (!(spec.norm() > 0.0)) throw Error(Errc::degenerate_operator, "pseudo-inverse of the zero operator");
  const auto r = static_cast<Eigen::Index>(spec.rank(trunc_tol));
  const Vector c = spec.left_coefficients(f).head(r).cwiseQuotient(spec.s.head(r));
  return spec.right.leftCols(r) * c;
}

inline Vector minimal_norm_solution(const DiscreteOperator& op, const Vector& f, double trunc_tol = kDefaultTruncTol) {
  return minimal_norm_solution(spectral(op), f, trunc_tol);
}

/// Step of the central difference that balances Mh/2 against delta/h.
inline double stable_step(double delta, double M) { return std::sqrt(2.0 * delta / M); }

/// Guaranteed sup-error sqrt(2 M delta) of the central difference at the balanced step.
inline double stable_error_bound(double delta, double M) { return std::sqrt(2.0 * M * delta); }

/// Central difference [f_delta(x+h) - f_delta(x-h)] / (2h) with h = sqrt(2 delta / M).
template <std::invocable<double> F>
Vector stable_differentiate(F&& f_delta, double delta, double M, const Vector& eval_points) {
  if (!(delta > 0.0) || !(M > 0.0)) throw Error(Errc::invalid_argument, "need delta > 0 and M > 0");
  const double h = stable_step(delta, M);
  Vector out(eval_points.size());
  for (Eigen::Index i = 0; i < eval_points.size(); ++i) {
    const double x = eval_points[i];
    if (x < h || x > 1.0 - h)
      throw Error(Errc::out_of_domain,
                  "x = " + std::to_string(x) + " lies within h = " + std::to_string(h) + " of the boundary");
    out[i] = (f_delta(x + h) - f_delta(x - h)) / (2.0 * h);
  }
  return out;
}

/// One row of the Laplace-Cauchy instability table. Data phi(x) = A_n sin(nx), solution
/// u(x,y) = (A_n/n) sin(nx) sinh(ny). Default columns use A_n = 1/n^2; the *_alt columns
/// use A_n = 1/n.
struct HadamardRow {
  int n = 0;
  double phi_sup = 0.0;
  double dphi_sup = 0.0;
  double u_max = 0.0;
  double phi_sup_alt = 0.0;
  double dphi_sup_alt = 0.0;
  double u_max_alt = 0.0;

  double c1_size() const noexcept { return phi_sup + dphi_sup; }
};

inline std::vector<HadamardRow> hadamard_instability_table(int n_max, double y_eval = 1.0) {
  if (n_max < 1) throw Error(Errc::invalid_argument, "n_max must be >= 1");
  if (!(y_eval > 0.0)) throw Error(Errc::invalid_argument, "y must be > 0");
  std::vector<HadamardRow> rows;
  rows.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    const double dn = n;
    const double growth = std::sinh(dn * y_eval);
    HadamardRow r;
    r.n = n;
    // sup_x |sin(nx)| = 1 and sup_x |n cos(nx)| = n
    const double a = 1.0 / (dn * dn);
    r.phi_sup = a;
    r.dphi_sup = dn * a;
    r.u_max = a / dn * growth;
    const double a_alt = 1.0 / dn;
    r.phi_sup_alt = a_alt;
    r.dphi_sup_alt = dn * a_alt;
    r.u_max_alt = a_alt / dn * growth;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace illposed
