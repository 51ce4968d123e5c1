#pragma once

// Landweber iteration u_{n+1} = u_n - mu (B u_n - q_delta), u_0 = 0, regularized by the
// stopping index.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "illposed/error.hpp"
#include "illposed/linops.hpp"
#include "illposed/problems.hpp"
#include "illposed/variational.hpp"

namespace illposed {

inline constexpr double kDefaultLandweberStep = 0.9;
inline constexpr std::size_t kDefaultLandweberBudget = 100000;

/// Single-step driver. Holds a reference to the operator, which must outlive it.
class LandweberIteration {
 public:
  LandweberIteration(const DiscreteOperator& op, Vector q, double mu)
      : op_(&op), q_(std::move(q)), mu_(mu), u_(Vector::Zero(static_cast<Eigen::Index>(op.size()))) {}

  void step() {
    u_ -= mu_ * (op_->normal_apply(u_) - q_);
    ++count_;
  }

  const Vector& iterate() const noexcept { return u_; }
  std::size_t count() const noexcept { return count_; }
  double step_size() const noexcept { return mu_; }

 private:
  const DiscreteOperator* op_;
  Vector q_;
  double mu_;
  Vector u_;
  std::size_t count_ = 0;
};

/// Stop at the first n with ||A u_n - f_delta||_h <= C delta.
struct DiscrepancyStop {
  double C = kDefaultMorozovC;
};
/// Run the full budget, keep the iterate with the smallest true error (experiments only).
struct OracleStop {
  Vector truth;
};
struct FixedStop {
  std::size_t n = 0;
};
using LandweberStop = std::variant<DiscrepancyStop, OracleStop, FixedStop>;

struct IterationTrace {
  double mu = 0.0;
  std::vector<double> residual;  ///< index n -> ||A u_n - f_delta||_h
  std::vector<double> error;     ///< index n -> ||u_n - y||_h; empty when no truth is known
  std::size_t stop_index = 0;
};

struct LandweberResult {
  Vector u;
  IterationTrace trace;
  bool budget_exhausted = false;
  std::size_t stop_index() const noexcept { return trace.stop_index; }
};

/// Admissible steps satisfy 0 < mu < 1/||B||.
inline void check_landweber_step(const DiscreteOperator& op, double mu) {
  const double norm_b = std::pow(operator_norm(op), 2);
  if (!(mu > 0.0) || !(mu * norm_b < 1.0))
    throw Error(Errc::invalid_step, "step mu = " + std::to_string(mu) + " outside (0, 1/||B||) with ||B|| = " +
                                        std::to_string(norm_b));
}

inline LandweberResult landweber_run(const DiscreteOperator& op, const NoisyData& data, double mu,
                                     std::size_t n_max, const LandweberStop& stop,
                                     const std::optional<Vector>& truth = std::nullopt) {
  check_landweber_step(op, mu);
  if (n_max < 1) throw Error(Errc::invalid_argument, "iteration budget must be >= 1");

  const Vector* y = nullptr;
  if (const auto* o = std::get_if<OracleStop>(&stop)) y = &o->truth;
  else if (truth) y = &*truth;
  if (y && y->size() != static_cast<Eigen::Index>(op.size()))
    throw Error(Errc::invalid_argument, "truth length does not match operator size");

  std::size_t budget = n_max;
  if (const auto* fixed = std::get_if<FixedStop>(&stop)) budget = fixed->n;
  std::optional<double> target;
  if (const auto* d = std::get_if<DiscrepancyStop>(&stop)) {
    if (!(d->C > 1.0)) throw Error(Errc::invalid_argument, "discrepancy constant C must exceed 1");
    target = d->C * data.delta();
  }

  LandweberResult out;
  out.trace.mu = mu;
  LandweberIteration it(op, data.q_delta(), mu);

  double best_error = std::numeric_limits<double>::infinity();
  auto record = [&] {
    const double r = op.residual(it.iterate(), data.f_delta());
    out.trace.residual.push_back(r);
    if (y) {
      const double e = op.norm_h(it.iterate() - *y);
      out.trace.error.push_back(e);
      if (std::holds_alternative<OracleStop>(stop) && e < best_error) {
        best_error = e;
        out.u = it.iterate();
        out.trace.stop_index = it.count();
      }
    }
    return r;
  };

  double r = record();
  if (target && r <= *target) {
    out.u = it.iterate();
    out.trace.stop_index = 0;
    return out;
  }
  while (it.count() < budget) {
    it.step();
    r = record();
    if (target && r <= *target) {
      out.u = it.iterate();
      out.trace.stop_index = it.count();
      return out;
    }
  }
  if (target) {
    // residuals are nonincreasing, so the last iterate is the best available
    out.budget_exhausted = true;
    out.u = it.iterate();
    out.trace.stop_index = it.count();
  } else if (std::holds_alternative<FixedStop>(stop)) {
    out.u = it.iterate();
    out.trace.stop_index = it.count();
  }
  return out;
}

struct StopBound {
  std::size_t n_star = 0;
  double bound = 0.0;
};

/// argmin_n ||gamma_n|| + n mu delta over an exact-data error sequence; the last index wins ties.
inline StopBound theoretical_stop_bound(std::span<const double> exact_errors, double mu, double delta) {
  if (exact_errors.empty()) throw Error(Errc::invalid_argument, "empty error sequence");
  StopBound best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t n = 0; n < exact_errors.size(); ++n) {
    const double b = exact_errors[n] + static_cast<double>(n) * mu * delta;
    if (b <= best.bound) best = {n, b};
  }
  return best;
}

/// Parses "discrepancy:<C>", "oracle" or "fixed:<n>". The oracle form needs the truth.
inline LandweberStop parse_landweber_stop(std::string_view text, const std::optional<Vector>& truth = std::nullopt) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const bool has_arg = colon != std::string_view::npos;
  const std::string_view arg = has_arg ? text.substr(colon + 1) : std::string_view{};
  if (head == "discrepancy") {
    DiscrepancyStop s;
    if (has_arg) s.C = detail::parse_number(arg, "discrepancy constant");
    if (!(s.C > 1.0)) throw Error(Errc::invalid_argument, "discrepancy constant C must exceed 1");
    return s;
  }
  if (head == "oracle" && !has_arg) {
    if (!truth) throw Error(Errc::invalid_argument, "oracle stop needs the true solution");
    return OracleStop{*truth};
  }
  if (head == "fixed" && has_arg) {
    const double n = detail::parse_number(arg, "iteration count");
    if (!(n >= 0.0) || n != std::floor(n)) throw Error(Errc::invalid_argument, "iteration count must be a whole number");
    return FixedStop{static_cast<std::size_t>(n)};
  }
  throw Error(Errc::invalid_argument, "unknown Landweber stop '" + std::string(text) + "'");
}

}  // namespace illposed
