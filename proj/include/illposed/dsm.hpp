#pragma once

// Dynamical Systems Method for linear problems:
//   u'(t) = -u(t) + (B + eps(t))^{-1} q_delta,   u(0) = u0,
// integrated with exponential steps on a geometric time grid, plus the two stopping rules
// (root of 2 sqrt(eps(t)) = delta^b, and the DSM discrepancy principle).

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "illposed/error.hpp"
#include "illposed/linops.hpp"
#include "illposed/problems.hpp"
#include "illposed/roots.hpp"
#include "illposed/variational.hpp"

namespace illposed {

template <class S>
concept Schedule = requires(const S& s, double t) {
  { s(t) } -> std::convertible_to<double>;
};

/// eps(t) = c1 / (c0 + t)^p with c0, c1 > 0 and p in (0,1): positive, strictly decreasing,
/// tends to zero, and has a divergent integral on [0, inf).
class EpsilonSchedule {
 public:
  EpsilonSchedule(double c0 = 1.0, double c1 = 1.0, double p = 0.5) : c0_(c0), c1_(c1), p_(p) {
    if (!(c0 > 0.0) || !(c1 > 0.0)) throw Error(Errc::invalid_argument, "schedule needs c0 > 0 and c1 > 0");
    if (!(p > 0.0 && p < 1.0)) throw Error(Errc::invalid_argument, "schedule exponent p must lie in (0,1)");
  }

  double operator()(double t) const { return c1_ / std::pow(c0_ + t, p_); }

  /// Solves eps(t) = eps for t; negative when eps >= eps(0).
  double time_for(double eps) const { return std::pow(c1_ / eps, 1.0 / p_) - c0_; }

  double c0() const noexcept { return c0_; }
  double c1() const noexcept { return c1_; }
  double p() const noexcept { return p_; }

  friend bool operator==(const EpsilonSchedule&, const EpsilonSchedule&) = default;

 private:
  double c0_;
  double c1_;
  double p_;
};

/// Frozen eps(t) = value; value = 0 is allowed when B is positive definite. Test use.
struct ConstantEpsilon {
  double value = 0.0;
  double operator()(double) const noexcept { return value; }
};

/// Parses "c0=<v>,c1=<v>,p=<v>"; omitted keys keep their defaults (1, 1, 0.5).
inline EpsilonSchedule parse_schedule(std::string_view text) {
  double c0 = 1.0, c1 = 1.0, p = 0.5;
  std::size_t pos = 0;
  while (pos <= text.size() && !text.empty()) {
    const auto comma = text.find(',', pos);
    const std::string_view item = text.substr(pos, comma == std::string_view::npos ? text.size() - pos : comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::invalid_argument, "schedule item '" + std::string(item) + "' is not key=value");
    const std::string_view key = item.substr(0, eq);
    const double v = detail::parse_number(item.substr(eq + 1), "schedule value");
    if (key == "c0") c0 = v;
    else if (key == "c1") c1 = v;
    else if (key == "p") p = v;
    else throw Error(Errc::invalid_argument, "unknown schedule key '" + std::string(key) + "'");
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return EpsilonSchedule(c0, c1, p);
}

inline std::string to_string(const EpsilonSchedule& s) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "c0=%.17g,c1=%.17g,p=%.17g", s.c0(), s.c1(), s.p());
  return buf;
}

struct DsmOptions {
  double first_step = 0.1;
  double ratio = 1.2;
  /// Extra times in (0, t_end) forced onto the grid.
  std::vector<double> checkpoints;
  /// When set, errors ||u(t_k) - truth||_h are recorded.
  std::optional<Vector> truth;
};

struct DsmTrajectory {
  std::vector<double> times;
  std::vector<double> epsilon;  ///< eps(t_k)
  std::vector<Vector> snapshots;
  std::vector<double> residual;  ///< ||A u(t_k) - f_delta||_h
  std::vector<double> error;     ///< empty unless a truth was supplied
  double stop_time = 0.0;
  std::string step_policy;

  const Vector& final_state() const { return snapshots.back(); }

  /// Index of the grid point equal to t, if any.
  std::optional<std::size_t> index_of(double t) const {
    const auto it = std::find(times.begin(), times.end(), t);
    if (it == times.end()) return std::nullopt;
    return static_cast<std::size_t>(it - times.begin());
  }
};

/// 0, then steps first_step * ratio^k, capped at t_end, merged with the checkpoints.
inline std::vector<double> geometric_time_grid(double t_end, double first_step, double ratio,
                                               const std::vector<double>& checkpoints = {}) {
  if (!(t_end > 0.0)) throw Error(Errc::invalid_argument, "t_end must be > 0");
  if (!(first_step > 0.0) || !(ratio >= 1.0)) throw Error(Errc::invalid_argument, "bad time-step policy");
  std::vector<double> grid{0.0};
  double dt = first_step;
  double t = 0.0;
  while (t + dt < t_end) {
    t += dt;
    grid.push_back(t);
    dt *= ratio;
  }
  grid.push_back(t_end);
  for (double c : checkpoints)
    if (c > 0.0 && c < t_end) grid.push_back(c);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

/// Exponential step: u_{k+1} = u_k e^{-D} + (1 - e^{-D}) (B + eps(t_k + D/2))^{-1} q_delta.
template <Schedule S>
DsmTrajectory dsm_evolve(const DiscreteOperator& op, const Vector& f_delta, const S& schedule, double t_end,
                         const Vector& u0, const DsmOptions& options = {}) {
  const auto n = static_cast<Eigen::Index>(op.size());
  if (f_delta.size() != n || u0.size() != n) throw Error(Errc::invalid_argument, "vector length mismatch");
  if (options.truth && options.truth->size() != n) throw Error(Errc::invalid_argument, "truth length mismatch");

  DsmTrajectory out;
  out.times = geometric_time_grid(t_end, options.first_step, options.ratio, options.checkpoints);
  char policy[96];
  std::snprintf(policy, sizeof policy, "exponential-midpoint geometric first=%g ratio=%g", options.first_step,
                options.ratio);
  out.step_policy = policy;
  out.stop_time = t_end;

  const Vector q = op.adjoint_apply(f_delta);
  Vector u = u0;
  auto record = [&](double t) {
    if (!u.allFinite()) throw Error(Errc::numerical_error, "non-finite DSM state at t = " + std::to_string(t));
    out.epsilon.push_back(static_cast<double>(schedule(t)));
    out.residual.push_back(op.residual(u, f_delta));
    if (options.truth) out.error.push_back(op.norm_h(u - *options.truth));
    out.snapshots.push_back(u);
  };

  record(0.0);
  for (std::size_t k = 0; k + 1 < out.times.size(); ++k) {
    const double t = out.times[k];
    const double dt = out.times[k + 1] - t;
    const double decay = std::exp(-dt);
    const double gain = -std::expm1(-dt);
    const double eps = static_cast<double>(schedule(t + 0.5 * dt));
    const Vector g = detail::shifted_normal_solve(op, eps, q);
    u = decay * u + gain * g;
    record(out.times[k + 1]);
  }
  return out;
}

template <Schedule S>
DsmTrajectory dsm_evolve(const DiscreteOperator& op, const Vector& f_delta, const S& schedule, double t_end,
                         const DsmOptions& options = {}) {
  return dsm_evolve(op, f_delta, schedule, t_end, Vector::Zero(static_cast<Eigen::Index>(op.size())), options);
}

struct DsmStopTime {
  double t = 0.0;
  double epsilon = 0.0;
  bool at_boundary = false;  ///< the rule was already met at t = 0
  double residual = std::numeric_limits<double>::quiet_NaN();
};

/// Target eps* = delta^{2b} / 4 of the root rule 2 sqrt(eps(t)) = delta^b.
inline double stop_root_target(double delta, double b) { return std::pow(delta, 2.0 * b) / 4.0; }

inline void check_root_args(double delta, double b) {
  if (!(delta > 0.0)) throw Error(Errc::invalid_argument, "stopping rule needs delta > 0");
  if (!(b > 0.0 && b < 1.0)) throw Error(Errc::invalid_argument, "stopping exponent b must lie in (0,1)");
}

/// Root of 2 sqrt(eps(t)) = delta^b for a decreasing schedule, by bisection in t.
template <Schedule S>
DsmStopTime dsm_stop_root_bisect(const S& schedule, double delta, double b) {
  check_root_args(delta, b);
  const double target = stop_root_target(delta, b);
  if (static_cast<double>(schedule(0.0)) <= target) return {0.0, static_cast<double>(schedule(0.0)), true};
  double lo = 0.0;
  double hi = 1.0;
  while (static_cast<double>(schedule(hi)) > target) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw Error(Errc::no_root, "schedule does not decay below the stopping target");
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (static_cast<double>(schedule(mid)) > target ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  return {t, static_cast<double>(schedule(t)), false};
}

/// Closed form for the power schedule: t = (4 c1 / delta^{2b})^{1/p} - c0, clamped at 0.
inline DsmStopTime dsm_stop_root(const EpsilonSchedule& schedule, double delta, double b) {
  check_root_args(delta, b);
  const double target = stop_root_target(delta, b);
  if (target >= schedule(0.0)) return {0.0, schedule(0.0), true};
  const double t = std::max(0.0, schedule.time_for(target));
  return {t, schedule(t), false};
}

/// Stop where ||A (B + eps)^{-1} A^* f_delta - f_delta||_h = C delta; the residual increases
/// with eps, so eps is found by bisection on log10(eps) and mapped back to t.
inline DsmStopTime dsm_stop_discrepancy(const DiscreteOperator& op, const Vector& f_delta, double delta, double C,
                                        const EpsilonSchedule& schedule, double rel_tol = 1e-13) {
  if (!(C >= 1.0)) throw Error(Errc::invalid_argument, "DSM discrepancy constant must be >= 1");
  if (!(delta > 0.0)) throw Error(Errc::invalid_argument, "discrepancy principle needs delta > 0");
  const double target = C * delta;
  if (op.norm_h(f_delta) <= target) throw Error(Errc::noise_dominates_data, "||f_delta|| <= C delta");

  const Vector q = op.adjoint_apply(f_delta);
  auto residual = [&](double eps) { return op.residual(resolvent_solve(op, eps, q), f_delta); };
  const double floor = residual(1e-14);
  if (floor > target)
    throw Error(Errc::no_root, "residual at eps = 1e-14 is " + std::to_string(floor) + " > C delta = " +
                                   std::to_string(target));
  double hi_exp = 4.0;
  while (residual(std::pow(10.0, hi_exp)) < target && hi_exp < 16.0) hi_exp += 2.0;
  const auto root = bisect_log10(residual, target, -14.0, hi_exp, true, rel_tol);

  DsmStopTime out;
  out.epsilon = root.x;
  out.residual = root.value;
  const double t = schedule.time_for(root.x);
  out.at_boundary = !(t > 0.0);
  out.t = std::max(0.0, t);
  return out;
}

/// Stopping rules for a complete DSM solve.
struct RootStop {
  double b = 0.5;
};
struct DsmDiscrepancyStop {
  double C = 1.0;
};
struct TimeStop {
  double t = 0.0;
};
using DsmStop = std::variant<RootStop, DsmDiscrepancyStop, TimeStop>;

/// Parses "root:<b>", "discrepancy:<C>" or "time:<t>".
inline DsmStop parse_dsm_stop(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const bool has_arg = colon != std::string_view::npos;
  const std::string_view arg = has_arg ? text.substr(colon + 1) : std::string_view{};
  if (head == "root") {
    RootStop s;
    if (has_arg) s.b = detail::parse_number(arg, "stopping exponent");
    if (!(s.b > 0.0 && s.b < 1.0)) throw Error(Errc::invalid_argument, "stopping exponent b must lie in (0,1)");
    return s;
  }
  if (head == "discrepancy") {
    DsmDiscrepancyStop s;
    if (has_arg) s.C = detail::parse_number(arg, "discrepancy constant");
    if (!(s.C >= 1.0)) throw Error(Errc::invalid_argument, "DSM discrepancy constant must be >= 1");
    return s;
  }
  if (head == "time" && has_arg) {
    TimeStop s{detail::parse_number(arg, "stop time")};
    if (!(s.t >= 0.0)) throw Error(Errc::invalid_argument, "stop time must be >= 0");
    return s;
  }
  throw Error(Errc::invalid_argument, "unknown DSM stop '" + std::string(text) + "'");
}

struct DsmResult {
  Vector u;
  DsmStopTime stop;
  DsmTrajectory trajectory;
};

/// Chooses t_delta by the stop rule, then evolves from u0 = 0 to t_delta.
inline DsmResult dsm_solve(const DiscreteOperator& op, const NoisyData& data, const EpsilonSchedule& schedule,
                           const DsmStop& stop, const DsmOptions& options = {}) {
  DsmResult out;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, RootStop>) {
          out.stop = dsm_stop_root(schedule, data.delta(), s.b);
        } else if constexpr (std::is_same_v<T, DsmDiscrepancyStop>) {
          out.stop = dsm_stop_discrepancy(op, data.f_delta(), data.delta(), s.C, schedule);
        } else {
          out.stop = {s.t, schedule(s.t), s.t == 0.0};
        }
      },
      stop);

  const Vector u0 = Vector::Zero(static_cast<Eigen::Index>(op.size()));
  if (out.stop.t > 0.0) {
    out.trajectory = dsm_evolve(op, data.f_delta(), schedule, out.stop.t, u0, options);
  } else {
    out.trajectory.times = {0.0};
    out.trajectory.epsilon = {schedule(0.0)};
    out.trajectory.snapshots = {u0};
    out.trajectory.residual = {op.residual(u0, data.f_delta())};
    if (options.truth) out.trajectory.error = {op.norm_h(u0 - *options.truth)};
  }
  out.u = out.trajectory.final_state();
  return out;
}

}  // namespace illposed
