#pragma once

// Tikhonov regularization u = (A^*A + alpha)^{-1} A^* f_delta with a-priori and
// discrepancy-principle parameter rules.

#include <cmath>
#include <cstdio>
#include <type_traits>
#include <string>
#include <string_view>
#include <variant>

#include "illposed/error.hpp"
#include "illposed/linops.hpp"
#include "illposed/problems.hpp"
#include "illposed/roots.hpp"

namespace illposed {

inline constexpr double kDefaultAprioriExponent = 2.0 / 3.0;
inline constexpr double kDefaultMorozovC = 1.5;

/// Minimizer of ||Au - f_delta||_h^2 + alpha ||u||_h^2.
inline Vector tikhonov_solve(const DiscreteOperator& op, const Vector& f_delta, double alpha) {
  if (!(alpha > 0.0)) throw Error(Errc::invalid_argument, "Tikhonov needs alpha > 0");
  return resolvent_solve(op, alpha, op.adjoint_apply(f_delta));
}

/// The Tikhonov functional ||Au - f||_h^2 + alpha ||u||_h^2.
inline double tikhonov_functional(const DiscreteOperator& op, const Vector& f, double alpha, const Vector& u) {
  const double r = op.residual(u, f);
  const double nu = op.norm_h(u);
  return r * r + alpha * nu * nu;
}

/// alpha = delta^exponent; exponent in (0,1) gives alpha -> 0 and delta/alpha -> 0.
inline double apriori_alpha(double delta, double exponent = kDefaultAprioriExponent) {
  if (!(exponent > 0.0 && exponent < 1.0))
    throw Error(Errc::invalid_argument, "a-priori exponent must lie in (0,1)");
  if (!(delta > 0.0)) throw Error(Errc::invalid_argument, "a-priori rule needs delta > 0");
  return std::pow(delta, exponent);
}

struct MorozovResult {
  double alpha = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

inline constexpr double kMorozovLogAlphaMin = -14.0;
inline constexpr double kMorozovLogAlphaMax = 4.0;

/// Root of ||A u_alpha - f_delta||_h = C delta. The residual is increasing in alpha, so the
/// root is unique and bisection on log10(alpha) in [-14, 4] finds it.
inline MorozovResult morozov_alpha(const DiscreteOperator& op, const Vector& f_delta, double delta,
                                   double C = kDefaultMorozovC, double rel_tol = 1e-10) {
  if (!(C > 1.0)) throw Error(Errc::invalid_argument, "discrepancy constant C must exceed 1");
  if (!(delta > 0.0)) throw Error(Errc::invalid_argument, "discrepancy principle needs delta > 0");
  const double target = C * delta;
  if (op.norm_h(f_delta) <= target)
    throw Error(Errc::noise_dominates_data, "||f_delta|| <= C delta");

  auto residual = [&](double alpha) { return op.residual(tikhonov_solve(op, f_delta, alpha), f_delta); };

  const double floor = residual(std::pow(10.0, kMorozovLogAlphaMin));
  if (floor > target)
    throw Error(Errc::no_root, "residual at alpha = 1e-14 is " + std::to_string(floor) + " > C delta = " +
                                   std::to_string(target));
  double hi_exp = kMorozovLogAlphaMax;
  while (residual(std::pow(10.0, hi_exp)) < target && hi_exp < 16.0) hi_exp += 2.0;

  const auto root = bisect_log10(residual, target, kMorozovLogAlphaMin, hi_exp, true, rel_tol);
  return {root.x, root.value, root.iterations};
}

/// Parameter choice rule for Tikhonov.
struct AprioriRule {
  double exponent = kDefaultAprioriExponent;
};
struct MorozovRule {
  double C = kDefaultMorozovC;
};
struct FixedAlpha {
  double alpha = 0.0;
};
using AlphaRule = std::variant<AprioriRule, MorozovRule, FixedAlpha>;

namespace detail {

inline double parse_number(std::string_view text, std::string_view what) {
  try {
    std::size_t used = 0;
    const std::string s(text);
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::invalid_argument, "cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
}

}  // namespace detail

/// Parses "apriori:<p>", "morozov:<C>" or "fixed:<alpha>"; bare "apriori"/"morozov" take defaults.
inline AlphaRule parse_alpha_rule(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const bool has_arg = colon != std::string_view::npos;
  const std::string_view arg = has_arg ? text.substr(colon + 1) : std::string_view{};
  if (head == "apriori") {
    AprioriRule r;
    if (has_arg) r.exponent = detail::parse_number(arg, "a-priori exponent");
    if (!(r.exponent > 0.0 && r.exponent < 1.0))
      throw Error(Errc::invalid_argument, "a-priori exponent must lie in (0,1)");
    return r;
  }
  if (head == "morozov") {
    MorozovRule r;
    if (has_arg) r.C = detail::parse_number(arg, "discrepancy constant");
    if (!(r.C > 1.0)) throw Error(Errc::invalid_argument, "discrepancy constant C must exceed 1");
    return r;
  }
  if (head == "fixed" && has_arg) {
    FixedAlpha r{detail::parse_number(arg, "alpha")};
    if (!(r.alpha > 0.0)) throw Error(Errc::invalid_argument, "fixed alpha must be > 0");
    return r;
  }
  throw Error(Errc::invalid_argument, "unknown alpha rule '" + std::string(text) + "'");
}

inline std::string to_string(const AlphaRule& rule) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  return std::visit(
      [&](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, AprioriRule>) return "apriori:" + num(r.exponent);
        else if constexpr (std::is_same_v<T, MorozovRule>) return "morozov:" + num(r.C);
        else return "fixed:" + num(r.alpha);
      },
      rule);
}

struct TikhonovResult {
  Vector u;
  double alpha = 0.0;
  double residual = 0.0;
  int iterations = 0;  ///< bisection steps for the discrepancy rule, 0 otherwise
};

inline TikhonovResult tikhonov_regularize(const DiscreteOperator& op, const NoisyData& data, const AlphaRule& rule) {
  TikhonovResult out;
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, AprioriRule>) {
          out.alpha = apriori_alpha(data.delta(), r.exponent);
        } else if constexpr (std::is_same_v<T, MorozovRule>) {
          const auto m = morozov_alpha(op, data.f_delta(), data.delta(), r.C);
          out.alpha = m.alpha;
          out.iterations = m.iterations;
        } else {
          out.alpha = r.alpha;
        }
      },
      rule);
  out.u = tikhonov_solve(op, data.f_delta(), out.alpha);
  out.residual = op.residual(out.u, data.f_delta());
  return out;
}

}  // namespace illposed
