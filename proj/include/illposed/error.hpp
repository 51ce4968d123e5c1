#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace illposed {

/// Failure categories surfaced by the library.
enum class Errc {
  invalid_argument,
  invalid_kernel,
  numerical_error,
  degenerate_operator,
  noise_dominates_data,
  no_root,
  invalid_step,
  budget_exhausted,
  out_of_domain,
  config_error,
  io_error,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::invalid_kernel: return "invalid-kernel";
    case Errc::numerical_error: return "numerical-error";
    case Errc::degenerate_operator: return "degenerate-operator";
    case Errc::noise_dominates_data: return "noise-dominates-data";
    case Errc::no_root: return "no-root";
    case Errc::invalid_step: return "invalid-step";
    case Errc::budget_exhausted: return "budget-exhausted";
    case Errc::out_of_domain: return "out-of-domain";
    case Errc::config_error: return "config-error";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace illposed
