#ifndef WSLAB_ERRORS_HPP
#define WSLAB_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace wslab {

enum class ErrorCode {
  invalid_dimension,
  invalid_partition,
  invalid_model,
  invalid_argument,
  ill_conditioned_coupling,
  absorption_required,
  non_contraction_input,
  out_of_support,
  unsupported_representation,
  quadrature_failure,
  unsupported_field,
  infeasible_support,
  solver_diverged,
  support_ansatz_violated,
  mu_out_of_range,
  invalid_state,
  insufficient_input,
  outside_asymptotic_regime,
  sample_size_error,
  invalid_config,
  io_error,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
  switch (code) {
    case ErrorCode::invalid_dimension: return "invalid-dimension";
    case ErrorCode::invalid_partition: return "invalid-partition";
    case ErrorCode::invalid_model: return "invalid-model";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::ill_conditioned_coupling: return "ill-conditioned-coupling";
    case ErrorCode::absorption_required: return "absorption-required";
    case ErrorCode::non_contraction_input: return "non-contraction-input";
    case ErrorCode::out_of_support: return "out-of-support";
    case ErrorCode::unsupported_representation: return "unsupported-representation";
    case ErrorCode::quadrature_failure: return "quadrature-failure";
    case ErrorCode::unsupported_field: return "unsupported-field";
    case ErrorCode::infeasible_support: return "infeasible-support";
    case ErrorCode::solver_diverged: return "solver-diverged";
    case ErrorCode::support_ansatz_violated: return "support-ansatz-violated";
    case ErrorCode::mu_out_of_range: return "mu-out-of-range";
    case ErrorCode::invalid_state: return "invalid-state";
    case ErrorCode::insufficient_input: return "insufficient-input";
    case ErrorCode::outside_asymptotic_regime: return "outside-asymptotic-regime";
    case ErrorCode::sample_size_error: return "sample-size-error";
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

/// Exception carrying a stable, machine-readable error code.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const noexcept { return to_string(code_); }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message)
{
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message)
{
  if (!condition) fail(code, message);
}

} // namespace wslab

#endif // WSLAB_ERRORS_HPP
