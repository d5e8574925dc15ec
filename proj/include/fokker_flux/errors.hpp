#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace fokker_flux {

enum class ErrorCode {
  invalid_grid,
  shape,
  invalid_initial,
  invalid_model,
  index,
  stability,
  divergence,
  step_failure,
  solver,
  domain,
  fit,
  undefined_constant,
  precondition,
  root_not_found,
  convergence,
  config,
  io,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the library; the code classifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<double> time = std::nullopt)
      : std::runtime_error(message), code_(code), time_(time) {}

  ErrorCode code() const noexcept { return code_; }

  /// Simulation time at which a transient run failed, if applicable.
  std::optional<double> time() const noexcept { return time_; }

 private:
  ErrorCode code_;
  std::optional<double> time_;
};

}  // namespace fokker_flux
