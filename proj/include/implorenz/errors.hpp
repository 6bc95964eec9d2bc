#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace implorenz {

/// Failure modes of the numerical pipeline. Each maps to a stable
/// machine-readable name used by the CLI error objects.
enum class ErrorKind {
  StepFailure,     ///< integrator step size underflowed
  Escape,          ///< state left the trapping ball
  NoReturn,        ///< no section hit within the allowed flight time
  SingularInput,   ///< point on (or inside the guard band of) the singular line
  OutOfSection,    ///< displaced point left [-1,1]^2
  NotInFlowBox,    ///< backward flow did not reach the section within t0
  ConeEscape,      ///< tangent vector left the unstable cone
  DegenerateRoof,  ///< mean return time is not positive
  FamilyMismatch,  ///< measure evaluations over different test families
  Unstable,        ///< basin count changed under seed doubling
};

std::string_view to_string(ErrorKind kind);

class NumericalError : public std::runtime_error {
 public:
  NumericalError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Invalid parameters or configuration; never a numerical failure.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace implorenz
