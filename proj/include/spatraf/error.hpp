#pragma once

#include <stdexcept>
#include <string>

namespace spatraf {

enum class ErrorCode {
  InvalidArgument = 1,
  DegenerateInput,
  TooFewPoints,
  EmptyPattern,
  EmptyAttractorSet,
  IndexOutOfRange,
  NumericalNonConvergence,
  Infeasible,
  Io,
  Parse,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Raised by calibration inversion; carries the closest attainable statistics.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double nearest_c, double nearest_rho)
      : Error(ErrorCode::Infeasible, what),
        nearest_c_(nearest_c),
        nearest_rho_(nearest_rho) {}

  double nearest_c() const { return nearest_c_; }
  double nearest_rho() const { return nearest_rho_; }

 private:
  double nearest_c_;
  double nearest_rho_;
};

}  // namespace spatraf
