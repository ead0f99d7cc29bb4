#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cdlab {

/// Failure classes raised by the library. The CLI maps each class onto a
/// distinct exit status, so new kinds must be added to exit_status() too.
enum class ErrorKind {
  InvalidField,
  Configuration,
  SupportClipping,
  Stability,
  BlowUp,
  Admissibility,
  Domain,
  GridMismatch,
  GridCoverage,
  BracketNotFound,
  NoConvergence,
  Regime,
  Fit,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidField: return "invalid field";
    case ErrorKind::Configuration: return "configuration error";
    case ErrorKind::SupportClipping: return "support clipping";
    case ErrorKind::Stability: return "stability error";
    case ErrorKind::BlowUp: return "blow-up";
    case ErrorKind::Admissibility: return "admissibility error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::GridMismatch: return "grid mismatch";
    case ErrorKind::GridCoverage: return "grid coverage";
    case ErrorKind::BracketNotFound: return "bracket not found";
    case ErrorKind::NoConvergence: return "no convergence";
    case ErrorKind::Regime: return "regime error";
    case ErrorKind::Fit: return "fit error";
  }
  return "error";
}

}  // namespace cdlab
