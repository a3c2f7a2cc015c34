#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mms {

enum class ErrorCode {
  InvalidInput,
  ParseError,
  DisconnectedGraph,
  NonpositiveWeight,
  NegativeInput,
  NoFeasiblePath,
  TooLarge,
  Inadmissible,
  InvalidExponent,
  WindowViolated,
  NoPathBound,
  GapInfeasible,
  NotUpperGradient,
  DegenerateDenominator,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::NonpositiveWeight: return "NonpositiveWeight";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::NoFeasiblePath: return "NoFeasiblePath";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::Inadmissible: return "Inadmissible";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::WindowViolated: return "WindowViolated";
    case ErrorCode::NoPathBound: return "NoPathBound";
    case ErrorCode::GapInfeasible: return "GapInfeasible";
    case ErrorCode::NotUpperGradient: return "NotUpperGradient";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
  }
  return "Unknown";
}

}  // namespace mms
