#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rotcav {

enum class Errc {
  InvalidArgument,
  NonHermitianInput,
  ConvergenceFailure,
  NonPlanarAxis,
  ZeroPlanarRotation,
  ZeroTotalRotation,
  ZeroCoupling,
  PoleEvaluation,
  DomainError,
  GridTooLarge,
  GridTooCoarse,
  NoCrossing,
  StabilityViolation,
  FrameMismatch,
  ConfigError,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NonHermitianInput: return "NonHermitianInput";
    case Errc::ConvergenceFailure: return "ConvergenceFailure";
    case Errc::NonPlanarAxis: return "NonPlanarAxis";
    case Errc::ZeroPlanarRotation: return "ZeroPlanarRotation";
    case Errc::ZeroTotalRotation: return "ZeroTotalRotation";
    case Errc::ZeroCoupling: return "ZeroCoupling";
    case Errc::PoleEvaluation: return "PoleEvaluation";
    case Errc::DomainError: return "DomainError";
    case Errc::GridTooLarge: return "GridTooLarge";
    case Errc::GridTooCoarse: return "GridTooCoarse";
    case Errc::NoCrossing: return "NoCrossing";
    case Errc::StabilityViolation: return "StabilityViolation";
    case Errc::FrameMismatch: return "FrameMismatch";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline void require(bool condition, Errc code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace rotcav
