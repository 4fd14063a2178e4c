#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "gbm/types.hpp"

namespace gbm {

enum class ErrorKind {
  InvalidArgument,
  AsymmetricMode,
  NonFinite,
  EllipticityViolation,
  NoConvergence,
  NegativeEigenvalue,
  NegativeTime,
  NonpositiveTime,
  AliasRisk,
  EnumerationTooLarge,
  LengthMismatch,
  ExitTimeout,
  NoBoundary,
  StabilityViolation,
  ConfigError,
  IoError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::AsymmetricMode: return "AsymmetricMode";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::EllipticityViolation: return "EllipticityViolation";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorKind::NegativeTime: return "NegativeTime";
    case ErrorKind::NonpositiveTime: return "NonpositiveTime";
    case ErrorKind::AliasRisk: return "AliasRisk";
    case ErrorKind::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::ExitTimeout: return "ExitTimeout";
    case ErrorKind::NoBoundary: return "NoBoundary";
    case ErrorKind::StabilityViolation: return "StabilityViolation";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when a mode matrix with all alpha_i != 0 is not positive definite.
class EllipticityViolation : public Error {
 public:
  EllipticityViolation(MultiIndex alpha, double lambda_min, const std::string& what)
      : Error(ErrorKind::EllipticityViolation, what),
        alpha_(std::move(alpha)),
        lambda_min_(lambda_min) {}

  const MultiIndex& alpha() const noexcept { return alpha_; }
  double lambda_min() const noexcept { return lambda_min_; }

 private:
  MultiIndex alpha_;
  double lambda_min_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace gbm
