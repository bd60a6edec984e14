#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fracsem {

enum class ErrorCode {
  NonPositiveSpacing,
  TruncationTooSmall,
  EmptyInterior,
  SpacingMismatch,
  InvalidDomain,
  NonFiniteSample,
  OrderOutOfRange,
  NonPositiveRadius,
  SingularOverlap,
  GridMismatch,
  NonFiniteValue,
  InvalidRange,
  UnknownModel,
  NegativeCoefficient,
  SingularSystem,
  NewtonDiverged,
  JacobianSingular,
  NonPositiveLambda,
  WindowTouchesBoundary,
  EmptyWindow,
  NotExterior,
  RankDeficientProbes,
  MisfitStagnation,
  BankMismatch,
  ConfigParse,
  Validation,
};

std::string_view to_string(ErrorCode code);

// Every library failure carries a machine-readable code; the message is for humans.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace fracsem
