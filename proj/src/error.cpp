#include "fracsem/error.hpp"

namespace fracsem {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveSpacing: return "NonPositiveSpacing";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::EmptyInterior: return "EmptyInterior";
    case ErrorCode::SpacingMismatch: return "SpacingMismatch";
    case ErrorCode::InvalidDomain: return "InvalidDomain";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::OrderOutOfRange: return "OrderOutOfRange";
    case ErrorCode::NonPositiveRadius: return "NonPositiveRadius";
    case ErrorCode::SingularOverlap: return "SingularOverlap";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::NegativeCoefficient: return "NegativeCoefficient";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::JacobianSingular: return "JacobianSingular";
    case ErrorCode::NonPositiveLambda: return "NonPositiveLambda";
    case ErrorCode::WindowTouchesBoundary: return "WindowTouchesBoundary";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::NotExterior: return "NotExterior";
    case ErrorCode::RankDeficientProbes: return "RankDeficientProbes";
    case ErrorCode::MisfitStagnation: return "MisfitStagnation";
    case ErrorCode::BankMismatch: return "BankMismatch";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::Validation: return "Validation";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace fracsem
