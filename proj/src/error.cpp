#include "ernst/error.hpp"

namespace ernst {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::InvalidSpectralData: return "InvalidSpectralData";
    case ErrorCode::BranchJumpDetected: return "BranchJumpDetected";
    case ErrorCode::ContourCollision: return "ContourCollision";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::RealPartMismatch: return "RealPartMismatch";
    case ErrorCode::PeriodMatrixInvalid: return "PeriodMatrixInvalid";
    case ErrorCode::AbelRealPartUnresolvable: return "AbelRealPartUnresolvable";
    case ErrorCode::RadiusOverflow: return "RadiusOverflow";
    case ErrorCode::PreconditionRealPart: return "PreconditionRealPart";
    case ErrorCode::DegenerateProbe: return "DegenerateProbe";
    case ErrorCode::NoneFound: return "NoneFound";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::ThetaDivisorHit: return "ThetaDivisorHit";
    case ErrorCode::StencilDegenerate: return "StencilDegenerate";
    case ErrorCode::PathTooCoarse: return "PathTooCoarse";
    }
    return "Unknown";
}

}  // namespace ernst
