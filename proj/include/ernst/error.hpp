#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ernst {

enum class ErrorCode {
    InvalidArgument,
    NotPositiveDefinite,
    SingularMatrix,
    InvalidSpectralData,
    BranchJumpDetected,
    ContourCollision,
    QuadratureNotConverged,
    RealPartMismatch,
    PeriodMatrixInvalid,
    AbelRealPartUnresolvable,
    RadiusOverflow,
    PreconditionRealPart,
    DegenerateProbe,
    NoneFound,
    DegenerateConfiguration,
    ThetaDivisorHit,
    StencilDegenerate,
    PathTooCoarse,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace ernst
