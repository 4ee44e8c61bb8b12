#include "powexp/errors.hpp"

namespace powexp {

const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::Domain: return "DOMAIN";
    case ErrorCode::Numeric: return "NUMERIC";
    case ErrorCode::TailProvisoViolated: return "TAIL_PROVISO_VIOLATED";
    case ErrorCode::RootsNotRealPositive: return "ROOTS_NOT_REAL_POSITIVE";
    case ErrorCode::WeightsNotPositive: return "WEIGHTS_NOT_POSITIVE";
    case ErrorCode::IllConditioned: return "ILL_CONDITIONED";
    case ErrorCode::PreconditionStep: return "PRECONDITION_STEP";
    case ErrorCode::PreconditionHorizon: return "PRECONDITION_HORIZON";
    case ErrorCode::InvalidSum: return "INVALID_SUM";
    case ErrorCode::Io: return "IO";
    }
    return "UNKNOWN";
}

} // namespace powexp
