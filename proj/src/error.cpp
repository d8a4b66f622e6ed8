#include "g2mp/error.hpp"

namespace g2mp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerate: return "DEGENERATE";
    case ErrorCode::kPrecisionLoss: return "PRECISION_LOSS";
    case ErrorCode::kNoConvergent: return "NO_CONVERGENT";
    case ErrorCode::kIllConditioned: return "ILL_CONDITIONED";
    case ErrorCode::kNumeric: return "NUMERIC";
    case ErrorCode::kBudgetExceeded: return "BUDGET_EXCEEDED";
    case ErrorCode::kNotInGamma0: return "NOT_IN_GAMMA0";
    case ErrorCode::kNonTermination: return "NON_TERMINATION";
    case ErrorCode::kSlowConvergence: return "SLOW_CONVERGENCE";
    case ErrorCode::kVanishingDenominator: return "VANISHING_DENOMINATOR";
    case ErrorCode::kStall: return "STALL";
    case ErrorCode::kBranchAmbiguous: return "BRANCH_AMBIGUOUS";
    case ErrorCode::kVanishing: return "VANISHING";
    case ErrorCode::kProductOfElliptic: return "PRODUCT_OF_ELLIPTIC";
    case ErrorCode::kSingular: return "SINGULAR";
    case ErrorCode::kPathFailure: return "PATH_FAILURE";
    case ErrorCode::kSingularTarget: return "SINGULAR_TARGET";
    case ErrorCode::kPrecision: return "PRECISION";
    case ErrorCode::kNormalizationZero: return "NORMALIZATION_ZERO";
    case ErrorCode::kUnstable: return "UNSTABLE";
    case ErrorCode::kNearDenominator: return "NEAR_DENOMINATOR";
    case ErrorCode::kReject: return "REJECT";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kIo: return "IO";
  }
  return "UNKNOWN";
}

}  // namespace g2mp
