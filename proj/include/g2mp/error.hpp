#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace g2mp {

// Failure categories shared by all modules. Callers switch on the code to
// decide between retrying (new seed, more precision, resampled node) and
// giving up.
enum class ErrorCode {
  kDegenerate,          // interpolation instance simplified; drop and resample
  kPrecisionLoss,       // floating Euclid lost too many bits
  kNoConvergent,        // continued fraction never met the error bound
  kIllConditioned,      // clustered interpolation nodes
  kNumeric,             // generic floating-point sanity failure
  kBudgetExceeded,      // coset enumeration ran past its frontier bound
  kNotInGamma0,         // gamma_p requested for a matrix outside Gamma0(p)
  kNonTermination,      // reduction loop did not settle
  kSlowConvergence,     // theta series needs an excessive radius
  kVanishingDenominator,
  kStall,               // Borchardt iteration not contracting
  kBranchAmbiguous,
  kVanishing,
  kProductOfElliptic,   // h10 ~ 0
  kSingular,
  kPathFailure,
  kSingularTarget,
  kPrecision,           // Newton stagnated above tolerance
  kNormalizationZero,
  kUnstable,
  kNearDenominator,
  kReject,
  kInvalidArgument,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace g2mp
