#pragma once

#include <mpfr.h>

#include <cstdint>

namespace g2mp {

// Precision budget for one computation. `n_bits` is the target accuracy,
// `guard_bits` are spent on error growth, `n_low_bits` drives the cheap
// tracking phases (path following, branch decisions).
struct PrecisionContext {
  int n_bits = 256;
  int guard_bits = 64;
  int n_low_bits = 128;

  PrecisionContext() = default;
  PrecisionContext(int bits, int guard, int low);

  // Bits used for the actual MPFR variables.
  int working_bits() const { return n_bits + guard_bits; }
  int low_working_bits() const { return n_low_bits + guard_bits; }

  PrecisionContext doubled() const;
  PrecisionContext low() const;

  static PrecisionContext for_bits(int bits);
};

// Precision (in bits) given to freshly constructed Real values on this thread.
mpfr_prec_t working_precision();
void set_working_precision(mpfr_prec_t bits);

// Scoped override of the thread's working precision.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(mpfr_prec_t bits) : saved_(working_precision()) {
    set_working_precision(bits);
  }
  explicit PrecisionGuard(const PrecisionContext& ctx)
      : PrecisionGuard(ctx.working_bits()) {}
  ~PrecisionGuard() { set_working_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  mpfr_prec_t saved_;
};

}  // namespace g2mp
