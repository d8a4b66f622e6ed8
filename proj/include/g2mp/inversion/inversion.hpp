#pragma once

#include <array>
#include <complex>
#include <optional>

#include "g2mp/invariants/invariants.hpp"
#include "g2mp/siegel/period_matrix.hpp"
#include "g2mp/symplectic/symplectic.hpp"

namespace g2mp {

enum class InversionMethod { kBorchardtDirect, kNewtonContinuation };

struct InversionResult {
  PeriodMatrix omega;
  Real residual;  // max_i |f_i(omega) - target_i| / max(1, |target|)
  int path_length = 0;
  InversionMethod method = InversionMethod::kNewtonContinuation;
};

// Values f_i and partials df_i / d(tau1, tau2, tau3) of an invariant map.
struct InvariantJet {
  std::array<Complex, 3> f;
  std::array<std::array<Complex, 3>, 3> jac;  // jac[i][m] = d f_i / d tau_m
};

// Jet of the invariant system at omega, from the series evaluated directly at
// omega (Igusa, Streng) or at omega / 2 (b'). Omega should be close enough
// to F2 for the direct series to be cheap.
InvariantJet invariant_jet(const PeriodMatrix& omega, InvariantKind kind, const PrecisionContext& ctx);

// Solves m x = rhs; SINGULAR when a pivot vanishes against 2^(-prec/2).
std::array<Complex, 3> solve3(std::array<std::array<Complex, 3>, 3> m, std::array<Complex, 3> rhs);

struct InversionOptions {
  bool try_borchardt = true;  // b' targets only
  int max_seeds = 16;
};

// Omega with f(Omega) = target. Newton continuation on a straight segment in
// invariant space, tracked at n_low_bits and polished at n_bits; the optional
// seed is tried before the fixed seed pool.
InversionResult invert_invariants(const InvariantTriple& target, const std::optional<PeriodMatrix>& seed,
                                  const PrecisionContext& ctx, const InversionOptions& opt = {});

// b' -> b -> recover_tau, verified forward. REJECT when the result does not
// reproduce the target.
InversionResult borchardt_fast_path(const InvariantTriple& target, const PrecisionContext& ctx);

// The fixed seed pool: (tau1, tau2, tau3) of 16 points of F2.
const std::array<std::array<std::complex<double>, 3>, 16>& inversion_seeds();

}  // namespace g2mp
