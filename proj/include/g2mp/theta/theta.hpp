#pragma once

#include <array>

#include "g2mp/numerics/complex.hpp"
#include "g2mp/siegel/period_matrix.hpp"
#include "g2mp/siegel/reduction.hpp"
#include "g2mp/symplectic/symplectic.hpp"

namespace g2mp {

// Half-integer characteristic (a/2, b/2) with a, b in {0,1}^2.
struct Characteristic {
  int a0 = 0, a1 = 0, b0 = 0, b1 = 0;

  int index() const { return b0 + 2 * b1 + 4 * a0 + 8 * a1; }
  bool is_even() const { return (a0 * b0 + a1 * b1) % 2 == 0; }
  static Characteristic from_index(int i) { return {(i >> 2) & 1, (i >> 3) & 1, i & 1, (i >> 1) & 1}; }
};

inline constexpr std::array<int, 10> kEvenThetas = {0, 1, 2, 3, 4, 6, 8, 9, 12, 15};

inline bool is_even_index(int i) { return Characteristic::from_index(i).is_even(); }

// theta_i(Omega) for i = 0..15; odd entries are exactly zero.
struct ThetaVector {
  std::array<Complex, 16> values;
  PeriodMatrix omega;

  const Complex& operator[](int i) const { return values[i]; }
};

// d[i][0..2] = d theta_i / d (tau1, tau2, tau3)
struct ThetaDerivs {
  std::array<std::array<Complex, 3>, 16> d;
};

// Lattice sum with truncation error below 2^-(ctx.working_bits()). Runs at
// the context's working precision. SLOW_CONVERGENCE when more than
// max_terms lattice points would be needed.
ThetaVector theta_series_all(const PeriodMatrix& omega, const PrecisionContext& ctx, ThetaDerivs* derivs = nullptr,
                             long max_terms = 400000);
Complex theta_series(const Characteristic& ch, const PeriodMatrix& omega, const PrecisionContext& ctx);

// Squares theta_i(Omega)^2 from theta_0..theta_3 at Omega/2.
std::array<Complex, 16> duplication(const std::array<Complex, 4>& half);

// theta_i(gamma Omega) = kappa(gamma, Omega) zeta8^phase8[i] theta_perm[i](Omega)
// with kappa independent of i.
struct ThetaAction {
  SymplecticMatrix gamma;
  std::array<int, 16> perm{};
  std::array<int, 16> phase8{};
};

ThetaAction theta_action_of(const SymplecticMatrix& gamma);
ThetaAction compose(const ThetaAction& outer, const ThetaAction& inner);

// theta_i(Omega) / theta_0(Omega) for all i, via reduction and transport.
struct ThetaQuotients {
  std::array<Complex, 16> q;
  ReductionResult reduction;
  ThetaVector at_reduced;
  ThetaAction action;  // action of reduction.gamma^-1
};

ThetaQuotients theta_quotients_anywhere(const PeriodMatrix& omega, const PrecisionContext& ctx);

// Quotients theta_i(g W) / theta_0(g W) from theta values at W.
std::array<Complex, 16> transport_quotients(const ThetaAction& act_g, const ThetaVector& at_w);

// b'_i(Omega) = theta_i(Omega/2) / theta_0(Omega/2), i = 1, 2, 3.
std::array<Complex, 3> bprime_of(const PeriodMatrix& omega, const PrecisionContext& ctx);

}  // namespace g2mp
