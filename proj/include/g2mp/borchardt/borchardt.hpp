#pragma once

#include <array>

#include "g2mp/numerics/complex.hpp"
#include "g2mp/siegel/period_matrix.hpp"

namespace g2mp {

struct BorchardtState {
  std::array<Complex, 4> u;
};

struct BorchardtStats {
  int iterations = 0;
  int near_ties = 0;  // root choices decided inside the tie tolerance
};

// One step of the genus-2 Borchardt sequence with the canonical root choice.
BorchardtState borchardt_step(const BorchardtState& s, const PrecisionContext& ctx, BorchardtStats* stats = nullptr);

// B2(z1, z2, z3), starting from (1, z1, z2, z3). STALL when the iterates do
// not meet within 4 log2(n_bits) + 64 steps.
Complex borchardt_mean(const Complex& z1, const Complex& z2, const Complex& z3, const PrecisionContext& ctx,
                       BorchardtStats* stats = nullptr);

// Period matrix in F2 from the ten squared quotients b_i = theta_i^2 / theta_0^2
// (indexed 0..15, odd entries ignored). Valid under Conjecture 1; callers
// verify forward.
PeriodMatrix recover_tau(const std::array<Complex, 16>& b, const PrecisionContext& ctx,
                         BorchardtStats* stats = nullptr);

}  // namespace g2mp
