#pragma once

#include <array>
#include <vector>

#include "g2mp/siegel/period_matrix.hpp"
#include "g2mp/symplectic/symplectic.hpp"

namespace g2mp {

struct ReductionResult {
  PeriodMatrix omega_reduced;
  SymplecticMatrix gamma;  // act(gamma, input) == omega_reduced
  int steps = 0;
};

// Symmetric positive definite 2x2 real matrix [[y11, y12], [y12, y22]].
struct RealSym2 {
  double y11, y12, y22;
};

// Returns (tU Y U, U) with 0 <= 2 y12 <= y11 <= y22.
std::pair<RealSym2, Mat2> minkowski_reduce(const RealSym2& y);

// Bottom halves (C, D) tested for the third fundamental-domain condition,
// with a completion to a full symplectic matrix. Pairs with entries in
// {-1, 0, 1}, C != 0, coprime, C tD symmetric, one per left GL2(Z) class.
const std::vector<SymplecticMatrix>& det_candidates();

// Reduces into the fundamental domain. The search runs on double
// approximations; every accepted step is applied exactly at the working
// precision.
ReductionResult reduce_to_fundamental(const PeriodMatrix& omega, int max_steps = 1000);

// Double precision reduction of (tau1, tau2, tau3).
std::pair<std::array<std::complex<double>, 3>, SymplecticMatrix> reduce_to_fundamental(
    const std::array<std::complex<double>, 3>& t, int max_steps = 1000);

bool is_in_fundamental(const PeriodMatrix& omega, const Real& tol);
bool is_in_fundamental(const std::array<std::complex<double>, 3>& t, double tol);

// min over det_candidates() of |det(C Omega + D)|
Real min_candidate_det(const PeriodMatrix& omega);

}  // namespace g2mp
