#pragma once

#include <array>
#include <complex>
#include <string>

#include "g2mp/numerics/complex.hpp"

namespace g2mp {

// 2x2 complex matrix, row major.
struct CMat2 {
  Complex a, b, c, d;

  Complex det() const { return a * d - b * c; }
  CMat2 inverse() const;
};

CMat2 operator*(const CMat2& x, const CMat2& y);
CMat2 operator+(const CMat2& x, const CMat2& y);

// Omega = [[tau1, tau3], [tau3, tau2]] in the Siegel upper half-space.
struct PeriodMatrix {
  Complex tau1, tau2, tau3;

  PeriodMatrix() = default;
  PeriodMatrix(Complex t1, Complex t2, Complex t3)
      : tau1(std::move(t1)), tau2(std::move(t2)), tau3(std::move(t3)) {}

  static PeriodMatrix from(const CMat2& m);
  CMat2 mat() const { return {tau1, tau3, tau3, tau2}; }

  // Im Omega positive definite
  bool in_upper_half_space() const;
  Real im_det() const;
  PeriodMatrix scaled(const Real& s) const { return {tau1 * s, tau2 * s, tau3 * s}; }
  PeriodMatrix scaled(long s) const { return scaled(Real(s)); }
  PeriodMatrix halved() const { return {ldexp(tau1, -1), ldexp(tau2, -1), ldexp(tau3, -1)}; }

  // Double precision copy (tau1, tau2, tau3).
  std::array<std::complex<double>, 3> to_cd() const { return {tau1.to_cd(), tau2.to_cd(), tau3.to_cd()}; }
  static PeriodMatrix from_cd(const std::array<std::complex<double>, 3>& t);

  std::string to_string(int digits = 20) const;
};

// max |entry difference|
Real distance(const PeriodMatrix& x, const PeriodMatrix& y);

}  // namespace g2mp
