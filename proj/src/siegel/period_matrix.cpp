#include "g2mp/siegel/period_matrix.hpp"

#include "g2mp/error.hpp"

namespace g2mp {

CMat2 CMat2::inverse() const {
  const Complex dt = det();
  if (dt.is_zero()) throw Error(ErrorCode::kNumeric, "singular 2x2 matrix");
  const Complex inv = Complex(1) / dt;
  return {d * inv, -(b * inv), -(c * inv), a * inv};
}

CMat2 operator*(const CMat2& x, const CMat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

CMat2 operator+(const CMat2& x, const CMat2& y) { return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d}; }

PeriodMatrix PeriodMatrix::from(const CMat2& m) {
  return {m.a, m.d, ldexp(m.b + m.c, -1)};
}

bool PeriodMatrix::in_upper_half_space() const {
  return tau1.im.sign() > 0 && im_det().sign() > 0;
}

Real PeriodMatrix::im_det() const { return tau1.im * tau2.im - tau3.im * tau3.im; }

PeriodMatrix PeriodMatrix::from_cd(const std::array<std::complex<double>, 3>& t) {
  return {Complex(t[0]), Complex(t[1]), Complex(t[2])};
}

std::string PeriodMatrix::to_string(int digits) const {
  return "[" + tau1.to_string(digits) + ", " + tau3.to_string(digits) + "; " + tau3.to_string(digits) + ", " +
         tau2.to_string(digits) + "]";
}

Real distance(const PeriodMatrix& x, const PeriodMatrix& y) {
  return max(abs(x.tau1 - y.tau1), max(abs(x.tau2 - y.tau2), abs(x.tau3 - y.tau3)));
}

}  // namespace g2mp
