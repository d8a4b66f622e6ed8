#include "g2mp/numerics/complex.hpp"

#include <algorithm>
#include <ostream>

#include "g2mp/error.hpp"

namespace g2mp {

long Complex::exponent() const { return std::max(re.exponent(), im.exponent()); }

std::string Complex::to_string(int digits) const {
  return "(" + re.to_string(digits) + "," + im.to_string(digits) + ")";
}

void mul_into(Complex& out, const Complex& a, const Complex& b, ComplexScratch& s) {
  mpfr_mul(s.t1.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_mul(s.t2.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  mpfr_mul(s.t3.get(), a.re.get(), b.im.get(), MPFR_RNDN);
  mpfr_mul(s.t4.get(), a.im.get(), b.re.get(), MPFR_RNDN);
  mpfr_sub(out.re.get(), s.t1.get(), s.t2.get(), MPFR_RNDN);
  mpfr_add(out.im.get(), s.t3.get(), s.t4.get(), MPFR_RNDN);
}

void fma_into(Complex& acc, const Complex& a, const Complex& b, ComplexScratch& s) {
  mpfr_mul(s.t1.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_mul(s.t2.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  mpfr_mul(s.t3.get(), a.re.get(), b.im.get(), MPFR_RNDN);
  mpfr_mul(s.t4.get(), a.im.get(), b.re.get(), MPFR_RNDN);
  mpfr_add(acc.re.get(), acc.re.get(), s.t1.get(), MPFR_RNDN);
  mpfr_sub(acc.re.get(), acc.re.get(), s.t2.get(), MPFR_RNDN);
  mpfr_add(acc.im.get(), acc.im.get(), s.t3.get(), MPFR_RNDN);
  mpfr_add(acc.im.get(), acc.im.get(), s.t4.get(), MPFR_RNDN);
}

Complex& Complex::operator*=(const Complex& o) {
  *this = *this * o;
  return *this;
}

Complex& Complex::operator/=(const Complex& o) {
  *this = *this / o;
  return *this;
}

Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }

Complex operator*(const Complex& a, const Complex& b) {
  Complex out;
  ComplexScratch s;
  mul_into(out, a, b, s);
  return out;
}

Complex operator/(const Complex& a, const Complex& b) {
  // scaled to avoid overflow in |b|^2 for extreme exponents
  const long e = b.exponent();
  const Complex bs = ldexp(b, -e);
  const Real den = norm(bs);
  if (den.is_zero()) throw Error(ErrorCode::kNumeric, "complex division by zero");
  Complex num = a * conj(bs);
  num.re /= den;
  num.im /= den;
  return ldexp(num, -e);
}

Complex operator*(const Complex& a, const Real& b) { return {a.re * b, a.im * b}; }
Complex operator*(const Real& a, const Complex& b) { return {a * b.re, a * b.im}; }
Complex operator/(const Complex& a, const Real& b) { return {a.re / b, a.im / b}; }
Complex operator-(const Complex& a) { return {-a.re, -a.im}; }

Complex conj(const Complex& z) { return {z.re, -z.im}; }

Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }

Real abs(const Complex& z) {
  Real r;
  mpfr_hypot(r.get(), z.re.get(), z.im.get(), MPFR_RNDN);
  return r;
}

Complex sqrt(const Complex& z) {
  if (z.is_zero()) return Complex();
  // principal root: re >= 0, sign(im) = sign(z.im)
  const Real m = abs(z);
  Real a = sqrt(ldexp(m + abs(z.re), -1));
  if (z.re.sign() >= 0) {
    Real b = z.im / ldexp(a, 1);
    return {std::move(a), std::move(b)};
  }
  Real b = a;
  if (z.im.sign() < 0) b = -b;
  Real re = z.im / ldexp(b, 1);
  return {std::move(re), std::move(b)};
}

Complex exp(const Complex& z) {
  const Real m = exp(z.re);
  Real s, c;
  mpfr_sin_cos(s.get(), c.get(), z.im.get(), MPFR_RNDN);
  return {m * c, m * s};
}

Complex log(const Complex& z) {
  Real arg;
  mpfr_atan2(arg.get(), z.im.get(), z.re.get(), MPFR_RNDN);
  return {log(abs(z)), std::move(arg)};
}

Complex exp_i_pi(const Complex& z) {
  const Real p = pi();
  // i*pi*(x+iy) = -pi*y + i*pi*x
  return exp(Complex(-(p * z.im), p * z.re));
}

Complex pow(const Complex& z, long n) {
  if (n < 0) return Complex(1) / pow(z, -n);
  Complex result(1);
  Complex base = z;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

Complex mul_i_pow(const Complex& z, int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return z;
    case 1: return {-z.im, z.re};
    case 2: return {-z.re, -z.im};
    default: return {z.im, -z.re};
  }
}

Complex mul_zeta8_pow(const Complex& z, int k) {
  const int kk = ((k % 8) + 8) % 8;
  if (kk % 2 == 0) return mul_i_pow(z, kk / 2);
  // exp(i pi/4) = (1 + i)/sqrt(2)
  const Real h = sqrt(Real(0.5));
  const Complex w = z * Complex(h, h);
  return mul_i_pow(w, (kk - 1) / 2);
}

Complex ldexp(const Complex& z, long e) { return {ldexp(z.re, e), ldexp(z.im, e)}; }

std::ostream& operator<<(std::ostream& os, const Complex& z) { return os << z.to_string(); }

}  // namespace g2mp
