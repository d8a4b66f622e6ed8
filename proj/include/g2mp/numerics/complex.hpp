#pragma once

#include <complex>
#include <iosfwd>
#include <string>

#include "g2mp/numerics/real.hpp"

namespace g2mp {

// Arbitrary-precision complex number; components follow Real's precision
// rules.
struct Complex {
  Real re;
  Real im;

  Complex() = default;
  Complex(Real r) : re(std::move(r)), im(0L) {}  // NOLINT
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  Complex(double r, double i = 0.0) : re(r), im(i) {}  // NOLINT
  Complex(int r) : re(r), im(0L) {}                    // NOLINT
  Complex(long r) : re(r), im(0L) {}                   // NOLINT
  explicit Complex(std::complex<double> z) : re(z.real()), im(z.imag()) {}

  static Complex i() { return Complex(Real(0L), Real(1L)); }

  std::complex<double> to_cd() const { return {re.to_double(), im.to_double()}; }
  std::complex<long double> to_cld() const { return {re.to_long_double(), im.to_long_double()}; }
  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  bool is_finite() const { return re.is_finite() && im.is_finite(); }
  // max of the component exponents
  long exponent() const;
  std::string to_string(int digits = 20) const;

  Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
  Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
  Complex& operator*=(const Complex& o);
  Complex& operator/=(const Complex& o);
  Complex& operator*=(const Real& o) { re *= o; im *= o; return *this; }
};

Complex operator+(const Complex& a, const Complex& b);
Complex operator-(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Complex& b);
Complex operator/(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Real& b);
Complex operator*(const Real& a, const Complex& b);
Complex operator/(const Complex& a, const Real& b);
Complex operator-(const Complex& a);

Complex conj(const Complex& z);
Real norm(const Complex& z);  // |z|^2
Real abs(const Complex& z);
Complex sqrt(const Complex& z);  // principal branch
Complex exp(const Complex& z);
Complex log(const Complex& z);
// exp(i * pi * z)
Complex exp_i_pi(const Complex& z);
Complex pow(const Complex& z, long n);
Complex mul_i_pow(const Complex& z, int k);      // z * i^k
Complex mul_zeta8_pow(const Complex& z, int k);  // z * exp(i pi k / 4)
// z * 2^e
Complex ldexp(const Complex& z, long e);

// Fused accumulate: acc += a * b with caller-provided scratch, no allocation.
struct ComplexScratch {
  Real t1, t2, t3, t4;
};
void mul_into(Complex& out, const Complex& a, const Complex& b, ComplexScratch& s);
void fma_into(Complex& acc, const Complex& a, const Complex& b, ComplexScratch& s);

std::ostream& operator<<(std::ostream& os, const Complex& z);

}  // namespace g2mp
