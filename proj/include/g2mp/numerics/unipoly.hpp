#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <utility>
#include <vector>

#include "g2mp/numerics/complex.hpp"

namespace g2mp {

using Integer = mpz_class;
using Rational = mpq_class;

// Dense univariate polynomial, coeffs[i] multiplies X^i. The zero polynomial
// has no coefficients and degree -1.
template <class T>
struct BasicPoly {
  std::vector<T> coeffs;

  BasicPoly() = default;
  explicit BasicPoly(std::vector<T> c) : coeffs(std::move(c)) {}

  static BasicPoly constant(const T& c) { return BasicPoly(std::vector<T>{c}); }
  static BasicPoly monomial(int deg, const T& c) {
    std::vector<T> v(deg + 1, T(0));
    v[deg] = c;
    return BasicPoly(std::move(v));
  }

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  bool is_zero() const { return coeffs.empty(); }
  const T& lead() const { return coeffs.back(); }
  T coeff(int i) const { return i >= 0 && i <= degree() ? coeffs[i] : T(0); }

  T eval(const T& x) const {
    T acc(0);
    for (int i = degree(); i >= 0; --i) acc = acc * x + coeffs[i];
    return acc;
  }
};

using UniPoly = BasicPoly<Complex>;
using UniPolyQ = BasicPoly<Rational>;

template <class T>
BasicPoly<T> operator+(const BasicPoly<T>& a, const BasicPoly<T>& b) {
  std::vector<T> c(std::max(a.coeffs.size(), b.coeffs.size()), T(0));
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) c[i] = a.coeffs[i];
  for (std::size_t i = 0; i < b.coeffs.size(); ++i) c[i] = c[i] + b.coeffs[i];
  return BasicPoly<T>(std::move(c));
}

template <class T>
BasicPoly<T> operator-(const BasicPoly<T>& a, const BasicPoly<T>& b) {
  std::vector<T> c(std::max(a.coeffs.size(), b.coeffs.size()), T(0));
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) c[i] = a.coeffs[i];
  for (std::size_t i = 0; i < b.coeffs.size(); ++i) c[i] = c[i] - b.coeffs[i];
  return BasicPoly<T>(std::move(c));
}

template <class T>
BasicPoly<T> operator*(const BasicPoly<T>& a, const BasicPoly<T>& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<T> c(a.coeffs.size() + b.coeffs.size() - 1, T(0));
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs.size(); ++j) c[i + j] = c[i + j] + a.coeffs[i] * b.coeffs[j];
  }
  return BasicPoly<T>(std::move(c));
}

template <class T>
BasicPoly<T> operator*(const BasicPoly<T>& a, const T& s) {
  BasicPoly<T> r = a;
  for (auto& c : r.coeffs) c = c * s;
  return r;
}

// Drops exactly-zero leading coefficients.
void trim_exact(UniPolyQ& p);
// Drops leading coefficients below rel_tol times the largest coefficient.
void trim(UniPoly& p, const Real& rel_tol);
Real max_abs_coeff(const UniPoly& p);

std::pair<UniPolyQ, UniPolyQ> divmod(const UniPolyQ& a, const UniPolyQ& b);
// Plain long division; the remainder keeps deg(b) coefficients, untrimmed.
std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b);

// Quotient of p by (X - r), discarding the remainder p(r).
UniPoly synthetic_divide(const UniPoly& p, const Complex& r);

// First row (r_j, t_j) of the extended Euclidean algorithm on (g, f) with
// deg r_j < k. Relation r_j = s_j g + t_j f.
struct EuclidRow {
  UniPoly r;
  UniPoly t;
};
struct EuclidRowQ {
  UniPolyQ r;
  UniPolyQ t;
};

// Floating version. Coefficients that fall below 2^(-zero_bits) of the step's
// magnitude are treated as cancelled; a leading coefficient between that and
// 2^(-n_bits/2) raises PRECISION_LOSS. zero_bits defaults to 3/4 of the
// working precision.
EuclidRow ext_euclid_row(const UniPoly& g, const UniPoly& f, int k, int zero_bits = 0);
EuclidRowQ ext_euclid_row(const UniPolyQ& g, const UniPolyQ& f, int k);

// Continued-fraction reconstruction: the last convergent p/q of x with
// q <= den_bound, provided |x - p/q| <= tol. tol defaults to
// 1 / (2 den_bound^2).
Rational rational_reconstruct(const Real& x, const Integer& den_bound);
Rational rational_reconstruct(const Real& x, const Integer& den_bound, const Real& tol);

// Exact rational value of a finite Real.
Rational to_rational(const Real& x);
Real to_real(const Rational& q);

// prod (X - r_i), built pairwise.
UniPoly poly_product_tree(const std::vector<Complex>& roots);

}  // namespace g2mp
