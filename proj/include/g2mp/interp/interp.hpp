#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "g2mp/numerics/unipoly.hpp"

namespace g2mp {

using Exponent = std::array<int, 3>;  // (i, j, k) for X^i Y^j Z^k

// Sparse trivariate polynomial; zero coefficients are never stored.
template <class T>
struct BasicTriPoly {
  std::map<Exponent, T> terms;

  bool is_zero() const { return terms.empty(); }
  int degree(int var) const {
    int d = -1;
    for (const auto& [e, c] : terms) d = std::max(d, e[var]);
    return d;
  }
  int total_degree() const {
    int d = -1;
    for (const auto& [e, c] : terms) d = std::max(d, e[0] + e[1] + e[2]);
    return d;
  }
};

using TriPoly = BasicTriPoly<Complex>;
using TriPolyQ = BasicTriPoly<Rational>;

Complex eval(const TriPoly& p, const Complex& x, const Complex& y, const Complex& z);
Complex eval(const TriPolyQ& p, const Complex& x, const Complex& y, const Complex& z);
Rational eval(const TriPolyQ& p, const Rational& x, const Rational& y, const Rational& z);

// Drops coefficients below rel_tol * max |coefficient|.
void drop_small(TriPoly& p, const Real& rel_tol);

// p(X + s0, Y + s1, Z + s2)
TriPoly shift(const TriPoly& p, const std::array<Complex, 3>& s);

// Numerator over denominator; `normalization` names the coefficient fixed to 1.
struct TriRat {
  TriPoly num;
  TriPoly den;
  std::string normalization;
};

struct TriRatQ {
  TriPolyQ num;
  TriPolyQ den;
};

struct DegreeBounds {
  int x = -1, y = -1, z = -1, total = -1;
};

struct DegreeProfile {
  DegreeBounds num;
  DegreeBounds den;
};

// Nodes center + radius * exp(2 pi i (j + phase) / n), j = 0..n-1.
struct NodeCircle {
  std::complex<double> center{0.0, 0.0};
  double radius = 1.0;
};
std::vector<Complex> circle_nodes(const NodeCircle& c, int n, double phase = 0.0);

// Precomputed Lagrange basis in monomial form for a fixed node set.
class UniInterpolator {
 public:
  explicit UniInterpolator(std::vector<Complex> nodes);
  UniPoly operator()(const std::vector<Complex>& values) const;
  std::size_t size() const { return nodes_.size(); }
  const std::vector<Complex>& nodes() const { return nodes_; }

 private:
  std::vector<Complex> nodes_;
  std::vector<std::vector<Complex>> basis_;  // basis_[i] = coefficients of L_i
};

// ILL_CONDITIONED when two nodes are closer than 2^(-prec/4).
UniPoly interp_poly_uni(const std::vector<Complex>& nodes, const std::vector<Complex>& values);

// (r, t) with r(x_i) = t(x_i) y_i, deg r <= degA, deg t <= degB. With
// `exact`, DEGENERATE unless both degrees are attained.
std::pair<UniPoly, UniPoly> cauchy_interp_uni(const std::vector<Complex>& nodes, const std::vector<Complex>& values,
                                              int degA, int degB, bool exact = true);

// Tensor grid; values are stored at (i * ny + j) * nz + k.
struct TriGrid {
  std::vector<Complex> x, y, z;
  std::size_t size() const { return x.size() * y.size() * z.size(); }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * y.size() + j) * z.size() + k; }
};

// Interpolant of degree < (#x, #y, #z) by nested univariate interpolation.
TriPoly interp_poly_multi(const TriGrid& grid, const std::vector<Complex>& values);

// Vector-valued black box; may throw Error at points it cannot evaluate.
using TriEvaluator = std::function<std::vector<Complex>(const Complex&, const Complex&, const Complex&)>;

struct RatTriOptions {
  NodeCircle x{{0.0, 0.0}, 1.0};  // only the radius is used; the shift is the center
  NodeCircle y{{0.0, 0.0}, 1.0};
  NodeCircle z{{0.0, 0.0}, 1.0};
  int extra_nodes = 2;  // X nodes beyond d_T^A + d_T^B + 1, used as a check
  int max_retries = 8;
  std::uint64_t seed = 1;
};

// F = A / B for component `component` of the evaluator from the structured
// set (s0 + x_i, s1 + x_i y_j, s2 + x_i z_k). The denominator is scaled so
// that B(s) = 1.
TriRat interp_rat_tri(const TriEvaluator& f, int component, const DegreeProfile& profile,
                      const std::array<Complex, 3>& shift, const RatTriOptions& opt = {});

struct DegreeHints {
  // Upper bounds on max(deg A, deg B) per variable and in total.
  int max_x = 16, max_y = 16, max_z = 16, max_total = 32;
  NodeCircle x{{0.0, 0.0}, 1.0};
  NodeCircle y{{0.0, 0.0}, 1.0};
  NodeCircle z{{0.0, 0.0}, 1.0};
  double shift_radius = 0.25;
  int min_rounds = 3;
  int max_rounds = 8;
  std::uint64_t seed = 1;
};

// Per-component profiles from Cauchy interpolation on random lines.
std::vector<DegreeProfile> discover_degrees(const TriEvaluator& f, const DegreeHints& hints);

// Continued-fraction reconstruction of every coefficient. NO_CONVERGENT
// propagates from the failing coefficient.
TriPolyQ reconstruct(const TriPoly& p, const Integer& den_bound, const Real& tol);

// Scales num and den by one rational so both are integral with coprime
// content and the leading denominator term (largest exponent) is positive.
TriRatQ primitive(const TriRatQ& f);

}  // namespace g2mp
