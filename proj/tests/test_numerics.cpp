#include <random>

#include "doctest.h"
#include "g2mp/error.hpp"
#include "g2mp/numerics/unipoly.hpp"

using namespace g2mp;

namespace {

Complex random_complex(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return Complex(u(rng), u(rng));
}

UniPoly random_poly(std::mt19937_64& rng, int deg) {
  std::vector<Complex> c;
  for (int i = 0; i <= deg; ++i) c.push_back(random_complex(rng));
  return UniPoly(std::move(c));
}

double max_diff(const UniPoly& a, const UniPoly& b) {
  const int d = std::max(a.degree(), b.degree());
  double m = 0;
  for (int i = 0; i <= d; ++i) m = std::max(m, abs(a.coeff(i) - b.coeff(i)).to_double());
  return m;
}

UniPolyQ qpoly(std::initializer_list<long> c) {
  std::vector<Rational> v;
  for (long x : c) v.emplace_back(x);
  return UniPolyQ(std::move(v));
}

}  // namespace

TEST_CASE("precision context validation") {
  CHECK_THROWS_AS(PrecisionContext(32, 64, 16), Error);
  CHECK_THROWS_AS(PrecisionContext(256, 8, 128), Error);
  CHECK_THROWS_AS(PrecisionContext(256, 64, 256), Error);
  const PrecisionContext ctx(256, 64, 128);
  CHECK(ctx.working_bits() == 320);
  PrecisionGuard g(ctx);
  CHECK(Real(1.0).precision() == 320);
}

TEST_CASE("real hex round trip") {
  PrecisionGuard g(300);
  const Real x = sqrt(Real(2L)) / Real(7L);
  const Real y = Real::from_hex(x.to_hex());
  CHECK(y.precision() == 300);
  CHECK(x == y);
  CHECK(Real::from_hex((-x).to_hex()) == -x);
  CHECK(Real::from_hex(Real(0L).to_hex()).is_zero());
}

TEST_CASE("complex elementary functions") {
  PrecisionGuard g(256);
  const Complex z(0.3, -1.7);
  const Complex r = sqrt(z);
  CHECK(abs(r * r - z).to_double() < 1e-70);
  CHECK(r.re.sign() > 0);
  const Complex e = exp(log(z));
  CHECK(abs(e - z).to_double() < 1e-70);
  const Complex w = Complex(1.0, 2.0) / Complex(3.0, -4.0);
  CHECK(abs(w * Complex(3.0, -4.0) - Complex(1.0, 2.0)).to_double() < 1e-70);
  for (int k = 0; k < 8; ++k) {
    const Complex a = mul_zeta8_pow(z, k);
    const Complex b = z * exp_i_pi(Complex(Real(k) / Real(4L)));
    CHECK(abs(a - b).to_double() < 1e-70);
  }
  CHECK(sqrt(Complex(-4.0, 0.0)).im.to_double() == doctest::Approx(2.0));
}

TEST_CASE("euclid row on the worked example") {
  // (X^2+1)/(X+1) sampled at 0..3; degrees (2, 1) need four nodes
  const UniPolyQ g = qpoly({0, -6, 11, -6, 1});
  std::vector<Rational> xs = {0, 1, 2, 3};
  std::vector<Rational> ys = {Rational(1), Rational(1), Rational(5, 3), Rational(5, 2)};
  UniPolyQ f;
  for (int i = 0; i < 4; ++i) {
    UniPolyQ l = UniPolyQ::constant(ys[i]);
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      l = l * UniPolyQ(std::vector<Rational>{-xs[j] / (xs[i] - xs[j]), 1 / (xs[i] - xs[j])});
    }
    f = f + l;
  }
  trim_exact(f);
  const auto row = ext_euclid_row(g, f, 3);
  REQUIRE(row.r.degree() == 2);
  REQUIRE(row.t.degree() == 1);
  // normalize t to be monic
  const Rational s = 1 / row.t.lead();
  const UniPolyQ r = row.r * s;
  const UniPolyQ t = row.t * s;
  CHECK(r.coeffs[0] == 1);
  CHECK(r.coeffs[1] == 0);
  CHECK(r.coeffs[2] == 1);
  CHECK(t.coeffs[0] == 1);
  CHECK(t.coeffs[1] == 1);
}

TEST_CASE("euclid row constant") {
  PrecisionGuard g(256);
  const UniPoly gg = poly_product_tree({Complex(1), Complex(2)});
  const auto row = ext_euclid_row(gg, UniPoly::constant(Complex(5)), 1);
  CHECK(row.r.degree() == 0);
  CHECK(row.t.degree() == 0);
  CHECK(abs(row.r.coeffs[0] - Complex(5)).to_double() < 1e-60);
}

TEST_CASE("euclid row recovers random rational function") {
  PrecisionGuard g(256);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const UniPoly a = random_poly(rng, 3);
    const UniPoly b = random_poly(rng, 2);
    std::vector<Complex> nodes;
    std::vector<Complex> vals;
    for (int i = 0; i < 6; ++i) {
      nodes.push_back(random_complex(rng));
      vals.push_back(a.eval(nodes.back()) / b.eval(nodes.back()));
    }
    // Lagrange interpolant of the values
    UniPoly f;
    for (int i = 0; i < 6; ++i) {
      UniPoly l = UniPoly::constant(vals[i]);
      for (int j = 0; j < 6; ++j) {
        if (j == i) continue;
        const Complex inv = Complex(1) / (nodes[i] - nodes[j]);
        l = l * UniPoly(std::vector<Complex>{-nodes[j] * inv, inv});
      }
      f = f + l;
    }
    const auto row = ext_euclid_row(poly_product_tree(nodes), f, 4);
    CHECK(row.r.degree() <= 3);
    CHECK(row.t.degree() <= 2);
    // r * b - t * a vanishes identically
    CHECK(max_diff(row.r * b, row.t * a) < 1e-50);
  }
}

TEST_CASE("euclid relation holds on random inputs") {
  PrecisionGuard g(256);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Complex> nodes;
    for (int i = 0; i < 9; ++i) nodes.push_back(random_complex(rng));
    const UniPoly gg = poly_product_tree(nodes);
    const UniPoly f = random_poly(rng, 8);
    const int k = 1 + trial % 8;
    const auto row = ext_euclid_row(gg, f, k);
    CHECK(row.r.degree() < k);
    // r = t f mod g
    const auto [q, rem] = divmod(row.t * f - row.r, gg);
    CHECK(max_abs_coeff(rem).to_double() < 1e-40);
  }
}

TEST_CASE("rational reconstruction") {
  PrecisionGuard g(700);
  const Real third = Real(1L) / Real(3L);
  CHECK(rational_reconstruct(third, Integer(1000000)) == Rational(1, 3));
  CHECK(rational_reconstruct(Real(1.5), Integer(10)) == Rational(3, 2));
  const Real big = Real(24883200L) + pow2(-170);
  CHECK(rational_reconstruct(big, Integer(1)) == Rational(24883200));
  CHECK(rational_reconstruct(Real(-7L) / Real(12L), Integer(100)) == Rational(-7, 12));
  // too little precision for the requested denominator window
  PrecisionGuard low(64);
  const Real noisy = Real(1L) / Real(3L) + pow2(-20);
  CHECK_THROWS_AS(rational_reconstruct(noisy, Integer(100), pow2(-40)), Error);
}

TEST_CASE("rational reconstruction inverts rounding") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> num(-1000000, 1000000);
  std::uniform_int_distribution<long> den(1, 1000000);
  const Integer bound(1000000);
  // N >= 2 log2(bound) + 16
  PrecisionGuard g(2 * 20 + 16);
  for (int i = 0; i < 500; ++i) {
    Rational q(num(rng), den(rng));
    q.canonicalize();
    const Real x = to_real(q);
    CHECK(rational_reconstruct(x, bound, pow2(-48)) == q);
  }
}

TEST_CASE("product tree") {
  PrecisionGuard g(256);
  const UniPoly x = poly_product_tree({Complex(0)});
  CHECK(x.degree() == 1);
  CHECK(x.coeffs[0].is_zero());
  const UniPoly d = poly_product_tree({Complex(1), Complex(-1)});
  CHECK(abs(d.coeffs[0] + Complex(1)).to_double() < 1e-70);
  CHECK(d.coeffs[1].is_zero());
  std::mt19937_64 rng(2);
  for (int n : {1, 2, 7, 40, 64}) {
    std::vector<Complex> roots;
    for (int i = 0; i < n; ++i) roots.push_back(random_complex(rng));
    UniPoly naive = UniPoly::constant(Complex(1));
    for (const auto& r : roots) naive = naive * UniPoly(std::vector<Complex>{-r, Complex(1)});
    const UniPoly tree = poly_product_tree(roots);
    CHECK(tree.degree() == n);
    CHECK(max_diff(tree, naive) < 1e-60);
  }
}

TEST_CASE("synthetic division") {
  PrecisionGuard g(256);
  const UniPoly p = poly_product_tree({Complex(1), Complex(2), Complex(3)});
  const UniPoly q = synthetic_divide(p, Complex(2));
  CHECK(max_diff(q, poly_product_tree({Complex(1), Complex(3)})) < 1e-70);
}
