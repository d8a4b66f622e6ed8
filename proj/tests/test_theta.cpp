#include "doctest.h"

#include <random>

#include "g2mp/error.hpp"
#include "g2mp/siegel/reduction.hpp"
#include "g2mp/theta/theta.hpp"

using namespace g2mp;

namespace {

// genus-1 theta[a/2; b/2](tau) by the plain lattice sum over n
Complex theta1(int a, int b, const Complex& tau, int terms) {
  Complex acc(0);
  for (int n = -terms; n <= terms; ++n) {
    const Real x = Real(long(n)) + Real(a * 0.5);
    const Complex arg = tau * (x * x) + Complex(x * Real(long(b)));
    acc += exp_i_pi(arg);
  }
  return acc;
}

// genus-2 characteristic series, summed naively over a box
Complex theta2_naive(int idx, const PeriodMatrix& om, int box) {
  const Characteristic ch = Characteristic::from_index(idx);
  Complex acc(0);
  for (int n1 = -box; n1 <= box; ++n1) {
    for (int n2 = -box; n2 <= box; ++n2) {
      const Real x1 = Real(long(n1)) + Real(ch.a0 * 0.5), x2 = Real(long(n2)) + Real(ch.a1 * 0.5);
      Complex arg = om.tau1 * (x1 * x1) + om.tau2 * (x2 * x2) + om.tau3 * (ldexp(x1 * x2, 1));
      arg += Complex(x1 * Real(long(ch.b0)) + x2 * Real(long(ch.b1)));
      acc += exp_i_pi(arg);
    }
  }
  return acc;
}

PeriodMatrix random_f2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5), y(0.9, 2.0);
  for (;;) {
    const double y11 = y(rng), y22 = y11 + std::abs(u(rng)) * 1.5;
    const double y12 = std::abs(u(rng)) * y11;
    const std::array<std::complex<double>, 3> t{std::complex<double>(u(rng), y11),
                                                std::complex<double>(u(rng), y22),
                                                std::complex<double>(u(rng), y12)};
    if (is_in_fundamental(t, 0.0)) return PeriodMatrix::from_cd(t);
  }
}

SymplecticMatrix random_word(std::mt19937_64& rng, int len) {
  const std::vector<SymplecticMatrix> gens = {SymplecticMatrix::J(), SymplecticMatrix::M(0, 0),
                                              SymplecticMatrix::M(0, 1), SymplecticMatrix::M(1, 1)};
  SymplecticMatrix g;
  for (int i = 0; i < len; ++i) {
    const auto& h = gens[rng() % gens.size()];
    g = g * ((rng() & 1) ? h : h.inverse());
  }
  return g;
}

bool close(const Complex& a, const Complex& b, long bits) {
  return abs(a - b) <= ldexp(max(Real(1L), abs(b)), -bits);
}

}  // namespace

TEST_CASE("characteristic numbering") {
  int even = 0;
  for (int i = 0; i < 16; ++i) {
    CHECK(Characteristic::from_index(i).index() == i);
    if (is_even_index(i)) ++even;
  }
  CHECK(even == 10);
  for (int i : kEvenThetas) CHECK(is_even_index(i));
}

TEST_CASE("series against naive box sum") {
  const PrecisionContext ctx(120, 32, 64);
  PrecisionGuard g(ctx);
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 3; ++rep) {
    const PeriodMatrix om = random_f2(rng);
    const ThetaVector tv = theta_series_all(om, ctx);
    for (int i = 0; i < 16; ++i) {
      if (!is_even_index(i)) {
        CHECK(tv[i].is_zero());
        continue;
      }
      CHECK(close(tv[i], theta2_naive(i, om, 14), 110));
    }
  }
}

TEST_CASE("diagonal period matrices factor") {
  const PrecisionContext ctx(200, 32, 64);
  PrecisionGuard g(ctx);
  const Complex ta(Real(0.3), Real(1.1)), tb(Real(-0.2), Real(1.7));
  const PeriodMatrix om{ta, tb, Complex(0)};
  const ThetaVector tv = theta_series_all(om, ctx);
  for (int i = 0; i < 16; ++i) {
    const Characteristic c = Characteristic::from_index(i);
    const Complex expect = theta1(c.a0, c.b0, ta, 40) * theta1(c.a1, c.b1, tb, 40);
    CHECK(close(tv[i], expect, 190));
  }
  const PeriodMatrix om2{Complex(Real(0L), Real(1L)), Complex(Real(0L), Real(2L)), Complex(0)};
  const ThetaVector t2 = theta_series_all(om2, ctx);
  CHECK(abs(t2[15]) < ldexp(Real(1L), -190));
  for (int i : kEvenThetas) {
    if (i != 15) CHECK(abs(t2[i]) > Real(0.01));
  }
}

TEST_CASE("tail bound holds when precision doubles") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 4; ++rep) {
    const PrecisionContext ctx(200, 32, 64);
    const PrecisionContext big(400, 32, 64);
    PrecisionGuard g(big);
    const PeriodMatrix om = random_f2(rng);
    const ThetaVector a = theta_series_all(om, ctx);
    const ThetaVector b = theta_series_all(om, big);
    for (int i : kEvenThetas) CHECK(close(a[i], b[i], 200));
  }
}

TEST_CASE("duplication agrees with the series") {
  const PrecisionContext ctx(200, 32, 64);
  PrecisionGuard g(ctx);
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const PeriodMatrix om = random_f2(rng);
    const ThetaVector full = theta_series_all(om, ctx);
    const ThetaVector half = theta_series_all(om.halved(), ctx);
    const auto sq = duplication({half[0], half[1], half[2], half[3]});
    for (int i = 0; i < 16; ++i) CHECK(close(sq[i], full[i] * full[i], 80));
  }
  const Complex c(Real(0.7), Real(-0.2));
  const auto sq = duplication({c, c, c, c});
  CHECK(close(sq[0], c * c, 200));
  CHECK(sq[4].is_zero());
  CHECK(sq[8].is_zero());
  CHECK(sq[12].is_zero());
}

TEST_CASE("functional equation on generators and words") {
  const PrecisionContext ctx(128, 32, 64);
  PrecisionGuard g(ctx);
  std::mt19937_64 rng(11);
  std::vector<SymplecticMatrix> gammas = {SymplecticMatrix::J(), SymplecticMatrix::M(0, 0), SymplecticMatrix::M(0, 1),
                                          SymplecticMatrix::M(1, 1)};
  for (int i = 0; i < 4; ++i) gammas.push_back(gammas[i].inverse());
  for (int i = 0; i < 12; ++i) gammas.push_back(random_word(rng, 3 + int(rng() % 4)));
  for (const auto& gm : gammas) {
    for (int rep = 0; rep < 3; ++rep) {
      const PeriodMatrix om = random_f2(rng);
      const PeriodMatrix img = act(gm, om);
      ThetaVector direct;
      try {
        direct = theta_series_all(img, ctx, nullptr, 3000000);
      } catch (const Error&) {
        continue;  // image too close to the real boundary for the plain series
      }
      const auto q = transport_quotients(theta_action_of(gm), theta_series_all(om, ctx));
      for (int i : kEvenThetas) {
        INFO(gm.to_string(), " index ", i);
        CHECK(close(q[i], direct[i] / direct[0], 100));
      }
    }
  }
}

TEST_CASE("action composes") {
  const PrecisionContext ctx(128, 32, 64);
  PrecisionGuard g(ctx);
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    const SymplecticMatrix g1 = random_word(rng, 4), g2 = random_word(rng, 4);
    const ThetaAction c = compose(theta_action_of(g1), theta_action_of(g2));
    const ThetaAction d = theta_action_of(g1 * g2);
    CHECK(c.perm == d.perm);
    const PeriodMatrix om = random_f2(rng);
    const ThetaVector tv = theta_series_all(om, ctx);
    const auto qc = transport_quotients(c, tv), qd = transport_quotients(d, tv);
    for (int i : kEvenThetas) CHECK(close(qc[i], qd[i], 120));
  }
}

TEST_CASE("quotients anywhere") {
  const PrecisionContext ctx(160, 32, 64);
  PrecisionGuard g(ctx);
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const PeriodMatrix om = random_f2(rng);
    const ThetaVector tv = theta_series_all(om, ctx);
    const ThetaQuotients tq = theta_quotients_anywhere(om, ctx);
    for (int i : kEvenThetas) CHECK(close(tq.q[i], tv[i] / tv[0], 150));
    // a point far from the fundamental domain
    const SymplecticMatrix w = random_word(rng, 6);
    const PeriodMatrix img = act(w, om);
    const ThetaQuotients ti = theta_quotients_anywhere(img, ctx);
    const auto expect = transport_quotients(theta_action_of(w), tv);
    for (int i : kEvenThetas) CHECK(close(ti.q[i], expect[i], 140));
  }
}

TEST_CASE("b' is invariant under Gamma(2,4)") {
  const PrecisionContext ctx(128, 32, 64);
  PrecisionGuard g(ctx);
  std::mt19937_64 rng(19);
  const auto& gens = group_generators(Subgroup::gamma24());
  for (int rep = 0; rep < 10; ++rep) {
    SymplecticMatrix h;
    for (int k = 0; k < 3; ++k) h = h * gens[rng() % gens.size()];
    const PeriodMatrix om = random_f2(rng);
    const auto a = bprime_of(om, ctx), b = bprime_of(act(h, om), ctx);
    for (int i = 0; i < 3; ++i) CHECK(close(a[i], b[i], 110));
  }
}

TEST_CASE("special matrices act on b' as stated") {
  const PrecisionContext ctx(128, 32, 64);
  PrecisionGuard g(ctx);
  std::mt19937_64 rng(23);
  const Complex I = Complex::i(), one(1), m1(-1);
  struct Case {
    const char* name;
    std::array<int, 3> perm;
    std::array<Complex, 3> mult;
  };
  const std::vector<Case> cases = {
      {"gamma_134", {0, 1, 2}, {m1, one, one}},
      {"gamma_410", {1, 0, 2}, {one, one, one}},
      {"gamma_8316", {2, 1, 0}, {one, one, one}},
      {"gamma_141", {0, 1, 2}, {I, I, one}},
      {"gamma_21", {0, 1, 2}, {one, I, I}},
  };
  for (const auto& c : cases) {
    const SymplecticMatrix gm = special_matrix(c.name);
    for (int rep = 0; rep < 3; ++rep) {
      const PeriodMatrix om = random_f2(rng);
      const auto a = bprime_of(om, ctx), b = bprime_of(act(gm, om), ctx);
      for (int i = 0; i < 3; ++i) {
        INFO(c.name, " b'", i + 1);
        CHECK(close(b[i], c.mult[i] * a[c.perm[i]], 110));
      }
    }
  }
}

TEST_CASE("theta derivatives match finite differences") {
  const PrecisionContext ctx(200, 32, 64);
  PrecisionGuard g(ctx);
  std::mt19937_64 rng(29);
  const Real h = ldexp(Real(1L), -60);
  for (int rep = 0; rep < 5; ++rep) {
    const PeriodMatrix om = random_f2(rng);
    ThetaDerivs d;
    theta_series_all(om, ctx, &d);
    for (int c = 0; c < 3; ++c) {
      PeriodMatrix p = om, m = om;
      Complex* pp = c == 0 ? &p.tau1 : c == 1 ? &p.tau2 : &p.tau3;
      Complex* mm = c == 0 ? &m.tau1 : c == 1 ? &m.tau2 : &m.tau3;
      *pp += Complex(h);
      *mm -= Complex(h);
      const ThetaVector tp = theta_series_all(p, ctx), tm = theta_series_all(m, ctx);
      for (int i : kEvenThetas) {
        const Complex fd = (tp[i] - tm[i]) / ldexp(h, 1);
        CHECK(close(fd, d.d[i][c], 100));
      }
    }
  }
}

TEST_CASE("slow convergence is reported") {
  const PrecisionContext ctx(200, 32, 64);
  PrecisionGuard g(ctx);
  const PeriodMatrix om{Complex(Real(0L), Real(1e-4)), Complex(Real(0L), Real(1e-4)), Complex(0)};
  CHECK_THROWS_AS(theta_series_all(om, ctx), Error);
}
