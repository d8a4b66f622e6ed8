#include <random>

#include "doctest.h"
#include "g2mp/error.hpp"
#include "g2mp/inversion/inversion.hpp"
#include "g2mp/siegel/reduction.hpp"
#include "g2mp/theta/theta.hpp"

using namespace g2mp;

namespace {

PeriodMatrix random_f2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double y1 = 0.9 + 0.7 * u(rng);
  const double y2 = y1 + 0.5 * u(rng);
  const double y3 = (0.05 + 0.4 * u(rng)) * y1;
  const std::array<std::complex<double>, 3> t = {{{u(rng) - 0.5, y1}, {u(rng) - 0.5, y2}, {u(rng) - 0.5, y3}}};
  return PeriodMatrix::from_cd(reduce_to_fundamental(t).first);
}

Real rel_diff(const InvariantTriple& a, const InvariantTriple& b) {
  Real m(0L), s(1L);
  for (int i = 0; i < 3; ++i) {
    m = max(m, abs(a[i] - b[i]));
    s = max(s, abs(b[i]));
  }
  return m / s;
}

}  // namespace

TEST_CASE("solve3 on a known system") {
  PrecisionGuard g(128);
  std::array<std::array<Complex, 3>, 3> m = {{{Complex(0), Complex(2), Complex(1)},
                                              {Complex(1), Complex(0, 1), Complex(0)},
                                              {Complex(3), Complex(1), Complex(1, 1)}}};
  const std::array<Complex, 3> x = {Complex(1, -1), Complex(2), Complex(0, 3)};
  std::array<Complex, 3> rhs;
  for (int i = 0; i < 3; ++i) rhs[i] = m[i][0] * x[0] + m[i][1] * x[1] + m[i][2] * x[2];
  const auto y = solve3(m, rhs);
  for (int i = 0; i < 3; ++i) CHECK(abs(y[i] - x[i]) < pow2(-110));
  m[2] = {m[0][0] + m[1][0], m[0][1] + m[1][1], m[0][2] + m[1][2]};
  CHECK_THROWS_AS(solve3(m, rhs), Error);
}

TEST_CASE("analytic Jacobian matches central differences") {
  const PrecisionContext ctx(200, 64, 100);
  PrecisionGuard g(ctx);
  std::mt19937_64 rng(11);
  for (auto kind : {InvariantKind::kThetaQuotient, InvariantKind::kIgusa, InvariantKind::kStreng}) {
    for (int trial = 0; trial < 3; ++trial) {
      const PeriodMatrix om = random_f2(rng);
      const InvariantJet jet = invariant_jet(om, kind, ctx);
      const Real h = Real(1e-8);
      for (int m = 0; m < 3; ++m) {
        PeriodMatrix plus = om, minus = om;
        Complex* pp = m == 0 ? &plus.tau1 : m == 1 ? &plus.tau2 : &plus.tau3;
        Complex* pm = m == 0 ? &minus.tau1 : m == 1 ? &minus.tau2 : &minus.tau3;
        *pp += Complex(h);
        *pm -= Complex(h);
        const auto fp = invariant_jet(plus, kind, ctx).f;
        const auto fm = invariant_jet(minus, kind, ctx).f;
        for (int i = 0; i < 3; ++i) {
          const Complex fd = (fp[i] - fm[i]) / Complex(ldexp(h, 1));
          const Real err = abs(fd - jet.jac[i][m]) / max(abs(jet.jac[i][m]), Real(1e-30));
          CHECK(err.to_double() < 1e-6);
        }
      }
      // values agree with the plain evaluation
      const auto f = invariants_at(om, kind, ctx);
      for (int i = 0; i < 3; ++i) CHECK(abs(f[i] - jet.f[i]) / max(Real(1L), abs(f[i])) < pow2(-180));
    }
  }
}

TEST_CASE("seed pool lies in F2") {
  for (const auto& s : inversion_seeds()) CHECK(is_in_fundamental(s, 1e-9));
}

TEST_CASE("b' round trip through Newton continuation") {
  const PrecisionContext ctx(200, 64, 100);
  PrecisionGuard g(ctx);
  std::mt19937_64 rng(5);
  InversionOptions opt;
  opt.try_borchardt = false;
  for (int trial = 0; trial < 6; ++trial) {
    const PeriodMatrix om = random_f2(rng);
    const InvariantTriple target = invariants_at(om, InvariantKind::kThetaQuotient, ctx);
    const InversionResult r = invert_invariants(target, std::nullopt, ctx, opt);
    CHECK(r.method == InversionMethod::kNewtonContinuation);
    CHECK(r.residual < pow2(-200 + 48));
    const InvariantTriple back = invariants_at(r.omega, InvariantKind::kThetaQuotient, ctx);
    CHECK(rel_diff(back, target) < pow2(-200 + 48));
  }
}

TEST_CASE("b' targets near the origin") {
  const PrecisionContext ctx(200, 64, 100);
  PrecisionGuard g(ctx);
  const std::array<std::array<std::complex<double>, 3>, 3> pts = {
      {{{{0.3, 0.1}, {0.0, 0.25}, {-0.2, 0.05}}}, {{{-0.5, 0.0}, {0.1, -0.45}, {0.35, 0.35}}}, {{{0.02, 0.0}, {0.5, 0.0}, {0.0, -0.5}}}}};
  std::optional<PeriodMatrix> prev;
  for (const auto& p : pts) {
    InvariantTriple t;
    t.kind = InvariantKind::kThetaQuotient;
    for (int i = 0; i < 3; ++i) t.v[i] = Complex(p[i]);
    const InversionResult r = invert_invariants(t, prev, ctx);
    CHECK(r.residual < pow2(-200 + 48));
    CHECK(rel_diff(invariants_at(r.omega, t.kind, ctx), t) < pow2(-200 + 48));
    prev = r.omega;
  }
}

TEST_CASE("Borchardt fast path") {
  const PrecisionContext ctx(200, 64, 100);
  PrecisionGuard g(ctx);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const PeriodMatrix om = random_f2(rng);
    const InvariantTriple target = invariants_at(om, InvariantKind::kThetaQuotient, ctx);
    const InversionResult r = borchardt_fast_path(target, ctx);
    CHECK(r.method == InversionMethod::kBorchardtDirect);
    CHECK(distance(r.omega, om) < pow2(-150));
    // A target moved by gamma_410 mostly falls back to Newton; either way the
    // result must reproduce it.
    const PeriodMatrix moved = act(special_matrix("gamma_410"), om);
    const InvariantTriple t2 = invariants_at(moved, InvariantKind::kThetaQuotient, ctx);
    const InversionResult r2 = invert_invariants(t2, std::nullopt, ctx);
    CHECK(rel_diff(invariants_at(r2.omega, t2.kind, ctx), t2) < pow2(-200 + 48));
  }
  InvariantTriple flat;
  flat.kind = InvariantKind::kThetaQuotient;
  flat.v = {Complex(1), Complex(1), Complex(1)};
  CHECK_THROWS_AS(borchardt_fast_path(flat, ctx), Error);
}

TEST_CASE("Igusa and Streng round trips up to Sp4") {
  const PrecisionContext ctx(200, 64, 100);
  PrecisionGuard g(ctx);
  std::mt19937_64 rng(21);
  for (auto kind : {InvariantKind::kIgusa, InvariantKind::kStreng}) {
    for (int trial = 0; trial < 3; ++trial) {
      const PeriodMatrix om = random_f2(rng);
      const InvariantTriple target = invariants_at(om, kind, ctx);
      const InversionResult r = invert_invariants(target, std::nullopt, ctx);
      CHECK(r.residual < pow2(-200 + 48));
      CHECK(rel_diff(invariants_at(r.omega, kind, ctx), target) < pow2(-200 + 48));
    }
  }
}

TEST_CASE("targets on the pole locus") {
  const PrecisionContext ctx(128, 64, 64);
  PrecisionGuard g(ctx);
  const PeriodMatrix diag{Complex(0.1, 1.1), Complex(-0.2, 1.3), Complex(0)};
  const ThetaVector tv = theta_series_all(diag, ctx);
  const SiegelFormValues f = siegel_forms(tv);
  InvariantTriple t;
  t.kind = InvariantKind::kIgusa;
  const Complex h10_2 = f.h10 * f.h10;
  t.v = {pow(f.h12, 5) / (h10_2 * h10_2 * h10_2), f.h4 * pow(f.h12, 3) / (h10_2 * h10_2),
         f.h16 * f.h12 * f.h12 / (h10_2 * h10_2)};
  try {
    invert_invariants(t, std::nullopt, ctx);
    FAIL("expected SINGULAR_TARGET");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSingularTarget);
  }
}

TEST_CASE("inversion is deterministic") {
  const PrecisionContext ctx(160, 64, 80);
  PrecisionGuard g(ctx);
  std::mt19937_64 rng(3);
  const PeriodMatrix om = random_f2(rng);
  InvariantTriple t = invariants_at(om, InvariantKind::kStreng, ctx);
  const InversionResult a = invert_invariants(t, std::nullopt, ctx);
  const InversionResult b = invert_invariants(t, std::nullopt, ctx);
  CHECK(a.omega.tau1.re.to_hex() == b.omega.tau1.re.to_hex());
  CHECK(a.omega.tau3.im.to_hex() == b.omega.tau3.im.to_hex());
  CHECK(a.path_length == b.path_length);
}
