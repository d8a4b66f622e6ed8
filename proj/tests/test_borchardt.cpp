#include <random>

#include "doctest.h"
#include "g2mp/borchardt/borchardt.hpp"
#include "g2mp/error.hpp"
#include "g2mp/siegel/reduction.hpp"
#include "g2mp/theta/theta.hpp"

using namespace g2mp;

namespace {

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

std::array<Complex, 16> squared_quotients(const PeriodMatrix& om, const PrecisionContext& ctx) {
  const ThetaVector tv = theta_series_all(om, ctx);
  const Complex t0 = tv[0] * tv[0];
  std::array<Complex, 16> b;
  for (int i = 0; i < 16; ++i) b[i] = tv[i] * tv[i] / t0;
  return b;
}

bool close(const Complex& a, const Complex& b, long bits) {
  return abs(a - b) <= ldexp(max(Real(1L), abs(b)), -bits);
}

}  // namespace

TEST_CASE("fixed points") {
  const PrecisionContext ctx(200, 32, 64);
  PrecisionGuard g(ctx);
  CHECK(close(borchardt_mean(Complex(1), Complex(1), Complex(1), ctx), Complex(1), 199));
  // (a, a, a, a) is a fixed point of the four-term step
  BorchardtState s{{Complex(2.5), Complex(2.5), Complex(2.5), Complex(2.5)}};
  const BorchardtState t = borchardt_step(s, ctx);
  for (const auto& u : t.u) CHECK(close(u, Complex(2.5), 199));
}

TEST_CASE("mean of the b_i is 1/theta_0^2") {
  const PrecisionContext ctx(200, 32, 64);
  PrecisionGuard g(ctx);
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    const PeriodMatrix om = random_f2(rng);
    const ThetaVector tv = theta_series_all(om, ctx);
    const auto b = squared_quotients(om, ctx);
    const Complex m = borchardt_mean(b[1], b[2], b[3], ctx);
    CHECK(close(m * tv[0] * tv[0], Complex(1), 190));
  }
}

TEST_CASE("quadratic convergence") {
  const PrecisionContext ctx(400, 32, 64);
  PrecisionGuard g(ctx);
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 5; ++rep) {
    const auto b = squared_quotients(random_f2(rng), ctx);
    BorchardtState s{{Complex(1), b[1], b[2], b[3]}};
    double prev = 1;
    for (int it = 0; it < 20; ++it) {
      Real e(0L);
      for (int k = 1; k < 4; ++k) e = max(e, abs(s.u[k] - s.u[0]));
      const double err = e.to_double();
      if (prev < 1e-3 && err > 1e-110) CHECK(err <= 4 * prev * prev);
      prev = err;
      s = borchardt_step(s, ctx);
    }
  }
}

TEST_CASE("recover tau round trip") {
  const PrecisionContext ctx(200, 32, 64);
  PrecisionGuard g(ctx);
  std::mt19937_64 rng(3);
  int failures = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const PeriodMatrix om = random_f2(rng);
    const PeriodMatrix back = recover_tau(squared_quotients(om, ctx), ctx);
    const bool ok = distance(back, om) < ldexp(Real(1L), -160);
    if (!ok) ++failures;
    CHECK(is_in_fundamental(back, ldexp(Real(1L), -100)));
  }
  CHECK(failures == 0);
}

TEST_CASE("recover tau examples") {
  const PrecisionContext ctx(200, 32, 64);
  PrecisionGuard g(ctx);
  const PeriodMatrix a{Complex(Real(0L), Real(1.3)), Complex(Real(0L), Real(1.7)), Complex(Real(0L), Real(0.25))};
  CHECK(distance(recover_tau(squared_quotients(a, ctx), ctx), a) < ldexp(Real(1L), -180));
  const PeriodMatrix diag{Complex(Real(0.1), Real(1.1)), Complex(Real(-0.2), Real(1.4)), Complex(0)};
  const PeriodMatrix rd = recover_tau(squared_quotients(diag, ctx), ctx);
  CHECK(abs(rd.tau3) < ldexp(Real(1L), -90));
  CHECK(abs(rd.tau1 - diag.tau1) < ldexp(Real(1L), -180));
  const PeriodMatrix re{Complex(Real(0.3), Real(1.2)), Complex(Real(-0.3), Real(1.5)), Complex(Real(0.3), Real(0.4))};
  CHECK(distance(recover_tau(squared_quotients(re, ctx), ctx), re) < ldexp(Real(1L), -180));
}

TEST_CASE("vanishing quotient is reported") {
  const PrecisionContext ctx(200, 32, 64);
  PrecisionGuard g(ctx);
  std::array<Complex, 16> b;
  for (auto& x : b) x = Complex(1);
  b[4] = Complex(0);
  CHECK_THROWS_AS(recover_tau(b, ctx), Error);
}
