#include "g2mp/theta/theta.hpp"

#include <cmath>
#include <vector>

#include "g2mp/error.hpp"

namespace g2mp {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Crude upper bound for sum over k^T Y k > t of (1 + k^T Y k / lmin) exp(-pi/4 k^T Y k),
// using box counts for the lattice points in each shell.
double tail_bound(double t, double y11, double y22, double det, double lmin) {
  double total = 0;
  for (int m = 0; m < 400; ++m) {
    const double s = t + m + 1;
    const double count = (2 * std::sqrt(s * y22 / det) + 1) * (2 * std::sqrt(s * y11 / det) + 1);
    const double term = count * (1 + s / lmin) * std::exp(-kPi / 4 * (t + m));
    total += term;
    if (term < total * 1e-20) break;
  }
  return total;
}

int mod4(long x) { return static_cast<int>(((x % 4) + 4) % 4); }

void mul_small(Complex& out, const Complex& z, long w) {
  mpfr_mul_si(out.re.get(), z.re.get(), w, MPFR_RNDN);
  mpfr_mul_si(out.im.get(), z.im.get(), w, MPFR_RNDN);
}

}  // namespace

ThetaVector theta_series_all(const PeriodMatrix& omega, const PrecisionContext& ctx, ThetaDerivs* derivs,
                             long max_terms) {
  PrecisionGuard guard(ctx);
  const double y11 = omega.tau1.im.to_double(), y22 = omega.tau2.im.to_double(), y12 = omega.tau3.im.to_double();
  const double det = y11 * y22 - y12 * y12;
  if (!(y11 > 0 && det > 0)) throw Error(ErrorCode::kInvalidArgument, "period matrix not in H2");
  const double lmin = (y11 + y22) / 2 - std::sqrt((y11 - y22) * (y11 - y22) / 4 + y12 * y12);
  if (!(lmin > 0)) throw Error(ErrorCode::kSlowConvergence, "imaginary part numerically singular");

  // ellipse k^T Y k <= bd with tail below 2^-(working bits + 4)
  const double target = std::ldexp(1.0, -(ctx.working_bits() + 4));
  double bd = 4.0 / kPi * (ctx.working_bits() + 4) * std::log(2.0);
  while (tail_bound(bd, y11, y22, det, lmin) > target) bd *= 1.05;
  bd += 1;
  const long k1max = static_cast<long>(std::floor(std::sqrt(bd * y22 / det)));
  const long k2max = static_cast<long>(std::floor(std::sqrt(bd * y11 / det))) + 1;
  const double est = kPi * bd / std::sqrt(det) / 2;
  if (est > max_terms || k1max > 100000 || k2max > 100000) {
    throw Error(ErrorCode::kSlowConvergence, "theta series needs about " + std::to_string(long(est)) + " terms");
  }

  const Complex q1 = exp_i_pi(ldexp(omega.tau1, -2));
  const Complex q2 = exp_i_pi(ldexp(omega.tau2, -2));
  const Complex w = exp_i_pi(ldexp(omega.tau3, -1));
  const Complex winv = Complex(1) / w;
  ComplexScratch s;
  Complex tmp;

  // e2[j] = q2^(2j+1)
  std::vector<Complex> e2(static_cast<size_t>(k2max + 2));
  {
    Complex q2sq;
    mul_into(q2sq, q2, q2, s);
    e2[0] = q2;
    for (size_t j = 1; j < e2.size(); ++j) mul_into(e2[j], e2[j - 1], q2sq, s);
  }

  std::array<Complex, 16> h;
  for (auto& v : h) v = Complex(0);
  std::array<std::array<Complex, 3>, 16> dh;
  if (derivs) {
    for (auto& r : dh) {
      for (auto& v : r) v = Complex(0);
    }
  }

  auto accumulate = [&](long k1, long k2, const Complex& t) {
    const int base = 4 * (static_cast<int>(k1 & 1) + 2 * static_cast<int>(k2 & 1));
    const long m[4] = {0, k1, k2, k1 + k2};
    if (derivs) {
      const long wt[3] = {k1 * k1, k2 * k2, k1 * k2};
      for (int c = 0; c < 3; ++c) {
        if (wt[c] == 0) continue;
        mul_small(tmp, t, wt[c]);
        for (int b = 0; b < 4; ++b) {
          const int r = mod4(m[b]);
          if (r == 0) dh[base + b][c] += tmp;
          else if (r == 2) dh[base + b][c] -= tmp;
        }
      }
    }
    for (int b = 0; b < 4; ++b) {
      const int r = mod4(m[b]);
      if (r == 0) h[base + b] += t;
      else if (r == 2) h[base + b] -= t;
    }
  };

  Complex row(1), q1odd = q1, q1sq, v(1), vinv(1), t, u;
  mul_into(q1sq, q1, q1, s);
  for (long k1 = 0; k1 <= k1max; ++k1) {
    const double disc = y22 * bd - det * double(k1) * double(k1);
    if (disc >= 0) {
      const double c = -y12 * double(k1) / y22, r = std::sqrt(disc) / y22;
      const long lo = k1 == 0 ? 1 : static_cast<long>(std::floor(c - r)) - 1;
      const long hi = static_cast<long>(std::ceil(c + r)) + 1;
      if (k1 > 0 && lo <= 0 && hi >= 0) accumulate(k1, 0, row);
      t = row;
      for (long k2 = 0; k2 < hi; ++k2) {
        mul_into(u, t, e2[k2], s);
        mul_into(t, u, v, s);
        if (k2 + 1 >= lo) accumulate(k1, k2 + 1, t);
      }
      if (k1 > 0) {
        t = row;
        for (long j = 0; j < -lo; ++j) {
          mul_into(u, t, e2[j], s);
          mul_into(t, u, vinv, s);
          if (-(j + 1) <= hi) accumulate(k1, -(j + 1), t);
        }
      }
    }
    mul_into(u, row, q1odd, s);
    row = u;
    mul_into(u, q1odd, q1sq, s);
    q1odd = u;
    mul_into(u, v, w, s);
    v = u;
    mul_into(u, vinv, winv, s);
    vinv = u;
  }

  ThetaVector out;
  out.omega = omega;
  for (int i = 0; i < 16; ++i) {
    if (!is_even_index(i)) {
      out.values[i] = Complex(0);
      continue;
    }
    out.values[i] = ldexp(h[i], 1);
    if (i < 4) out.values[i] += Complex(1);
  }
  if (derivs) {
    const Complex ipi(Real(0L), pi());
    const Complex f[3] = {ldexp(ipi, -1), ldexp(ipi, -1), ipi};
    for (int i = 0; i < 16; ++i) {
      for (int c = 0; c < 3; ++c) {
        derivs->d[i][c] = is_even_index(i) ? dh[i][c] * f[c] : Complex(0);
      }
    }
  }
  return out;
}

Complex theta_series(const Characteristic& ch, const PeriodMatrix& omega, const PrecisionContext& ctx) {
  if (!ch.is_even()) return Complex(0);
  return theta_series_all(omega, ctx).values[ch.index()];
}

std::array<Complex, 16> duplication(const std::array<Complex, 4>& half) {
  std::array<Complex, 16> out;
  for (int i = 0; i < 16; ++i) {
    const Characteristic ch = Characteristic::from_index(i);
    const int b = i & 3;
    Complex acc(0);
    for (int b1 = 0; b1 < 4; ++b1) {
      const int sign = (ch.a0 * (b1 & 1) + ch.a1 * (b1 >> 1)) & 1;
      const Complex term = half[b1] * half[b1 ^ b];
      if (sign) acc -= term;
      else acc += term;
    }
    out[i] = ch.is_even() ? ldexp(acc, -2) : Complex(0);
  }
  return out;
}

ThetaAction theta_action_of(const SymplecticMatrix& gamma) {
  ThetaAction act;
  act.gamma = gamma;
  const Mat2 A = gamma.A(), B = gamma.B(), C = gamma.C(), D = gamma.D();
  auto mul = [](const Mat2& x, const Mat2& y) {
    return Mat2{x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  };
  auto tr = [](const Mat2& x) { return Mat2{x.a, x.c, x.b, x.d}; };
  auto quad = [](const std::int64_t u[2], const Mat2& m, const std::int64_t v[2]) {
    return u[0] * (m.a * v[0] + m.b * v[1]) + u[1] * (m.c * v[0] + m.d * v[1]);
  };
  const Mat2 atb = mul(A, tr(B)), ctd = mul(C, tr(D)), btc = mul(B, tr(C));
  const Mat2 tac = mul(tr(A), C), tdb = mul(tr(D), B);
  const std::int64_t e1[2] = {tac.a, tac.d};  // 2 e'
  const std::int64_t e2[2] = {tdb.a, tdb.d};  // 2 e''
  for (int i = 0; i < 16; ++i) {
    const Characteristic ch = Characteristic::from_index(i);
    const std::int64_t al[2] = {ch.a0, ch.a1}, be[2] = {ch.b0, ch.b1};
    // image characteristic (al2/2, be2/2) = t(gamma) (a, b) + (e', e'')
    const std::int64_t al2[2] = {A.a * al[0] + A.c * al[1] + C.a * be[0] + C.c * be[1] + e1[0],
                                 A.b * al[0] + A.d * al[1] + C.b * be[0] + C.d * be[1] + e1[1]};
    const std::int64_t be2[2] = {B.a * al[0] + B.c * al[1] + D.a * be[0] + D.c * be[1] + e2[0],
                                 B.b * al[0] + B.d * al[1] + D.b * be[0] + D.d * be[1] + e2[1]};
    std::int64_t ph = -quad(al, atb, al) - quad(be, ctd, be) - 2 * quad(al, btc, be) -
                      2 * (al2[0] * e2[0] + al2[1] * e2[1]);
    std::int64_t ar[2], br[2];
    for (int j = 0; j < 2; ++j) {
      ar[j] = ((al2[j] % 2) + 2) % 2;
      br[j] = ((be2[j] % 2) + 2) % 2;
      const std::int64_t nu = (be2[j] - br[j]) / 2;
      ph += 4 * ar[j] * nu;
    }
    act.perm[i] = static_cast<int>(br[0] + 2 * br[1] + 4 * ar[0] + 8 * ar[1]);
    act.phase8[i] = static_cast<int>(((ph % 8) + 8) % 8);
  }
  return act;
}

ThetaAction compose(const ThetaAction& outer, const ThetaAction& inner) {
  ThetaAction out;
  out.gamma = outer.gamma * inner.gamma;
  for (int i = 0; i < 16; ++i) {
    const int j = outer.perm[i];
    out.perm[i] = inner.perm[j];
    out.phase8[i] = (outer.phase8[i] + inner.phase8[j]) % 8;
  }
  return out;
}

std::array<Complex, 16> transport_quotients(const ThetaAction& act, const ThetaVector& at_w) {
  const Complex& den = at_w[act.perm[0]];
  const Real scale = max(abs(at_w[0]), abs(at_w[act.perm[0]]));
  if (den.is_zero() || abs(den) < ldexp(scale, -static_cast<long>(working_precision()) / 2)) {
    throw Error(ErrorCode::kVanishingDenominator, "theta denominator vanishes at the reduced point");
  }
  const Complex inv = Complex(1) / den;
  std::array<Complex, 16> q;
  for (int i = 0; i < 16; ++i) {
    if (!is_even_index(i)) {
      q[i] = Complex(0);
      continue;
    }
    q[i] = mul_zeta8_pow(at_w[act.perm[i]] * inv, (act.phase8[i] - act.phase8[0] + 8) % 8);
  }
  return q;
}

ThetaQuotients theta_quotients_anywhere(const PeriodMatrix& omega, const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx);
  ThetaQuotients out;
  out.reduction = reduce_to_fundamental(omega);
  out.at_reduced = theta_series_all(out.reduction.omega_reduced, ctx);
  out.action = theta_action_of(out.reduction.gamma.inverse());
  out.q = transport_quotients(out.action, out.at_reduced);
  return out;
}

std::array<Complex, 3> bprime_of(const PeriodMatrix& omega, const PrecisionContext& ctx) {
  const ThetaQuotients tq = theta_quotients_anywhere(omega.halved(), ctx);
  return {tq.q[1], tq.q[2], tq.q[3]};
}

}  // namespace g2mp
