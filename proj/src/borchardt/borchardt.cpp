#include "g2mp/borchardt/borchardt.hpp"

#include <cmath>

#include "g2mp/error.hpp"

namespace g2mp {

BorchardtState borchardt_step(const BorchardtState& s, const PrecisionContext& ctx, BorchardtStats* stats) {
  std::array<Complex, 4> v;
  v[0] = sqrt(s.u[0]);
  const long tie_bits = ctx.n_bits - 8;
  for (int k = 1; k < 4; ++k) {
    if (v[0].is_zero() || s.u[k].is_zero()) {
      v[k] = Complex(0);
      continue;
    }
    v[k] = sqrt(s.u[k]);
    const Real dm = abs(v[0] - v[k]), dp = abs(v[0] + v[k]);
    if (abs(dm - dp) <= ldexp(max(dm, dp), -tie_bits)) {
      if (stats) ++stats->near_ties;
      if ((v[k] / v[0]).im.sign() < 0) v[k] = -v[k];
    } else if (dm > dp) {
      v[k] = -v[k];
    }
  }
  BorchardtState out;
  out.u[0] = ldexp(s.u[0] + s.u[1] + s.u[2] + s.u[3], -2);
  for (int k = 1; k < 4; ++k) {
    Complex acc(0);
    for (int k1 = 0; k1 < 4; ++k1) acc += v[k1] * v[k1 ^ k];
    out.u[k] = ldexp(acc, -2);
  }
  return out;
}

Complex borchardt_mean(const Complex& z1, const Complex& z2, const Complex& z3, const PrecisionContext& ctx,
                       BorchardtStats* stats) {
  PrecisionGuard guard(ctx);
  BorchardtState s{{Complex(1), z1, z2, z3}};
  const int limit = static_cast<int>(4 * std::log2(double(ctx.n_bits))) + 64;
  for (int it = 0; it < limit; ++it) {
    const Real tol = ldexp(abs(s.u[0]), -ctx.n_bits);
    bool done = true;
    for (int k = 1; k < 4 && done; ++k) done = abs(s.u[k] - s.u[0]) < tol;
    if (done) {
      if (stats) stats->iterations += it;
      return s.u[0];
    }
    s = borchardt_step(s, ctx, stats);
    if (!s.u[0].is_finite()) break;
  }
  throw Error(ErrorCode::kStall, "Borchardt sequence not contracting");
}

PeriodMatrix recover_tau(const std::array<Complex, 16>& b, const PrecisionContext& ctx, BorchardtStats* stats) {
  PrecisionGuard guard(ctx);
  const Real tiny = ldexp(Real(1L), -ctx.n_bits / 2);
  for (int i : {4, 8}) {
    if (abs(b[i]) < tiny) throw Error(ErrorCode::kVanishing, "theta quotient b" + std::to_string(i) + " vanishes");
  }
  const Complex one(1);
  const Complex th0 = one / borchardt_mean(b[1], b[2], b[3], ctx, stats);  // theta_0^2
  const Complex th4 = b[4] * th0, th8 = b[8] * th0;
  const Complex I = Complex::i();
  PeriodMatrix tau;
  tau.tau1 = I / (th4 * borchardt_mean(one / b[4], b[6] / b[4], b[2] / b[4], ctx, stats));
  tau.tau2 = I / (th8 * borchardt_mean(b[9] / b[8], one / b[8], b[1] / b[8], ctx, stats));
  const Complex d = one / (th0 * borchardt_mean(b[8], b[4], b[12], ctx, stats));
  Complex t3 = sqrt(d + tau.tau1 * tau.tau2);
  if (t3.im.sign() < 0) t3 = -t3;
  const Real branch = ldexp(Real(1L), -ctx.n_bits / 4);
  if (abs(t3.im) < branch && abs(t3) >= branch) {
    throw Error(ErrorCode::kBranchAmbiguous, "Im tau3 too close to 0 to fix the sign");
  }
  tau.tau3 = t3;
  return tau;
}

}  // namespace g2mp
