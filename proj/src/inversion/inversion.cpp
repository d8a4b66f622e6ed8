#include "g2mp/inversion/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "g2mp/borchardt/borchardt.hpp"
#include "g2mp/error.hpp"
#include "g2mp/siegel/reduction.hpp"
#include "g2mp/theta/theta.hpp"

namespace g2mp {
namespace {

// Value plus gradient with respect to (tau1, tau2, tau3).
struct Jet {
  Complex v;
  std::array<Complex, 3> d;
};

Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, {a.d[0] + b.d[0], a.d[1] + b.d[1], a.d[2] + b.d[2]}}; }
Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, {a.d[0] - b.d[0], a.d[1] - b.d[1], a.d[2] - b.d[2]}}; }
Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v * b.v;
  for (int m = 0; m < 3; ++m) r.d[m] = a.d[m] * b.v + a.v * b.d[m];
  return r;
}
Jet operator/(const Jet& a, const Jet& b) {
  const Complex inv = Complex(1) / b.v;
  Jet r;
  r.v = a.v * inv;
  for (int m = 0; m < 3; ++m) r.d[m] = (a.d[m] - r.v * b.d[m]) * inv;
  return r;
}
Jet scale(const Jet& a, const Complex& s) { return {a.v * s, {a.d[0] * s, a.d[1] * s, a.d[2] * s}}; }
Jet constant(const Complex& c) { return {c, {Complex(0), Complex(0), Complex(0)}}; }

struct FormJets {
  Jet h4, h6, h10, h12, h16;
};

FormJets form_jets(const ThetaVector& tv, const ThetaDerivs& dv) {
  std::array<Jet, 16> t4;
  FormJets f;
  f.h4 = constant(Complex(0));
  f.h10 = constant(Complex(1));
  for (int i : kEvenThetas) {
    const Jet th{tv[i], dv.d[i]};
    const Jet sq = th * th;
    t4[i] = sq * sq;
    f.h4 = f.h4 + t4[i] * t4[i];
    f.h10 = f.h10 * sq;
  }
  f.h6 = constant(Complex(0));
  for (const auto& t : h6_triples()) {
    const Jet m = t4[t.idx[0]] * t4[t.idx[1]] * t4[t.idx[2]];
    f.h6 = t.sign > 0 ? f.h6 + m : f.h6 - m;
  }
  f.h12 = constant(Complex(0));
  for (const auto& s : h12_sextets()) {
    Jet m = t4[s[0]];
    for (int j = 1; j < 6; ++j) m = m * t4[s[j]];
    f.h12 = f.h12 + m;
  }
  f.h16 = scale(f.h12 * f.h4 - scale(f.h6 * f.h10, Complex(2)), Complex(1) / Complex(3));
  return f;
}

// Invariant map on the chart W -> Omega: b' uses Omega = 2 g W and reads the
// quotients through the action of g; the Gamma2-invariant systems ignore g.
struct State {
  PeriodMatrix w;
  SymplecticMatrix g;
};

InvariantJet chart_jet(const PeriodMatrix& w, const ThetaAction& act, InvariantKind kind, const PrecisionContext& ctx) {
  ThetaDerivs dv;
  const ThetaVector tv = theta_series_all(w, ctx, &dv);
  InvariantJet out;
  if (kind == InvariantKind::kThetaQuotient) {
    const int s0 = act.perm[0];
    const Jet den{tv[s0], dv.d[s0]};
    const Real scale_ = max(abs(tv[0]), abs(tv[s0]));
    if (abs(den.v) < ldexp(scale_, -static_cast<long>(working_precision()) / 2)) {
      throw Error(ErrorCode::kVanishingDenominator, "theta_0(Omega/2) vanishes");
    }
    for (int i = 1; i <= 3; ++i) {
      const int si = act.perm[i];
      const Jet q = Jet{tv[si], dv.d[si]} / den;
      const int ph = (act.phase8[i] - act.phase8[0] + 8) % 8;
      out.f[i - 1] = mul_zeta8_pow(q.v, ph);
      for (int m = 0; m < 3; ++m) out.jac[i - 1][m] = mul_zeta8_pow(q.d[m], ph);
    }
    return out;
  }
  Real tmax(0L);
  for (int i : kEvenThetas) tmax = max(tmax, abs(tv[i]));
  const FormJets f = form_jets(tv, dv);
  Real t20 = tmax * tmax;
  t20 = t20 * t20;
  t20 = t20 * t20 * t20 * t20 * t20;
  if (abs(f.h10.v) < ldexp(t20, -static_cast<long>(ctx.n_bits) / 2)) {
    throw Error(ErrorCode::kProductOfElliptic, "h10 vanishes");
  }
  std::array<Jet, 3> r;
  if (kind == InvariantKind::kIgusa) {
    const Jet h10_2 = f.h10 * f.h10, h10_4 = h10_2 * h10_2;
    const Jet h12_2 = f.h12 * f.h12;
    r[0] = h12_2 * h12_2 * f.h12 / (h10_4 * h10_2);
    r[1] = f.h4 * h12_2 * f.h12 / h10_4;
    r[2] = f.h16 * h12_2 / h10_4;
  } else {
    const Jet h10_2 = f.h10 * f.h10;
    const Jet h4_2 = f.h4 * f.h4;
    r[0] = f.h4 * f.h6 / f.h10;
    r[1] = h4_2 * f.h12 / h10_2;
    r[2] = h4_2 * h4_2 * f.h4 / h10_2;
  }
  for (int i = 0; i < 3; ++i) {
    out.f[i] = r[i].v;
    out.jac[i] = r[i].d;
  }
  return out;
}

PeriodMatrix omega_of(const State& s, InvariantKind kind) {
  const PeriodMatrix o = act(s.g, s.w);
  return kind == InvariantKind::kThetaQuotient ? o.scaled(2L) : o;
}

// Moves W back into F2 when it has drifted, keeping Omega fixed.
void renormalize(State& s) {
  if (is_in_fundamental(s.w.to_cd(), 1e-3)) return;
  const ReductionResult red = reduce_to_fundamental(s.w);
  s.w = red.omega_reduced;
  s.g = s.g * red.gamma.inverse();
}

State state_from_omega(const PeriodMatrix& omega, InvariantKind kind) {
  State s;
  s.w = kind == InvariantKind::kThetaQuotient ? omega.halved() : omega;
  s.g = SymplecticMatrix::identity();
  const ReductionResult red = reduce_to_fundamental(s.w);
  s.w = red.omega_reduced;
  s.g = red.gamma.inverse();
  return s;
}

Real max_abs(const std::array<Complex, 3>& v) { return max(max(abs(v[0]), abs(v[1])), abs(v[2])); }

Real target_scale(const InvariantTriple& t) { return max(Real(1L), max_abs(t.v)); }

std::array<Complex, 3> lerp(const std::array<Complex, 3>& a, const std::array<Complex, 3>& b, const Real& t) {
  std::array<Complex, 3> r;
  for (int i = 0; i < 3; ++i) r[i] = a[i] + (b[i] - a[i]) * t;
  return r;
}

// Newton toward v; true when the scaled residual drops below tol while
// contracting at every step.
bool correct(State& s, const std::array<Complex, 3>& v, InvariantKind kind, const PrecisionContext& ctx,
             const Real& scale_, const Real& tol, int max_it, Real* final_res = nullptr) {
  Real prev(0L);
  for (int it = 0; it <= max_it; ++it) {
    renormalize(s);
    InvariantJet jet;
    try {
      jet = chart_jet(s.w, theta_action_of(s.g), kind, ctx);
    } catch (const Error&) {
      return false;
    }
    std::array<Complex, 3> r;
    for (int i = 0; i < 3; ++i) r[i] = v[i] - jet.f[i];
    const Real res = max_abs(r) / scale_;
    if (final_res) *final_res = res;
    if (res < tol) return true;
    if (it == max_it || (it > 0 && res > ldexp(prev, -1))) return false;
    prev = res;
    std::array<Complex, 3> dw;
    try {
      dw = solve3(jet.jac, r);
    } catch (const Error&) {
      return false;
    }
    const auto y = s.w.to_cd();
    const double ymin = std::min(y[0].imag(), y[1].imag());
    if (!(max_abs(dw).to_double() < 0.25 * ymin)) return false;
    PeriodMatrix next{s.w.tau1 + dw[0], s.w.tau2 + dw[1], s.w.tau3 + dw[2]};
    if (!next.in_upper_half_space()) return false;
    s.w = next;
  }
  return false;
}

// Tracks the segment from f(state) to target at the current precision.
bool track(State& s, const std::array<Complex, 3>& v0, const InvariantTriple& target, const PrecisionContext& ctx,
           const Real& tol_mid, const Real& tol_end, int* steps) {
  const Real scale_ = target_scale(target);
  Real t(0L), dt(1L);
  const Real dt_min = pow2(-24);
  while (t < Real(1L)) {
    Real t1 = min(Real(1L), t + dt);
    const bool last = t1 == Real(1L);
    State trial = s;
    if (correct(trial, lerp(v0, target.v, t1), target.kind, ctx, scale_, last ? tol_end : tol_mid, 10)) {
      s = trial;
      t = t1;
      dt = ldexp(dt, 1);
      ++*steps;
    } else {
      dt = ldexp(dt, -1);
      if (dt < dt_min) return false;
    }
  }
  return true;
}

std::array<Complex, 3> forward(const PeriodMatrix& omega, InvariantKind kind, const PrecisionContext& ctx) {
  return invariants_at(omega, kind, ctx).v;
}

}  // namespace

std::array<Complex, 3> solve3(std::array<std::array<Complex, 3>, 3> m, std::array<Complex, 3> rhs) {
  Real mx(0L);
  for (auto& row : m) mx = max(mx, max_abs(row));
  const Real tiny = ldexp(mx, -static_cast<long>(working_precision()) / 2);
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r) {
      if (abs(m[r][c]) > abs(m[piv][c])) piv = r;
    }
    if (!(abs(m[piv][c]) > tiny)) throw Error(ErrorCode::kSingular, "singular 3x3 system");
    std::swap(m[c], m[piv]);
    std::swap(rhs[c], rhs[piv]);
    const Complex inv = Complex(1) / m[c][c];
    for (int r = c + 1; r < 3; ++r) {
      const Complex f = m[r][c] * inv;
      for (int k = c; k < 3; ++k) m[r][k] -= f * m[c][k];
      rhs[r] -= f * rhs[c];
    }
  }
  std::array<Complex, 3> x;
  for (int c = 2; c >= 0; --c) {
    Complex acc = rhs[c];
    for (int k = c + 1; k < 3; ++k) acc -= m[c][k] * x[k];
    x[c] = acc / m[c][c];
  }
  return x;
}

InvariantJet invariant_jet(const PeriodMatrix& omega, InvariantKind kind, const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx);
  if (kind != InvariantKind::kThetaQuotient) return chart_jet(omega, ThetaAction{}, kind, ctx);
  ThetaAction id;
  for (int i = 0; i < 16; ++i) id.perm[i] = i;
  InvariantJet j = chart_jet(omega.halved(), id, kind, ctx);
  for (auto& row : j.jac) {
    for (auto& e : row) e = ldexp(e, -1);
  }
  return j;
}

const std::array<std::array<std::complex<double>, 3>, 16>& inversion_seeds() {
  static const auto seeds = [] {
    std::array<std::array<std::complex<double>, 3>, 16> out;
    std::uint64_t x = 0x9e3779b97f4a7c15ULL;
    auto next = [&x] {
      x ^= x << 13;
      x ^= x >> 7;
      x ^= x << 17;
      return static_cast<double>(x >> 11) / 9007199254740992.0;
    };
    for (auto& s : out) {
      const double y1 = 0.9 + 0.8 * next();
      const double y2 = y1 + 0.6 * next();
      const double y3 = (0.1 + 0.35 * next()) * y1;
      const std::array<std::complex<double>, 3> t = {{{next() - 0.5, y1}, {next() - 0.5, y2}, {next() - 0.5, y3}}};
      s = reduce_to_fundamental(t).first;
    }
    return out;
  }();
  return seeds;
}

InversionResult borchardt_fast_path(const InvariantTriple& target, const PrecisionContext& ctx) {
  if (target.kind != InvariantKind::kThetaQuotient) {
    throw Error(ErrorCode::kInvalidArgument, "Borchardt path needs b' invariants");
  }
  PrecisionGuard guard(ctx);
  const std::array<Complex, 16> b = b_from_bprime(target.v);
  InversionResult res;
  res.omega = recover_tau(b, ctx);
  res.method = InversionMethod::kBorchardtDirect;
  const auto f = forward(res.omega, target.kind, ctx);
  std::array<Complex, 3> d;
  for (int i = 0; i < 3; ++i) d[i] = f[i] - target.v[i];
  res.residual = max_abs(d) / target_scale(target);
  if (!(res.residual < pow2(-ctx.n_bits + 48))) {
    throw Error(ErrorCode::kReject, "Borchardt candidate does not reproduce the target");
  }
  return res;
}

InversionResult invert_invariants(const InvariantTriple& target, const std::optional<PeriodMatrix>& seed,
                                  const PrecisionContext& ctx, const InversionOptions& opt) {
  const InvariantKind kind = target.kind;
  {
    PrecisionGuard guard(ctx);
    for (const auto& v : target.v) {
      if (!v.is_finite() || v.exponent() > ctx.n_bits / 2) {
        throw Error(ErrorCode::kSingularTarget, "target lies on the pole locus");
      }
    }
  }
  if (kind == InvariantKind::kThetaQuotient && opt.try_borchardt) {
    try {
      return borchardt_fast_path(target, ctx);
    } catch (const Error&) {
    }
  }

  const PrecisionContext low = ctx.low();
  std::vector<State> starts;
  {
    PrecisionGuard guard(low);
    if (seed) starts.push_back(state_from_omega(*seed, kind));
    // Pool seeds ordered by distance to the target in invariant space.
    std::vector<std::pair<double, int>> order;
    const auto& pool = inversion_seeds();
    for (int i = 0; i < static_cast<int>(pool.size()) && i < opt.max_seeds; ++i) {
      double d = std::numeric_limits<double>::infinity();
      try {
        const auto f = forward(PeriodMatrix::from_cd(pool[i]), kind, low);
        d = 0;
        for (int k = 0; k < 3; ++k) d = std::max(d, std::abs(f[k].to_cd() - target.v[k].to_cd()));
      } catch (const Error&) {
      }
      order.emplace_back(d, i);
    }
    std::stable_sort(order.begin(), order.end());
    for (const auto& [d, i] : order) starts.push_back(state_from_omega(PeriodMatrix::from_cd(pool[i]), kind));
  }

  bool singular = false;
  for (State s : starts) {
    int steps = 0;
    {
      PrecisionGuard guard(low);
      State ls{PeriodMatrix(s.w), s.g};
      InvariantTriple tl;
      tl.kind = kind;
      for (int i = 0; i < 3; ++i) tl.v[i] = Complex(target.v[i]);
      std::array<Complex, 3> v0;
      try {
        v0 = chart_jet(ls.w, theta_action_of(ls.g), kind, low).f;
      } catch (const Error&) {
        continue;
      }
      if (!track(ls, v0, tl, low, pow2(-low.n_bits / 2), pow2(-low.n_bits + 16), &steps)) continue;
      s = ls;
    }
    PrecisionGuard guard(ctx);
    State hs{PeriodMatrix(s.w), s.g};
    const Real scale_ = target_scale(target);
    const Real tol = pow2(-ctx.n_bits + 40);
    Real res(0L);
    if (!correct(hs, target.v, kind, ctx, scale_, tol, 8, &res)) {
      // Polishing failed from a converged low-precision point.
      try {
        solve3(chart_jet(hs.w, theta_action_of(hs.g), kind, ctx).jac, target.v);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kSingular) {
          singular = true;
          continue;
        }
      }
      throw Error(ErrorCode::kPrecision, "Newton polish stagnated at residual 2^" + std::to_string(res.exponent()));
    }
    InversionResult out;
    out.omega = omega_of(hs, kind);
    out.path_length = steps;
    out.method = InversionMethod::kNewtonContinuation;
    const auto f = forward(out.omega, kind, ctx);
    std::array<Complex, 3> d;
    for (int i = 0; i < 3; ++i) d[i] = f[i] - target.v[i];
    out.residual = max_abs(d) / scale_;
    if (!(out.residual < pow2(-ctx.n_bits + 48))) {
      throw Error(ErrorCode::kPrecision, "forward residual 2^" + std::to_string(out.residual.exponent()));
    }
    return out;
  }
  if (singular) throw Error(ErrorCode::kSingularTarget, "Jacobian degenerates at the solution");
  throw Error(ErrorCode::kPathFailure, "continuation failed from every seed");
}

}  // namespace g2mp
