#include "g2mp/invariants/invariants.hpp"

#include <algorithm>
#include <map>

#include "g2mp/error.hpp"

namespace g2mp {

namespace {

struct Generator {
  ThetaAction action;
  int eps;  // zeta_gamma^4
};

// theta_i^4(g W) = eps det(CW + D)^2 (-1)^phase8[i] theta_perm[i]^4(W)
std::vector<Generator> generator_data() {
  const PrecisionContext ctx(96, 32, 64);
  PrecisionGuard guard(ctx);
  const PeriodMatrix w{Complex(Real(0.1), Real(1.2)), Complex(Real(-0.2), Real(1.5)), Complex(Real(0.05), Real(0.3))};
  const ThetaVector at_w = theta_series_all(w, ctx);
  std::vector<Generator> out;
  for (const auto& g : {SymplecticMatrix::J(), SymplecticMatrix::M(0, 0), SymplecticMatrix::M(0, 1),
                        SymplecticMatrix::M(1, 1)}) {
    const ThetaAction ta = theta_action_of(g);
    const ThetaVector at_gw = theta_series_all(act(g, w), ctx, nullptr, 4000000);
    const Complex kappa = at_gw[0] / mul_zeta8_pow(at_w[ta.perm[0]], ta.phase8[0]);
    const Complex det = cocycle(g, w);
    const Complex e = pow(kappa, 4) / (det * det);
    const double re = e.re.to_double();
    if (std::abs(std::abs(re) - 1) > 1e-10 || std::abs(e.im.to_double()) > 1e-10) {
      throw Error(ErrorCode::kNumeric, "eighth root bootstrap failed");
    }
    out.push_back({ta, re > 0 ? 1 : -1});
  }
  return out;
}

template <size_t K>
std::map<std::array<int, K>, int> propagate(const std::array<int, K>& start, const std::vector<Generator>& gens,
                                            int weight_eps_power, bool& consistent) {
  std::map<std::array<int, K>, int> sign{{start, 1}};
  std::vector<std::array<int, K>> stack{start};
  consistent = true;
  while (!stack.empty()) {
    const auto t = stack.back();
    stack.pop_back();
    for (const auto& g : gens) {
      std::array<int, K> img;
      int ph = 0;
      for (size_t j = 0; j < K; ++j) {
        img[j] = g.action.perm[t[j]];
        ph += g.action.phase8[t[j]];
      }
      std::sort(img.begin(), img.end());
      int s = sign[t] * ((ph & 1) ? -1 : 1);
      if (weight_eps_power & 1) s *= g.eps;
      auto it = sign.find(img);
      if (it == sign.end()) {
        sign[img] = s;
        stack.push_back(img);
      } else if (it->second != s) {
        consistent = false;
      }
    }
  }
  return sign;
}

struct FormTables {
  std::vector<SignedTriple> triples;
  std::vector<std::array<int, 6>> sextets;
};

FormTables build_tables() {
  const auto gens = generator_data();
  FormTables tab;
  // h6: the consistent orbit of triple monomials (theta_i theta_j theta_k)^4
  std::map<std::array<int, 3>, int> done;
  for (size_t x = 0; x < kEvenThetas.size(); ++x) {
    for (size_t y = x + 1; y < kEvenThetas.size(); ++y) {
      for (size_t z = y + 1; z < kEvenThetas.size(); ++z) {
        const std::array<int, 3> t{kEvenThetas[x], kEvenThetas[y], kEvenThetas[z]};
        if (done.count(t)) continue;
        bool ok = false;
        const auto orbit = propagate<3>(t, gens, 3, ok);
        for (const auto& [k, s] : orbit) done[k] = ok ? s : 0;
      }
    }
  }
  for (const auto& [k, s] : done) {
    if (s != 0) tab.triples.push_back({k, s});
  }
  if (tab.triples.size() != 60) throw Error(ErrorCode::kNumeric, "h6 bootstrap did not find 60 triples");
  // global sign: positive limit at the cusp, where theta_0..theta_3 -> 1
  int cusp = 0;
  for (const auto& t : tab.triples) {
    if (t.idx[2] < 4) cusp += t.sign;
  }
  if (cusp == 0) throw Error(ErrorCode::kNumeric, "h6 cusp value vanishes");
  if (cusp < 0) {
    for (auto& t : tab.triples) t.sign = -t.sign;
  }
  // h12: complements of zero-sum quadruples
  for (size_t a = 0; a < 10; ++a) {
    for (size_t b = a + 1; b < 10; ++b) {
      for (size_t c = b + 1; c < 10; ++c) {
        for (size_t d = c + 1; d < 10; ++d) {
          if ((kEvenThetas[a] ^ kEvenThetas[b] ^ kEvenThetas[c] ^ kEvenThetas[d]) != 0) continue;
          std::array<int, 6> s;
          int n = 0;
          for (size_t e = 0; e < 10; ++e) {
            if (e != a && e != b && e != c && e != d) s[n++] = kEvenThetas[e];
          }
          tab.sextets.push_back(s);
        }
      }
    }
  }
  if (tab.sextets.size() != 15) throw Error(ErrorCode::kNumeric, "expected 15 sextets");
  for (const auto& s : tab.sextets) {
    bool ok = false;
    const auto orbit = propagate<6>(s, gens, 6, ok);
    if (!ok || orbit.size() != 15) throw Error(ErrorCode::kNumeric, "h12 sextets not a signed orbit");
    for (const auto& [k, sg] : orbit) {
      if (sg != 1) throw Error(ErrorCode::kNumeric, "h12 sextets need signs");
    }
  }
  return tab;
}

const FormTables& tables() {
  static const FormTables t = build_tables();
  return t;
}

void require(const Complex& z, const char* what) {
  if (z.is_zero()) throw Error(ErrorCode::kSingular, std::string("vanishing denominator ") + what);
}

}  // namespace

std::string to_string(InvariantKind k) {
  switch (k) {
    case InvariantKind::kIgusa: return "igusa";
    case InvariantKind::kStreng: return "streng";
    case InvariantKind::kThetaQuotient: return "bprime";
  }
  return "?";
}

InvariantKind invariant_kind_from_string(const std::string& s) {
  if (s == "igusa") return InvariantKind::kIgusa;
  if (s == "streng") return InvariantKind::kStreng;
  if (s == "bprime" || s == "theta") return InvariantKind::kThetaQuotient;
  throw Error(ErrorCode::kInvalidArgument, "unknown invariant kind " + s);
}

const std::vector<SignedTriple>& h6_triples() { return tables().triples; }
const std::vector<std::array<int, 6>>& h12_sextets() { return tables().sextets; }

SiegelFormValues siegel_forms(const std::array<Complex, 16>& theta) {
  std::array<Complex, 16> t4;
  SiegelFormValues f;
  f.h4 = Complex(0);
  f.h10 = Complex(1);
  for (int i : kEvenThetas) {
    const Complex sq = theta[i] * theta[i];
    t4[i] = sq * sq;
    f.h4 += t4[i] * t4[i];
    f.h10 *= sq;
  }
  f.h6 = Complex(0);
  for (const auto& t : h6_triples()) {
    const Complex m = t4[t.idx[0]] * t4[t.idx[1]] * t4[t.idx[2]];
    if (t.sign > 0) f.h6 += m;
    else f.h6 -= m;
  }
  f.h12 = Complex(0);
  for (const auto& s : h12_sextets()) {
    Complex m = t4[s[0]];
    for (int j = 1; j < 6; ++j) m *= t4[s[j]];
    f.h12 += m;
  }
  f.h16 = (f.h12 * f.h4 - ldexp(f.h6 * f.h10, 1)) / Complex(3);
  return f;
}

namespace {

void check_h10(const SiegelFormValues& f, const Real& theta_max, const PrecisionContext& ctx) {
  Real scale = theta_max;
  for (int i = 1; i < 20; ++i) scale *= theta_max;
  if (f.h10.is_zero() || abs(f.h10) < ldexp(scale, -ctx.n_bits / 2)) {
    throw Error(ErrorCode::kProductOfElliptic, "h10 vanishes (product of elliptic curves)");
  }
}

}  // namespace

InvariantTriple igusa_from_forms(const SiegelFormValues& f, const Real& theta_max, const PrecisionContext& ctx) {
  check_h10(f, theta_max, ctx);
  const Complex h10_2 = f.h10 * f.h10, h10_4 = h10_2 * h10_2;
  const Complex h12_2 = f.h12 * f.h12;
  InvariantTriple t;
  t.kind = InvariantKind::kIgusa;
  t.v[0] = h12_2 * h12_2 * f.h12 / (h10_4 * h10_2);
  t.v[1] = f.h4 * h12_2 * f.h12 / h10_4;
  t.v[2] = f.h16 * h12_2 / h10_4;
  return t;
}

InvariantTriple streng_from_forms(const SiegelFormValues& f, const Real& theta_max, const PrecisionContext& ctx) {
  check_h10(f, theta_max, ctx);
  const Complex h10_2 = f.h10 * f.h10;
  const Complex h4_2 = f.h4 * f.h4;
  InvariantTriple t;
  t.kind = InvariantKind::kStreng;
  t.v[0] = f.h4 * f.h6 / f.h10;
  t.v[1] = h4_2 * f.h12 / h10_2;
  t.v[2] = h4_2 * h4_2 * f.h4 / h10_2;
  return t;
}

InvariantTriple streng_igusa_convert(const InvariantTriple& t) {
  InvariantTriple out;
  if (t.kind == InvariantKind::kIgusa) {
    const Complex &j1 = t.v[0], &j2 = t.v[1], &j3 = t.v[2];
    require(j1, "j1");
    out.kind = InvariantKind::kStreng;
    out.v[0] = j2 * (j2 - Complex(3) * j3) / ldexp(j1, 1);
    out.v[1] = j2 * j2 / j1;
    out.v[2] = pow(j2, 5) / pow(j1, 3);
    return out;
  }
  if (t.kind == InvariantKind::kStreng) {
    const Complex &i1 = t.v[0], &i2 = t.v[1], &i3 = t.v[2];
    require(i3, "i3");
    out.kind = InvariantKind::kIgusa;
    out.v[0] = pow(i2, 5) / (i3 * i3);
    out.v[1] = pow(i2, 3) / i3;
    out.v[2] = i2 * i2 * (i2 - ldexp(i1, 1)) / (Complex(3) * i3);
    return out;
  }
  throw Error(ErrorCode::kInvalidArgument, "conversion needs an Igusa or Streng triple");
}

std::array<Complex, 3> bprime_from_b(const std::array<Complex, 16>& b) {
  const Complex den = Complex(1) + b[4] + b[8] + b[12];
  require(den, "1 + b4 + b8 + b12");
  const Complex inv = Complex(1) / den;
  return {(b[1] + b[9]) * inv, (b[2] + b[6]) * inv, (b[3] + b[15]) * inv};
}

std::array<Complex, 16> b_from_bprime(const std::array<Complex, 3>& bp) {
  const auto sq = duplication({Complex(1), bp[0], bp[1], bp[2]});
  require(sq[0], "theta_0^2");
  const Complex inv = Complex(1) / sq[0];
  std::array<Complex, 16> b;
  for (int i = 0; i < 16; ++i) b[i] = sq[i] * inv;
  return b;
}

InvariantTriple invariants_at(const PeriodMatrix& omega, InvariantKind kind, const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx);
  if (kind == InvariantKind::kThetaQuotient) {
    InvariantTriple t;
    t.kind = kind;
    t.v = bprime_of(omega, ctx);
    return t;
  }
  const ReductionResult red = reduce_to_fundamental(omega);
  const ThetaVector tv = theta_series_all(red.omega_reduced, ctx);
  Real tmax(0L);
  for (int i : kEvenThetas) tmax = max(tmax, abs(tv[i]));
  const SiegelFormValues f = siegel_forms(tv);
  return kind == InvariantKind::kIgusa ? igusa_from_forms(f, tmax, ctx) : streng_from_forms(f, tmax, ctx);
}

}  // namespace g2mp
