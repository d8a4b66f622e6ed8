#include "g2mp/numerics/unipoly.hpp"

#include "g2mp/error.hpp"

namespace g2mp {

void trim_exact(UniPolyQ& p) {
  while (!p.coeffs.empty() && p.coeffs.back() == 0) p.coeffs.pop_back();
}

Real max_abs_coeff(const UniPoly& p) {
  Real m(0L);
  for (const auto& c : p.coeffs) {
    Real a = abs(c);
    if (a > m) m = std::move(a);
  }
  return m;
}

void trim(UniPoly& p, const Real& rel_tol) {
  const Real bound = max_abs_coeff(p) * rel_tol;
  while (!p.coeffs.empty() && abs(p.coeffs.back()) <= bound) p.coeffs.pop_back();
}

std::pair<UniPolyQ, UniPolyQ> divmod(const UniPolyQ& a, const UniPolyQ& b) {
  if (b.is_zero()) throw Error(ErrorCode::kInvalidArgument, "division by zero polynomial");
  UniPolyQ r = a;
  trim_exact(r);
  const int db = b.degree();
  if (r.degree() < db) return {UniPolyQ(), r};
  std::vector<Rational> q(r.degree() - db + 1, Rational(0));
  for (int i = r.degree(); i >= db; --i) {
    const Rational c = r.coeffs[i] / b.lead();
    q[i - db] = c;
    for (int j = 0; j <= db; ++j) r.coeffs[i - db + j] -= c * b.coeffs[j];
  }
  r.coeffs.resize(db);
  trim_exact(r);
  return {UniPolyQ(std::move(q)), r};
}

std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b) {
  if (b.is_zero()) throw Error(ErrorCode::kInvalidArgument, "division by zero polynomial");
  UniPoly r = a;
  const int db = b.degree();
  if (r.degree() < db) return {UniPoly(), r};
  std::vector<Complex> q(r.degree() - db + 1);
  const Complex inv_lead = Complex(1) / b.lead();
  ComplexScratch s;
  Complex prod;
  for (int i = r.degree(); i >= db; --i) {
    Complex c = r.coeffs[i] * inv_lead;
    for (int j = 0; j < db; ++j) {
      mul_into(prod, c, b.coeffs[j], s);
      r.coeffs[i - db + j] -= prod;
    }
    q[i - db] = std::move(c);
  }
  r.coeffs.resize(db);
  return {UniPoly(std::move(q)), r};
}

UniPoly synthetic_divide(const UniPoly& p, const Complex& r) {
  if (p.degree() < 1) return {};
  std::vector<Complex> q(p.degree());
  Complex acc = p.coeffs.back();
  for (int i = p.degree() - 1; i >= 0; --i) {
    q[i] = acc;
    acc = acc * r + p.coeffs[i];
  }
  return UniPoly(std::move(q));
}

EuclidRow ext_euclid_row(const UniPoly& g, const UniPoly& f, int k, int zero_bits) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "ext_euclid_row needs k >= 1");
  const long prec = working_precision();
  if (zero_bits <= 0) zero_bits = static_cast<int>(3 * prec / 4);
  const Real zero_tol = pow2(-zero_bits);
  const Real loss_tol = pow2(-prec / 2);

  UniPoly r0 = g;
  UniPoly r1 = f;
  trim(r1, zero_tol);
  if (r0.degree() <= r1.degree()) throw Error(ErrorCode::kInvalidArgument, "ext_euclid_row needs deg f < deg g");
  UniPoly t0;
  UniPoly t1 = UniPoly::constant(Complex(1));
  while (r1.degree() >= k) {
    auto [q, rem] = divmod(r0, r1);
    const Real scale = max(max_abs_coeff(r0), max_abs_coeff(q) * max_abs_coeff(r1));
    const Real zero_bound = scale * zero_tol;
    while (!rem.is_zero() && abs(rem.lead()) <= zero_bound) rem.coeffs.pop_back();
    if (!rem.is_zero() && abs(rem.lead()) < scale * loss_tol) {
      throw Error(ErrorCode::kPrecisionLoss, "leading coefficient lost in Euclidean remainder");
    }
    UniPoly t2 = t0 - q * t1;
    r0 = std::move(r1);
    r1 = std::move(rem);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  return {std::move(r1), std::move(t1)};
}

EuclidRowQ ext_euclid_row(const UniPolyQ& g, const UniPolyQ& f, int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "ext_euclid_row needs k >= 1");
  UniPolyQ r0 = g;
  UniPolyQ r1 = f;
  trim_exact(r0);
  trim_exact(r1);
  if (r0.degree() <= r1.degree()) throw Error(ErrorCode::kInvalidArgument, "ext_euclid_row needs deg f < deg g");
  UniPolyQ t0;
  UniPolyQ t1 = UniPolyQ::constant(Rational(1));
  while (r1.degree() >= k) {
    auto [q, rem] = divmod(r0, r1);
    UniPolyQ t2 = t0 - q * t1;
    trim_exact(t2);
    r0 = std::move(r1);
    r1 = std::move(rem);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  return {std::move(r1), std::move(t1)};
}

Rational to_rational(const Real& x) {
  if (!x.is_finite()) throw Error(ErrorCode::kNumeric, "non-finite value has no rational form");
  Integer m;
  const mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), x.get());
  Rational q(m);
  if (e >= 0) {
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  }
  q.canonicalize();
  return q;
}

Real to_real(const Rational& q) {
  Real r;
  mpfr_set_q(r.get(), q.get_mpq_t(), MPFR_RNDN);
  return r;
}

Rational rational_reconstruct(const Real& x, const Integer& den_bound) {
  const Rational window(Integer(1), 2 * den_bound * den_bound);
  return rational_reconstruct(x, den_bound, to_real(window));
}

Rational rational_reconstruct(const Real& x, const Integer& den_bound, const Real& tol) {
  if (den_bound < 1) throw Error(ErrorCode::kInvalidArgument, "denominator bound must be positive");
  Rational v = to_rational(x);
  // convergents p/q via the usual recurrences
  Integer p_prev = 1, q_prev = 0;
  Integer p_cur, q_cur;
  Integer a;
  mpz_fdiv_q(a.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  p_cur = a;
  q_cur = 1;
  Rational frac = v - Rational(a);
  Rational best(p_cur, q_cur);
  while (frac != 0) {
    const Rational inv = 1 / frac;
    mpz_fdiv_q(a.get_mpz_t(), inv.get_num_mpz_t(), inv.get_den_mpz_t());
    const Integer p_next = a * p_cur + p_prev;
    const Integer q_next = a * q_cur + q_prev;
    if (q_next > den_bound) break;
    p_prev = p_cur;
    q_prev = q_cur;
    p_cur = p_next;
    q_cur = q_next;
    best = Rational(p_cur, q_cur);
    frac = inv - Rational(a);
  }
  best.canonicalize();
  if (abs(x - to_real(best)) > tol) {
    throw Error(ErrorCode::kNoConvergent, "no convergent within tolerance; precision too low");
  }
  return best;
}

UniPoly poly_product_tree(const std::vector<Complex>& roots) {
  if (roots.empty()) throw Error(ErrorCode::kInvalidArgument, "product tree of no roots");
  std::vector<UniPoly> level;
  level.reserve(roots.size());
  for (const auto& r : roots) level.push_back(UniPoly(std::vector<Complex>{-r, Complex(1)}));
  while (level.size() > 1) {
    std::vector<UniPoly> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(level[i] * level[i + 1]);
    if (level.size() % 2 == 1) next.push_back(std::move(level.back()));
    level = std::move(next);
  }
  return std::move(level.front());
}

}  // namespace g2mp
