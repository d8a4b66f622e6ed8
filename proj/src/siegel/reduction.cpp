#include "g2mp/siegel/reduction.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <set>

#include "g2mp/error.hpp"

namespace g2mp {

namespace {

using cd = std::complex<double>;
using Tau = std::array<cd, 3>;

// nearest integer, keeping +-1/2 in place
long iround(double x) { return std::abs(x) > 0.5 + 1e-14 ? std::lround(x) : 0; }

// omega(x, y) = x J ty
std::int64_t pairing(const std::array<std::int64_t, 4>& x, const std::array<std::int64_t, 4>& y) {
  return x[0] * y[2] + x[1] * y[3] - x[2] * y[0] - x[3] * y[1];
}

// Hermite normal form of a full-rank 2x4 integer matrix under left GL2(Z).
std::array<std::int64_t, 8> hnf(std::array<std::int64_t, 4> r0, std::array<std::int64_t, 4> r1) {
  int row = 0;
  std::array<std::int64_t, 4>* rows[2] = {&r0, &r1};
  int pivot_col[2] = {-1, -1};
  for (int col = 0; col < 4 && row < 2; ++col) {
    // Euclid on the column entries of rows row..1
    if (row == 0) {
      while ((*rows[1])[col] != 0) {
        const std::int64_t q = (*rows[0])[col] / (*rows[1])[col];
        for (int j = 0; j < 4; ++j) (*rows[0])[j] -= q * (*rows[1])[j];
        std::swap(rows[0], rows[1]);
      }
    }
    if ((*rows[row])[col] == 0) continue;
    if ((*rows[row])[col] < 0) {
      for (int j = 0; j < 4; ++j) (*rows[row])[j] = -(*rows[row])[j];
    }
    pivot_col[row] = col;
    ++row;
  }
  if (row != 2) throw Error(ErrorCode::kInvalidArgument, "rank deficient pair");
  // reduce the first row modulo the second pivot
  const int c = pivot_col[1];
  const std::int64_t piv = (*rows[1])[c];
  std::int64_t q = (*rows[0])[c] / piv;
  if ((*rows[0])[c] - q * piv < 0) --q;
  for (int j = 0; j < 4; ++j) (*rows[0])[j] -= q * (*rows[1])[j];
  std::array<std::int64_t, 8> out;
  for (int j = 0; j < 4; ++j) {
    out[j] = (*rows[0])[j];
    out[4 + j] = (*rows[1])[j];
  }
  return out;
}

// Completes isotropic primitive rows (r3, r4) to a symplectic matrix.
std::optional<SymplecticMatrix> complete(const std::array<std::int64_t, 4>& r3, const std::array<std::int64_t, 4>& r4) {
  std::optional<std::array<std::int64_t, 4>> r1, r2;
  for (int code = 0; code < 625 && !(r1 && r2); ++code) {
    std::array<std::int64_t, 4> x;
    int c = code;
    for (auto& v : x) {
      v = c % 5 - 2;
      c /= 5;
    }
    const auto a = pairing(x, r3), b = pairing(x, r4);
    if (!r1 && a == 1 && b == 0) r1 = x;
    if (!r2 && a == 0 && b == 1) r2 = x;
  }
  if (!r1 || !r2) return std::nullopt;
  const std::int64_t k = pairing(*r1, *r2);
  for (int j = 0; j < 4; ++j) (*r1)[j] += k * r4[j];
  Mat4 m;
  for (int j = 0; j < 4; ++j) {
    m(0, j) = (*r1)[j];
    m(1, j) = (*r2)[j];
    m(2, j) = r3[j];
    m(3, j) = r4[j];
  }
  if (!is_symplectic(m)) return std::nullopt;
  return SymplecticMatrix(m);
}

SymplecticMatrix diag_action(const Mat2& u) {
  // Omega -> tU Omega U is (tU, 0; 0, U^-1)
  const Mat2 ut{u.a, u.c, u.b, u.d};
  const std::int64_t det = u.det();
  const Mat2 uinv{u.d * det, -u.b * det, -u.c * det, u.a * det};
  return SymplecticMatrix::from_blocks(ut, Mat2{0, 0, 0, 0}, Mat2{0, 0, 0, 0}, uinv);
}

SymplecticMatrix translation(std::int64_t b1, std::int64_t b3, std::int64_t b2) {
  return SymplecticMatrix::from_blocks(Mat2{1, 0, 0, 1}, Mat2{b1, b3, b3, b2}, Mat2{0, 0, 0, 0}, Mat2{1, 0, 0, 1});
}

double cand_det_abs(const SymplecticMatrix& g, const Tau& t) {
  const Mat2 c = g.C(), d = g.D();
  const cd m00 = double(c.a) * t[0] + double(c.b) * t[2] + double(d.a);
  const cd m01 = double(c.a) * t[2] + double(c.b) * t[1] + double(d.b);
  const cd m10 = double(c.c) * t[0] + double(c.d) * t[2] + double(d.c);
  const cd m11 = double(c.c) * t[2] + double(c.d) * t[1] + double(d.d);
  return std::abs(m00 * m11 - m01 * m10);
}

// One reduction step in double precision; identity when nothing fires.
SymplecticMatrix next_step(const Tau& t, bool& done) {
  done = false;
  const RealSym2 y{t[0].imag(), t[2].imag(), t[1].imag()};
  const auto [yr, u] = minkowski_reduce(y);
  if (!(u == Mat2{1, 0, 0, 1})) return diag_action(u);
  const long b1 = iround(t[0].real()), b2 = iround(t[1].real()), b3 = iround(t[2].real());
  if (b1 != 0 || b2 != 0 || b3 != 0) return translation(-b1, -b3, -b2);
  const auto& cands = det_candidates();
  double best = 1.0 - 1e-12;
  const SymplecticMatrix* pick = nullptr;
  for (const auto& g : cands) {
    const double v = cand_det_abs(g, t);
    if (v < best) {
      best = v;
      pick = &g;
    }
  }
  if (pick) return *pick;
  done = true;
  return SymplecticMatrix::identity();
}

}  // namespace

std::pair<RealSym2, Mat2> minkowski_reduce(const RealSym2& y) {
  RealSym2 r = y;
  Mat2 u{1, 0, 0, 1};
  auto apply = [&](const Mat2& v) {
    // r <- tV r V, u <- u V
    const double a = r.y11, b = r.y12, d = r.y22;
    const double n11 = v.a * (a * v.a + b * v.c) + v.c * (b * v.a + d * v.c);
    const double n12 = v.a * (a * v.b + b * v.d) + v.c * (b * v.b + d * v.d);
    const double n22 = v.b * (a * v.b + b * v.d) + v.d * (b * v.b + d * v.d);
    r = {n11, n12, n22};
    u = {u.a * v.a + u.b * v.c, u.a * v.b + u.b * v.d, u.c * v.a + u.d * v.c, u.c * v.b + u.d * v.d};
  };
  for (int iter = 0; iter < 200; ++iter) {
    bool changed = false;
    const double q = r.y12 / r.y11;
    const long n = std::abs(q) > 0.5 + 1e-14 ? std::lround(q) : 0;
    if (n != 0) {
      apply(Mat2{1, -n, 0, 1});
      changed = true;
    }
    if (r.y11 > r.y22 * (1 + 1e-14)) {
      apply(Mat2{0, 1, 1, 0});
      changed = true;
    }
    if (!changed) break;
  }
  if (r.y12 < 0) apply(Mat2{1, 0, 0, -1});
  return {r, u};
}

const std::vector<SymplecticMatrix>& det_candidates() {
  static const std::vector<SymplecticMatrix> cands = [] {
    std::vector<SymplecticMatrix> out;
    std::set<std::array<std::int64_t, 8>> seen;
    for (int code = 0; code < 6561; ++code) {
      std::int64_t v[8];
      int c = code;
      for (auto& x : v) {
        x = c % 3 - 1;
        c /= 3;
      }
      // v = (c11, c12, c21, c22, d11, d12, d21, d22)
      if (v[0] == 0 && v[1] == 0 && v[2] == 0 && v[3] == 0) continue;
      const std::array<std::int64_t, 4> r3{v[0], v[1], v[4], v[5]};
      const std::array<std::int64_t, 4> r4{v[2], v[3], v[6], v[7]};
      if (pairing(r3, r4) != 0) continue;
      // primitive: gcd of the 2x2 minors is 1
      std::int64_t g = 0;
      for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) g = std::gcd(g, r3[i] * r4[j] - r3[j] * r4[i]);
      }
      if (g != 1) continue;
      const auto key = hnf(r3, r4);
      if (seen.count(key)) continue;
      auto m = complete(r3, r4);
      if (!m) continue;
      seen.insert(key);
      out.push_back(*m);
    }
    return out;
  }();
  return cands;
}

std::pair<Tau, SymplecticMatrix> reduce_to_fundamental(const Tau& t0, int max_steps) {
  Tau t = t0;
  SymplecticMatrix total;
  for (int step = 0; step < max_steps; ++step) {
    bool done = false;
    const SymplecticMatrix g = next_step(t, done);
    if (done) return {t, total};
    t = act(g, t);
    total = g * total;
  }
  throw Error(ErrorCode::kNonTermination, "reduction did not terminate");
}

ReductionResult reduce_to_fundamental(const PeriodMatrix& omega, int max_steps) {
  if (!omega.in_upper_half_space()) throw Error(ErrorCode::kInvalidArgument, "period matrix not in H2");
  ReductionResult res{omega, SymplecticMatrix::identity(), 0};
  for (int step = 0; step < max_steps; ++step) {
    bool done = false;
    const SymplecticMatrix g = next_step(res.omega_reduced.to_cd(), done);
    if (done) return res;
    res.omega_reduced = act(g, res.omega_reduced);
    res.gamma = g * res.gamma;
    ++res.steps;
  }
  throw Error(ErrorCode::kNonTermination, "reduction did not terminate");
}

bool is_in_fundamental(const Tau& t, double tol) {
  for (const auto& z : t) {
    if (std::abs(z.real()) > 0.5 + tol) return false;
  }
  const double y11 = t[0].imag(), y12 = t[2].imag(), y22 = t[1].imag();
  if (y12 < -tol || 2 * y12 > y11 + tol || y11 > y22 + tol) return false;
  for (const auto& g : det_candidates()) {
    if (cand_det_abs(g, t) < 1 - tol) return false;
  }
  return true;
}

Real min_candidate_det(const PeriodMatrix& omega) {
  Real best(1e300);
  for (const auto& g : det_candidates()) {
    Real v = abs(cocycle(g, omega));
    if (v < best) best = std::move(v);
  }
  return best;
}

bool is_in_fundamental(const PeriodMatrix& omega, const Real& tol) {
  const Real half = Real(0.5) + tol;
  for (const Complex* z : {&omega.tau1, &omega.tau2, &omega.tau3}) {
    if (abs(z->re) > half) return false;
  }
  const Real& y11 = omega.tau1.im;
  const Real& y12 = omega.tau3.im;
  const Real& y22 = omega.tau2.im;
  if (y12 < -tol || ldexp(y12, 1) > y11 + tol || y11 > y22 + tol) return false;
  return min_candidate_det(omega) >= Real(1L) - tol;
}

}  // namespace g2mp
