#include "g2mp/symplectic/symplectic.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>

#include "g2mp/error.hpp"

namespace g2mp {

namespace {

std::int64_t checked_mul(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_mul_overflow(x, y, &r)) throw Error(ErrorCode::kNumeric, "integer overflow in matrix product");
  return r;
}

std::int64_t checked_add(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_add_overflow(x, y, &r)) throw Error(ErrorCode::kNumeric, "integer overflow in matrix product");
  return r;
}

std::int64_t mod(std::int64_t x, std::int64_t m) {
  const std::int64_t r = x % m;
  return r < 0 ? r + m : r;
}

const Mat4& omega_j() {
  static const Mat4 j = [] {
    Mat4 m;
    m(0, 2) = 1;
    m(1, 3) = 1;
    m(2, 0) = -1;
    m(3, 1) = -1;
    return m;
  }();
  return j;
}

// Images mod 4 of Gamma(2,4): I + 2X with X = (P, Q; R, tP), Q and R
// symmetric with even diagonal.
const std::vector<Mat4>& gamma24_mod4() {
  static const std::vector<Mat4> elems = [] {
    std::vector<Mat4> out;
    for (int bits = 0; bits < 64; ++bits) {
      const int p00 = bits & 1, p01 = (bits >> 1) & 1, p10 = (bits >> 2) & 1, p11 = (bits >> 3) & 1;
      const int q = (bits >> 4) & 1, r = (bits >> 5) & 1;
      Mat4 x;
      x(0, 0) = p00;
      x(0, 1) = p01;
      x(1, 0) = p10;
      x(1, 1) = p11;
      x(2, 2) = p00;
      x(2, 3) = p10;
      x(3, 2) = p01;
      x(3, 3) = p11;
      x(0, 3) = q;
      x(1, 2) = q;
      x(2, 1) = r;
      x(3, 0) = r;
      Mat4 h = Mat4::identity();
      for (int i = 0; i < 16; ++i) h.e[i] = mod(h.e[i] + 2 * x.e[i], 4);
      out.push_back(h);
    }
    return out;
  }();
  return elems;
}

std::string gamma24_key(const Mat4& m) {
  Mat4 red;
  for (int i = 0; i < 16; ++i) red.e[i] = mod(m.e[i], 4);
  std::uint32_t best = UINT32_MAX;
  for (const auto& h : gamma24_mod4()) {
    std::uint32_t code = 0;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        std::int64_t s = 0;
        for (int k = 0; k < 4; ++k) s += red(i, k) * h(k, j);
        code = code * 4 + static_cast<std::uint32_t>(s % 4);
      }
    }
    best = std::min(best, code);
  }
  return std::string("g24:") + std::to_string(best);
}

std::int64_t inv_mod(std::int64_t a, std::int64_t p) {
  std::int64_t r = 1;
  std::int64_t b = mod(a, p);
  for (std::int64_t e = p - 2; e > 0; e >>= 1) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
  }
  return r;
}

// Row space of the bottom half [C D] mod p, as reduced echelon form.
std::string gamma0_key(const Mat4& m, int p) {
  std::int64_t rows[2][4];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 4; ++j) rows[i][j] = mod(m(i + 2, j), p);
  }
  int r = 0;
  for (int col = 0; col < 4 && r < 2; ++col) {
    int piv = -1;
    for (int i = r; i < 2; ++i) {
      if (rows[i][col] != 0) {
        piv = i;
        break;
      }
    }
    if (piv < 0) continue;
    std::swap(rows[r], rows[piv]);
    const std::int64_t inv = inv_mod(rows[r][col], p);
    for (int j = 0; j < 4; ++j) rows[r][j] = rows[r][j] * inv % p;
    for (int i = 0; i < 2; ++i) {
      if (i == r || rows[i][col] == 0) continue;
      const std::int64_t f = rows[i][col];
      for (int j = 0; j < 4; ++j) rows[i][j] = mod(rows[i][j] - f * rows[r][j], p);
    }
    ++r;
  }
  if (r != 2) throw Error(ErrorCode::kInvalidArgument, "bottom rows not of full rank mod p");
  std::string key = "g0:";
  for (auto& row : rows) {
    for (std::int64_t v : row) key += std::to_string(v) + ",";
  }
  return key;
}

std::string level2_key(const Mat4& m) {
  std::string key = "g2:";
  for (std::int64_t v : m.e) key += static_cast<char>('0' + mod(v, 2));
  return key;
}

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

}  // namespace

Mat4 Mat4::identity() {
  Mat4 m;
  for (int i = 0; i < 4; ++i) m(i, i) = 1;
  return m;
}

Mat4 Mat4::transpose() const {
  Mat4 t;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) t(i, j) = (*this)(j, i);
  }
  return t;
}

Mat4 operator*(const Mat4& x, const Mat4& y) {
  Mat4 r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      std::int64_t s = 0;
      for (int k = 0; k < 4; ++k) s = checked_add(s, checked_mul(x(i, k), y(k, j)));
      r(i, j) = s;
    }
  }
  return r;
}

bool is_symplectic(const Mat4& m) {
  try {
    return m.transpose() * omega_j() * m == omega_j();
  } catch (const Error&) {
    return false;
  }
}

SymplecticMatrix::SymplecticMatrix(const Mat4& m) : m_(m) {
  if (!is_symplectic(m)) throw Error(ErrorCode::kInvalidArgument, "matrix is not symplectic");
}

SymplecticMatrix::SymplecticMatrix(std::initializer_list<std::int64_t> rows) {
  if (rows.size() != 16) throw Error(ErrorCode::kInvalidArgument, "symplectic matrix needs 16 entries");
  std::copy(rows.begin(), rows.end(), m_.e.begin());
  if (!is_symplectic(m_)) throw Error(ErrorCode::kInvalidArgument, "matrix is not symplectic");
}

SymplecticMatrix SymplecticMatrix::J() { return SymplecticMatrix(omega_j(), Unchecked{}); }

SymplecticMatrix SymplecticMatrix::M(int i, int j) {
  if (i < 0 || i > 1 || j < 0 || j > 1) throw Error(ErrorCode::kInvalidArgument, "generator index out of range");
  Mat4 m = Mat4::identity();
  m(i, 2 + j) = 1;
  m(j, 2 + i) = 1;
  return SymplecticMatrix(m, Unchecked{});
}

SymplecticMatrix SymplecticMatrix::from_blocks(const Mat2& a, const Mat2& b, const Mat2& c, const Mat2& d) {
  Mat4 m;
  const Mat2* blocks[4] = {&a, &b, &c, &d};
  for (int k = 0; k < 4; ++k) {
    const int r = (k / 2) * 2, col = (k % 2) * 2;
    m(r, col) = blocks[k]->a;
    m(r, col + 1) = blocks[k]->b;
    m(r + 1, col) = blocks[k]->c;
    m(r + 1, col + 1) = blocks[k]->d;
  }
  return SymplecticMatrix(m);
}

SymplecticMatrix SymplecticMatrix::inverse() const {
  // (tD, -tB; -tC, tA)
  Mat4 r;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      r(i, j) = m_(j + 2, i + 2);
      r(i, j + 2) = -m_(j, i + 2);
      r(i + 2, j) = -m_(j + 2, i);
      r(i + 2, j + 2) = m_(j, i);
    }
  }
  return SymplecticMatrix(r, Unchecked{});
}

SymplecticMatrix SymplecticMatrix::transpose() const { return SymplecticMatrix(m_.transpose(), Unchecked{}); }

SymplecticMatrix SymplecticMatrix::operator-() const {
  Mat4 r = m_;
  for (auto& v : r.e) v = -v;
  return SymplecticMatrix(r, Unchecked{});
}

std::int64_t SymplecticMatrix::max_abs_entry() const {
  std::int64_t m = 0;
  for (auto v : m_.e) m = std::max(m, v < 0 ? -v : v);
  return m;
}

std::string SymplecticMatrix::to_string() const {
  std::ostringstream os;
  for (int i = 0; i < 16; ++i) os << (i ? " " : "") << m_.e[i];
  return os.str();
}

SymplecticMatrix operator*(const SymplecticMatrix& x, const SymplecticMatrix& y) {
  return SymplecticMatrix(x.m_ * y.m_, SymplecticMatrix::Unchecked{});
}

namespace {

CMat2 block_c(const Mat2& b) { return {Complex(b.a), Complex(b.b), Complex(b.c), Complex(b.d)}; }

}  // namespace

PeriodMatrix act(const SymplecticMatrix& g, const PeriodMatrix& omega) {
  const CMat2 om = omega.mat();
  const CMat2 num = block_c(g.A()) * om + block_c(g.B());
  const CMat2 den = block_c(g.C()) * om + block_c(g.D());
  const CMat2 r = num * den.inverse();
  const Real scale = max(Real(1L), max(abs(r.a), max(abs(r.b), abs(r.d))));
  if (abs(r.b - r.c) > scale * pow2(-static_cast<long>(working_precision()) / 2)) {
    throw Error(ErrorCode::kNumeric, "symplectic action lost symmetry");
  }
  return PeriodMatrix::from(r);
}

std::array<std::complex<double>, 3> act(const SymplecticMatrix& g, const std::array<std::complex<double>, 3>& t) {
  using cd = std::complex<double>;
  const Mat2 a = g.A(), b = g.B(), c = g.C(), d = g.D();
  const cd o00 = t[0], o01 = t[2], o11 = t[1];
  const cd n00 = double(a.a) * o00 + double(a.b) * o01 + double(b.a);
  const cd n01 = double(a.a) * o01 + double(a.b) * o11 + double(b.b);
  const cd n10 = double(a.c) * o00 + double(a.d) * o01 + double(b.c);
  const cd n11 = double(a.c) * o01 + double(a.d) * o11 + double(b.d);
  const cd d00 = double(c.a) * o00 + double(c.b) * o01 + double(d.a);
  const cd d01 = double(c.a) * o01 + double(c.b) * o11 + double(d.b);
  const cd d10 = double(c.c) * o00 + double(c.d) * o01 + double(d.c);
  const cd d11 = double(c.c) * o01 + double(c.d) * o11 + double(d.d);
  const cd det = d00 * d11 - d01 * d10;
  const cd i00 = d11 / det, i01 = -d01 / det, i10 = -d10 / det, i11 = d00 / det;
  const cd r00 = n00 * i00 + n01 * i10;
  const cd r01 = n00 * i01 + n01 * i11;
  const cd r10 = n10 * i00 + n11 * i10;
  const cd r11 = n10 * i01 + n11 * i11;
  return {r00, r11, 0.5 * (r01 + r10)};
}

Complex cocycle(const SymplecticMatrix& g, const PeriodMatrix& omega) {
  return (block_c(g.C()) * omega.mat() + block_c(g.D())).det();
}

std::string Subgroup::name() const {
  switch (id) {
    case GroupId::kGamma2: return "Gamma2";
    case GroupId::kGamma24: return "Gamma(2,4)";
    case GroupId::kGamma2Level: return "Gamma(2)";
    case GroupId::kGamma0: return "Gamma0(" + std::to_string(p) + ")";
    case GroupId::kGamma24Gamma0: return "Gamma(2,4)&Gamma0(" + std::to_string(p) + ")";
  }
  return "?";
}

bool in_gamma0(const SymplecticMatrix& g, int p) {
  const Mat2 c = g.C();
  return c.a % p == 0 && c.b % p == 0 && c.c % p == 0 && c.d % p == 0;
}

bool in_gamma_level2(const SymplecticMatrix& g) {
  const Mat4 id = Mat4::identity();
  for (int i = 0; i < 16; ++i) {
    if (mod(g.mat().e[i] - id.e[i], 2) != 0) return false;
  }
  return true;
}

bool in_gamma24(const SymplecticMatrix& g) {
  if (!in_gamma_level2(g)) return false;
  const Mat2 b = g.B(), c = g.C();
  return mod(b.a, 4) == 0 && mod(b.d, 4) == 0 && mod(c.a, 4) == 0 && mod(c.d, 4) == 0;
}

bool membership(const SymplecticMatrix& g, const Subgroup& h) {
  switch (h.id) {
    case GroupId::kGamma2: return true;
    case GroupId::kGamma24: return in_gamma24(g);
    case GroupId::kGamma2Level: return in_gamma_level2(g);
    case GroupId::kGamma0: return in_gamma0(g, h.p);
    case GroupId::kGamma24Gamma0: return in_gamma24(g) && in_gamma0(g, h.p);
  }
  return false;
}

std::string coset_key(const SymplecticMatrix& g, const Subgroup& h) {
  switch (h.id) {
    case GroupId::kGamma2: return "";
    case GroupId::kGamma24: return gamma24_key(g.mat());
    case GroupId::kGamma2Level: return level2_key(g.mat());
    case GroupId::kGamma0: return gamma0_key(g.mat(), h.p);
    case GroupId::kGamma24Gamma0: return gamma24_key(g.mat()) + gamma0_key(g.mat(), h.p);
  }
  return "";
}

std::vector<SymplecticMatrix> group_generators(const Subgroup& group) {
  std::vector<SymplecticMatrix> gens;
  auto add = [&gens](const SymplecticMatrix& g) {
    gens.push_back(g);
    gens.push_back(g.inverse());
  };
  switch (group.id) {
    case GroupId::kGamma2:
      add(SymplecticMatrix::J());
      add(SymplecticMatrix::M(0, 0));
      add(SymplecticMatrix::M(0, 1));
      add(SymplecticMatrix::M(1, 1));
      break;
    case GroupId::kGamma24: {
      // upper and lower unipotents with B, C in {4 e11, 4 e22, 2(e12 + e21)};
      // they generate a subgroup surjecting onto Sp4(F_p) for odd p, which is
      // all the coset search below needs
      const Mat2 zero{0, 0, 0, 0}, one{1, 0, 0, 1};
      for (const Mat2& s : {Mat2{4, 0, 0, 0}, Mat2{0, 0, 0, 4}, Mat2{0, 2, 2, 0}}) {
        add(SymplecticMatrix::from_blocks(one, s, zero, one));
        add(SymplecticMatrix::from_blocks(one, zero, s, one));
      }
      break;
    }
    default:
      throw Error(ErrorCode::kInvalidArgument, "no generator set for " + group.name());
  }
  return gens;
}

CosetTable enumerate_cosets(const Subgroup& group, const Subgroup& subgroup, std::size_t budget) {
  for (const Subgroup* s : {&group, &subgroup}) {
    if ((s->id == GroupId::kGamma0 || s->id == GroupId::kGamma24Gamma0) && !is_prime(s->p)) {
      throw Error(ErrorCode::kInvalidArgument, "level must be prime");
    }
  }
  if (group.id == GroupId::kGamma24 && subgroup.id != GroupId::kGamma24Gamma0) {
    throw Error(ErrorCode::kInvalidArgument, "unsupported coset pair");
  }
  if (group.id == GroupId::kGamma24 && subgroup.p == 2) {
    throw Error(ErrorCode::kInvalidArgument, "Gamma(2,4) cosets need an odd level");
  }
  CosetTable table{group, subgroup, {}};
  const auto gens = group_generators(group);
  std::unordered_map<std::string, std::size_t> seen;
  std::deque<std::size_t> frontier;
  table.representatives.push_back(SymplecticMatrix::identity());
  seen.emplace(coset_key(table.representatives[0], subgroup), 0);
  frontier.push_back(0);
  while (!frontier.empty()) {
    const std::size_t idx = frontier.front();
    frontier.pop_front();
    for (const auto& g : gens) {
      SymplecticMatrix cand = table.representatives[idx] * g;
      std::string key = coset_key(cand, subgroup);
      if (seen.count(key)) continue;
      if (table.representatives.size() >= budget) {
        throw Error(ErrorCode::kBudgetExceeded, "coset enumeration exceeded its budget");
      }
      seen.emplace(std::move(key), table.representatives.size());
      frontier.push_back(table.representatives.size());
      table.representatives.push_back(std::move(cand));
    }
  }
  return table;
}

SymplecticMatrix gamma_p(const SymplecticMatrix& g, int p) {
  if (!in_gamma0(g, p)) throw Error(ErrorCode::kNotInGamma0, "gamma_p needs C = 0 mod p");
  Mat4 m = g.mat();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      m(i, j + 2) = checked_mul(m(i, j + 2), p);
      m(i + 2, j) /= p;
    }
  }
  return SymplecticMatrix(m);
}

const std::vector<NamedMatrix>& special_matrices() {
  static const std::vector<NamedMatrix> catalog = {
      {"gamma_sym", {1, -3, -2, 2, 0, 1, 2, 0, 0, 0, 1, 0, 0, -4, -5, 1}},
      {"gamma_prime_3", {-5, 24, -12, 12, -2, 19, -12, 8, 0, 6, -5, 2, -2, 4, 0, 3}},
      {"gamma_prime_5", {-7, 6, 4, 2, 0, -7, 2, 0, 0, 10, -3, 0, 10, -8, -6, -3}},
      {"gamma_prime_7", {13, 12, -16, -6, -10, -3, 10, 4, 56, 14, -55, -22, 30, -40, -12, -7}},
      {"gamma_410", {0, -1, 0, 0, -1, 0, 0, 0, 0, 0, 0, -1, 0, 0, -1, 0}},
      {"gamma_8316", {1, 0, 0, 2, -3, 1, 2, -2, -4, 0, 1, -5, 0, 0, 0, 1}},
      {"gamma_134", {-1, 0, 0, 0, 0, -1, 0, 0, 2, 1, -1, 0, 1, 0, 0, -1}},
      {"gamma_141", {-1, 0, 0, 0, 0, -1, 0, 0, 1, 1, -1, 0, 1, 1, 0, -1}},
      {"gamma_21", {-1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1, 0, 0, 1, 0, -1}},
      {"gamma_1886", {-1, 0, 0, 0, 0, -1, 0, 0, -1, 1, -1, 0, 1, -1, 0, -1}},
      {"gamma_155", {-1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1, 0, 0, 3, 0, -1}},
  };
  return catalog;
}

const SymplecticMatrix& special_matrix(const std::string& name) {
  for (const auto& nm : special_matrices()) {
    if (nm.name == name) return nm.m;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown special matrix " + name);
}

}  // namespace g2mp
