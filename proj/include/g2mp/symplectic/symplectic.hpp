#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "g2mp/siegel/period_matrix.hpp"

namespace g2mp {

// Plain 4x4 integer matrix, row major. Arithmetic is overflow checked and
// throws NUMERIC rather than wrapping.
struct Mat4 {
  std::array<std::int64_t, 16> e{};

  std::int64_t& operator()(int i, int j) { return e[4 * i + j]; }
  std::int64_t operator()(int i, int j) const { return e[4 * i + j]; }
  static Mat4 identity();
  Mat4 transpose() const;
  bool operator==(const Mat4&) const = default;
};

Mat4 operator*(const Mat4& x, const Mat4& y);

// 2x2 integer block.
struct Mat2 {
  std::int64_t a, b, c, d;
  std::int64_t det() const { return a * d - b * c; }
  bool operator==(const Mat2&) const = default;
};

// True iff tM J M = J exactly.
bool is_symplectic(const Mat4& m);

class SymplecticMatrix {
 public:
  SymplecticMatrix() : m_(Mat4::identity()) {}
  // Throws INVALID_ARGUMENT unless m is symplectic.
  explicit SymplecticMatrix(const Mat4& m);
  SymplecticMatrix(std::initializer_list<std::int64_t> rows);

  static SymplecticMatrix identity() { return {}; }
  static SymplecticMatrix J();
  // (I, m_ij; 0, I) with ones at (i,j) and (j,i); i, j in {0, 1}.
  static SymplecticMatrix M(int i, int j);
  static SymplecticMatrix from_blocks(const Mat2& a, const Mat2& b, const Mat2& c, const Mat2& d);

  const Mat4& mat() const { return m_; }
  std::int64_t operator()(int i, int j) const { return m_(i, j); }
  Mat2 A() const { return block(0, 0); }
  Mat2 B() const { return block(0, 2); }
  Mat2 C() const { return block(2, 0); }
  Mat2 D() const { return block(2, 2); }

  SymplecticMatrix inverse() const;
  SymplecticMatrix transpose() const;
  SymplecticMatrix operator-() const;
  std::int64_t max_abs_entry() const;

  // 16 space-separated integers, row by row.
  std::string to_string() const;

  friend SymplecticMatrix operator*(const SymplecticMatrix& x, const SymplecticMatrix& y);
  bool operator==(const SymplecticMatrix& o) const { return m_ == o.m_; }

 private:
  struct Unchecked {};
  SymplecticMatrix(const Mat4& m, Unchecked) : m_(m) {}
  Mat2 block(int r, int c) const { return {m_(r, c), m_(r, c + 1), m_(r + 1, c), m_(r + 1, c + 1)}; }

  Mat4 m_;
};

// (A Omega + B)(C Omega + D)^-1, symmetrized. Throws NUMERIC if the symmetry
// defect exceeds 2^(-prec/2) relative.
PeriodMatrix act(const SymplecticMatrix& g, const PeriodMatrix& omega);
// Double precision variant on (tau1, tau2, tau3).
std::array<std::complex<double>, 3> act(const SymplecticMatrix& g, const std::array<std::complex<double>, 3>& t);
// det(C Omega + D)
Complex cocycle(const SymplecticMatrix& g, const PeriodMatrix& omega);

enum class GroupId { kGamma2, kGamma24, kGamma2Level, kGamma0, kGamma24Gamma0 };

struct Subgroup {
  GroupId id = GroupId::kGamma2;
  int p = 0;  // level for the Gamma0 kinds

  static Subgroup gamma2() { return {GroupId::kGamma2, 0}; }
  static Subgroup gamma24() { return {GroupId::kGamma24, 0}; }
  static Subgroup gamma_level2() { return {GroupId::kGamma2Level, 0}; }
  static Subgroup gamma0(int p) { return {GroupId::kGamma0, p}; }
  static Subgroup gamma24_gamma0(int p) { return {GroupId::kGamma24Gamma0, p}; }
  std::string name() const;
};

bool in_gamma0(const SymplecticMatrix& g, int p);
bool in_gamma24(const SymplecticMatrix& g);
bool in_gamma_level2(const SymplecticMatrix& g);
bool membership(const SymplecticMatrix& g, const Subgroup& h);

// Fingerprint of the right coset H g: key(g1) == key(g2) iff g1 g2^-1 in H.
std::string coset_key(const SymplecticMatrix& g, const Subgroup& h);

// Representatives of the right cosets H\G. With G = Gamma(2,4) the
// representatives lie in Gamma(2,4).
struct CosetTable {
  Subgroup group;
  Subgroup subgroup;
  std::vector<SymplecticMatrix> representatives;

  std::size_t size() const { return representatives.size(); }
  std::string key(const SymplecticMatrix& g) const { return coset_key(g, subgroup); }
};

CosetTable enumerate_cosets(const Subgroup& group, const Subgroup& subgroup, std::size_t budget = 2000000);

// Generators used for the breadth-first search (with inverses).
std::vector<SymplecticMatrix> group_generators(const Subgroup& group);

// (A, pB; C/p, D); NOT_IN_GAMMA0 unless C = 0 mod p.
SymplecticMatrix gamma_p(const SymplecticMatrix& g, int p);

struct NamedMatrix {
  std::string name;
  SymplecticMatrix m;
};
// Printed matrices: gamma_sym, gamma_prime_3/5/7, gamma_410, gamma_8316,
// gamma_134, gamma_141, gamma_21, gamma_1886, gamma_155.
const std::vector<NamedMatrix>& special_matrices();
const SymplecticMatrix& special_matrix(const std::string& name);

}  // namespace g2mp
