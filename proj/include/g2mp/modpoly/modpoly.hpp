#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "g2mp/interp/interp.hpp"
#include "g2mp/invariants/invariants.hpp"
#include "g2mp/numerics/unipoly.hpp"
#include "g2mp/siegel/period_matrix.hpp"
#include "g2mp/symplectic/symplectic.hpp"

namespace g2mp {

// Phi_1 = prod (X - f1^g), Psi_m = sum_g f_m^g prod_{g' != g} (X - f1^g').
struct EvaluatedModPoly {
  int p = 0;
  InvariantKind kind = InvariantKind::kThetaQuotient;
  UniPoly phi1;  // monic, degree q
  UniPoly psi2;
  UniPoly psi3;
  PeriodMatrix omega;
};

// p^3 + p^2 + p + 1
int isogeny_count(int p);

// C_p for the kind: Gamma(2,4) / (Gamma(2,4) cap Gamma0(p)) for b', Gamma2 /
// Gamma0(p) otherwise. Cached per (p, kind); thread safe.
const CosetTable& modular_cosets(int p, InvariantKind kind);

// The invariant triples at p gamma Omega, gamma in C_p.
std::vector<std::array<Complex, 3>> isogenous_invariants(const PeriodMatrix& omega, int p, InvariantKind kind,
                                                         const CosetTable& cosets, const PrecisionContext& ctx);

// NEAR_DENOMINATOR when some root exceeds 2^(n_bits/8) in absolute value.
EvaluatedModPoly evaluate_at(const PeriodMatrix& omega, int p, InvariantKind kind, const CosetTable& cosets,
                             const PrecisionContext& ctx);

// Coefficient l of the polynomial is num[l] / den. phi1_num has entries
// 0..q (num[q] = den); psi2_num and psi3_num have 0..q-1.
struct ModularPolynomialSet {
  int p = 0;
  InvariantKind kind = InvariantKind::kThetaQuotient;
  std::map<int, TriPolyQ> phi1_num;
  std::map<int, TriPolyQ> psi2_num;
  std::map<int, TriPolyQ> psi3_num;
  TriPolyQ den;
};

// The three univariate polynomials at the invariant point v.
struct SpecializedModPoly {
  UniPoly phi1, psi2, psi3;
};
SpecializedModPoly specialize(const ModularPolynomialSet& set, const std::array<Complex, 3>& v);

// MODPOLY v1 text format. read_modpoly accepts concatenated sections in any
// order and throws IO on malformed input.
void write_modpoly(std::ostream& os, const ModularPolynomialSet& set);
ModularPolynomialSet read_modpoly(std::istream& is);
void write_modpoly_file(const std::string& path, const ModularPolynomialSet& set);
ModularPolynomialSet read_modpoly_file(const std::string& path);

struct HumbertDegreeOracle {
  int p = 0;
  long a_value = 0;
  long component_degree = 0;
  long h_degree = 0;
};

long sigma1(long n);
// sum of sigma1((p^2 - x^2) / 4) over x > 0 with 4 | p^2 - x^2, x^2 < p^2
long humbert_sigma_sum(int p);
HumbertDegreeOracle humbert_degree(int p);

// Evaluator value layout: phi1 coefficients 0..q-1, then psi2 0..q-1, then
// psi3 0..q-1.
enum class PolyFamily { kPhi1 = 0, kPsi2 = 1, kPsi3 = 2 };
inline int component_index(PolyFamily f, int l, int q) { return static_cast<int>(f) * q + l; }

struct BuildProgress {
  std::string stage;
  std::size_t done = 0;
  std::size_t total = 0;
  std::size_t rejected = 0;
  int n_bits = 0;
};

struct BuildOptions {
  int p = 3;
  InvariantKind kind = InvariantKind::kThetaQuotient;
  PrecisionContext ctx{256, 64, 128};
  // Degree probes run Cauchy far above the true degrees and need more bits.
  int discovery_bits = 768;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string checkpoint_dir;  // empty: no checkpointing
  double x_radius = 0.5;
  double yz_radius = 0.5;
  DegreeHints hints;  // node circles and seed are overwritten
  int held_out = 3;
  int max_doublings = 4;
  std::function<void(const BuildProgress&)> progress;
};

// Defaults sized for the b' polynomials of level p.
BuildOptions default_build_options(int p);

struct BuildStats {
  std::size_t evaluations = 0;  // fresh evaluations, checkpoint hits excluded
  std::size_t checkpoint_hits = 0;
  std::size_t rejected_nodes = 0;
  int n_bits = 0;
  int probe_component = -1;
  std::vector<DegreeProfile> profiles;  // per evaluator component
};

struct BuildResult {
  ModularPolynomialSet set;
  BuildStats stats;
};

// Degree profiles of every coefficient (as reduced fractions).
std::vector<DegreeProfile> discover_modpoly_degrees(const BuildOptions& opt, BuildStats* stats = nullptr);

// Denominator first: rational interpolation of the probe coefficient, then
// tensor-grid interpolation of every numerator, exact reconstruction and a
// held-out-node gate. Only the b' kind is supported.
BuildResult build(const BuildOptions& opt);

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool ok() const;
  const VerifyCheck* find(const std::string& name) const;
};

// residual, psi_quotient, symmetry, parity, denominator.
VerifyReport verify(const ModularPolynomialSet& set, int trials, const PrecisionContext& ctx, std::uint64_t seed = 7);

}  // namespace g2mp
