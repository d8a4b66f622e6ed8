#pragma once

#include <array>
#include <string>
#include <vector>

#include "g2mp/numerics/complex.hpp"
#include "g2mp/theta/theta.hpp"

namespace g2mp {

enum class InvariantKind { kIgusa, kStreng, kThetaQuotient };

std::string to_string(InvariantKind k);
InvariantKind invariant_kind_from_string(const std::string& s);

struct InvariantTriple {
  InvariantKind kind = InvariantKind::kIgusa;
  std::array<Complex, 3> v;

  const Complex& operator[](int i) const { return v[i]; }
};

struct SiegelFormValues {
  Complex h4, h6, h10, h12, h16;
};

struct SignedTriple {
  std::array<int, 3> idx;
  int sign;
};

// Index data for h6 and h12, derived at first use from the theta action of
// the generators of Sp4(Z).
const std::vector<SignedTriple>& h6_triples();
const std::vector<std::array<int, 6>>& h12_sextets();

SiegelFormValues siegel_forms(const std::array<Complex, 16>& theta);
inline SiegelFormValues siegel_forms(const ThetaVector& tv) { return siegel_forms(tv.values); }

// PRODUCT_OF_ELLIPTIC when |h10| < 2^(-n_bits/2) max|theta_i|^20; the
// threshold scale is passed in as the theta maximum.
InvariantTriple igusa_from_forms(const SiegelFormValues& f, const Real& theta_max, const PrecisionContext& ctx);
InvariantTriple streng_from_forms(const SiegelFormValues& f, const Real& theta_max, const PrecisionContext& ctx);

// Igusa <-> Streng, direction chosen by t.kind.
InvariantTriple streng_igusa_convert(const InvariantTriple& t);

// b'_1..3 from the squared quotients b_i (indexed 0..15).
std::array<Complex, 3> bprime_from_b(const std::array<Complex, 16>& b);
// The ten squared quotients b_i from b'_1..3 (duplication).
std::array<Complex, 16> b_from_bprime(const std::array<Complex, 3>& bp);

// Invariant triple of the chosen system at an arbitrary point of H2.
InvariantTriple invariants_at(const PeriodMatrix& omega, InvariantKind kind, const PrecisionContext& ctx);

}  // namespace g2mp
