#include "g2mp/numerics/real.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "g2mp/error.hpp"

namespace g2mp {

namespace {
thread_local mpfr_prec_t t_working_prec = 256;
}

mpfr_prec_t working_precision() { return t_working_prec; }

void set_working_precision(mpfr_prec_t bits) {
  if (bits < MPFR_PREC_MIN || bits > MPFR_PREC_MAX) {
    throw Error(ErrorCode::kInvalidArgument, "precision out of range");
  }
  t_working_prec = bits;
}

PrecisionContext::PrecisionContext(int bits, int guard, int low)
    : n_bits(bits), guard_bits(guard), n_low_bits(low) {
  if (n_bits < 64 || guard_bits < 32 || n_low_bits >= n_bits || n_low_bits < 32) {
    throw Error(ErrorCode::kInvalidArgument,
                "precision context needs n_bits >= 64, guard_bits >= 32, 32 <= n_low_bits < n_bits");
  }
}

PrecisionContext PrecisionContext::doubled() const {
  return PrecisionContext(2 * n_bits, guard_bits, n_low_bits);
}

PrecisionContext PrecisionContext::low() const {
  const int low_bits = std::max(64, n_low_bits);
  return PrecisionContext(low_bits, guard_bits, std::max(32, low_bits / 2));
}

PrecisionContext PrecisionContext::for_bits(int bits) {
  return PrecisionContext(bits, 64, std::max(64, bits / 4));
}

Real::Real(const std::string& decimal) {
  mpfr_init2(v_, working_precision());
  if (mpfr_set_str(v_, decimal.c_str(), 10, MPFR_RNDN) != 0) {
    throw Error(ErrorCode::kInvalidArgument, "cannot parse real '" + decimal + "'");
  }
}

long Real::exponent() const {
  if (mpfr_zero_p(v_)) return -(1L << 40);
  return mpfr_get_exp(v_);
}

std::string Real::to_string(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Rg", digits, v_);
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

std::string Real::to_hex() const {
  const std::string prec = std::to_string(mpfr_get_prec(v_));
  if (mpfr_zero_p(v_)) return prec + ":0";
  if (!mpfr_number_p(v_)) throw Error(ErrorCode::kNumeric, "cannot serialise non-finite value");
  mpfr_exp_t e = 0;
  char* s = mpfr_get_str(nullptr, &e, 16, 0, v_, MPFR_RNDN);
  std::string mant(s);
  mpfr_free_str(s);
  // trailing zero digits carry no information
  while (mant.size() > 1 && mant.back() == '0') mant.pop_back();
  return prec + ":" + mant + "@" + std::to_string(e);
}

Real Real::from_hex(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::kIo, "bad hex real '" + s + "'");
  const long prec = std::stol(s.substr(0, colon));
  const std::string body = s.substr(colon + 1);
  PrecisionGuard guard(prec);
  Real r;
  if (body == "0") return r;
  const auto at = body.find('@');
  if (at == std::string::npos) throw Error(ErrorCode::kIo, "bad hex real '" + s + "'");
  std::string mant = body.substr(0, at);
  const std::string ex = body.substr(at + 1);
  bool neg = false;
  if (!mant.empty() && mant[0] == '-') {
    neg = true;
    mant.erase(0, 1);
  }
  const std::string text = std::string(neg ? "-" : "") + "0." + mant + "@" + ex;
  if (mpfr_set_str(r.get(), text.c_str(), 16, MPFR_RNDN) != 0) {
    throw Error(ErrorCode::kIo, "bad hex real '" + s + "'");
  }
  return r;
}

Real abs(const Real& x) { Real r; mpfr_abs(r.get(), x.get(), MPFR_RNDN); return r; }
Real sqrt(const Real& x) { Real r; mpfr_sqrt(r.get(), x.get(), MPFR_RNDN); return r; }
Real exp(const Real& x) { Real r; mpfr_exp(r.get(), x.get(), MPFR_RNDN); return r; }
Real log(const Real& x) { Real r; mpfr_log(r.get(), x.get(), MPFR_RNDN); return r; }
Real log2(const Real& x) { Real r; mpfr_log2(r.get(), x.get(), MPFR_RNDN); return r; }
Real pi() { Real r; mpfr_const_pi(r.get(), MPFR_RNDN); return r; }
Real ldexp(const Real& x, long e) { Real r; mpfr_mul_2si(r.get(), x.get(), e, MPFR_RNDN); return r; }
Real round(const Real& x) { Real r; mpfr_round(r.get(), x.get()); return r; }
Real floor(const Real& x) { Real r; mpfr_floor(r.get(), x.get()); return r; }
Real max(const Real& a, const Real& b) { return a < b ? b : a; }
Real min(const Real& a, const Real& b) { return a < b ? a : b; }
Real pow2(long e) { Real r(1); mpfr_mul_2si(r.get(), r.get(), e, MPFR_RNDN); return r; }

std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.to_string(); }

}  // namespace g2mp
