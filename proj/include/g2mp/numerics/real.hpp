#pragma once

#include <mpfr.h>

#include <cstring>
#include <iosfwd>
#include <string>
#include <utility>

#include "g2mp/numerics/precision.hpp"

namespace g2mp {

// Owning wrapper around an mpfr_t. New values take the thread's working
// precision; results of arithmetic operators do too.
class Real {
 public:
  Real() { mpfr_init2(v_, working_precision()); mpfr_set_zero(v_, 1); }
  Real(double x) { mpfr_init2(v_, working_precision()); mpfr_set_d(v_, x, MPFR_RNDN); }  // NOLINT
  Real(long x) { mpfr_init2(v_, working_precision()); mpfr_set_si(v_, x, MPFR_RNDN); }   // NOLINT
  Real(int x) : Real(static_cast<long>(x)) {}                                             // NOLINT
  explicit Real(const std::string& decimal);

  Real(const Real& o) {
    mpfr_init2(v_, working_precision());
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    std::memcpy(v_, o.v_, sizeof(v_));
    o.v_->_mpfr_d = nullptr;
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      revive();
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    if (this != &o) {
      if (v_->_mpfr_d != nullptr && mpfr_get_prec(v_) == mpfr_get_prec(o.v_)) {
        mpfr_swap(v_, o.v_);
      } else if (v_->_mpfr_d != nullptr) {
        mpfr_set(v_, o.v_, MPFR_RNDN);
      } else {
        std::memcpy(v_, o.v_, sizeof(v_));
        o.v_->_mpfr_d = nullptr;
      }
    }
    return *this;
  }
  ~Real() {
    if (v_->_mpfr_d != nullptr) mpfr_clear(v_);
  }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

  // Changes the precision, rounding the current value.
  void set_precision(mpfr_prec_t bits) { mpfr_prec_round(v_, bits, MPFR_RNDN); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long double to_long_double() const { return mpfr_get_ld(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  // Binary exponent e with 0.5 <= |x| / 2^e < 1; very negative for zero.
  long exponent() const;

  std::string to_string(int digits = 20) const;
  // Exact round-trippable hexadecimal form "prec:mantissa@exp".
  std::string to_hex() const;
  static Real from_hex(const std::string& s);

  Real& operator+=(const Real& o) { revive(); mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator-=(const Real& o) { revive(); mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(const Real& o) { revive(); mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator/=(const Real& o) { revive(); mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

  friend Real operator+(const Real& a, const Real& b) { Real r; mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Real operator-(const Real& a, const Real& b) { Real r; mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Real operator*(const Real& a, const Real& b) { Real r; mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Real operator/(const Real& a, const Real& b) { Real r; mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Real operator-(const Real& a) { Real r; mpfr_neg(r.v_, a.v_, MPFR_RNDN); return r; }

  friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
  friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }
  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }

 private:
  // A moved-from value regains storage on first write.
  void revive() {
    if (v_->_mpfr_d == nullptr) {
      mpfr_init2(v_, working_precision());
      mpfr_set_zero(v_, 1);
    }
  }

  mpfr_t v_;
};

Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real log(const Real& x);
Real log2(const Real& x);
Real pi();
Real ldexp(const Real& x, long e);
Real round(const Real& x);
Real floor(const Real& x);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);
Real pow2(long e);  // 2^e at working precision

std::ostream& operator<<(std::ostream& os, const Real& x);

}  // namespace g2mp
