#pragma once

#include <gmpxx.h>

#include <string>

#include "potpoly/real.hpp"

namespace potpoly {

/// Exact decimal scalar: mantissa * 10^exponent with an mpz mantissa.
/// Interval endpoints and JSON numeric fields are held in this form so that
/// parsing, comparison and re-serialization are exact and reproducible.
class Decimal {
 public:
  Decimal() : mant_(0), exp_(0) {}
  Decimal(long v) : mant_(v), exp_(0) {}
  Decimal(const mpz_class& mant, long exp) : mant_(mant), exp_(exp) { normalize(); }

  /// Parse "123", "-0.25", "1e-3", "2.5E2".  Throws std::invalid_argument.
  static Decimal parse(const std::string& s);

  std::string str() const;

  Real to_real(mpfr_prec_t prec = 0) const;
  double to_double() const { return to_real(64).to_double(); }

  const mpz_class& mantissa() const { return mant_; }
  long exponent() const { return exp_; }

  int sign() const { return sgn(mant_); }
  bool is_zero() const { return mant_ == 0; }

  friend Decimal operator-(const Decimal& a) { return Decimal(-a.mant_, a.exp_); }
  friend Decimal operator+(const Decimal& a, const Decimal& b);
  friend Decimal operator-(const Decimal& a, const Decimal& b);
  friend Decimal operator*(const Decimal& a, const Decimal& b);

  friend bool operator==(const Decimal& a, const Decimal& b) { return cmp(a, b) == 0; }
  friend bool operator!=(const Decimal& a, const Decimal& b) { return cmp(a, b) != 0; }
  friend bool operator<(const Decimal& a, const Decimal& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const Decimal& a, const Decimal& b) { return cmp(a, b) <= 0; }
  friend bool operator>(const Decimal& a, const Decimal& b) { return cmp(a, b) > 0; }
  friend bool operator>=(const Decimal& a, const Decimal& b) { return cmp(a, b) >= 0; }

  static int cmp(const Decimal& a, const Decimal& b);

 private:
  void normalize();

  mpz_class mant_;
  long exp_;
};

}  // namespace potpoly
