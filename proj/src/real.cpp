#include "potpoly/real.hpp"

#include <cstring>
#include <ostream>
#include <stdexcept>

namespace potpoly {

mpfr_prec_t Real::working_prec_ = 192;

void Real::set_working_precision(mpfr_prec_t p) {
  if (p < 64) throw std::invalid_argument("working precision must be at least 64 bits");
  working_prec_ = p;
}

Real Real::parse(const std::string& s, mpfr_prec_t prec) {
  Real r(Real::AtPrecision{prec > 0 ? prec : working_precision()});
  if (s.empty() || mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0)
    throw std::invalid_argument("not a decimal number: '" + s + "'");
  return r;
}

std::string Real::str(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) < 0 ? "-inf" : "inf";
  if (mpfr_zero_p(v_)) return "0";
  mpfr_exp_t e;
  char* raw = mpfr_get_str(nullptr, &e, 10, digits, v_, MPFR_RNDN);
  std::string mant(raw);
  mpfr_free_str(raw);
  bool neg = !mant.empty() && mant[0] == '-';
  if (neg) mant.erase(0, 1);
  // Strip trailing zeros but keep at least one digit.
  size_t last = mant.find_last_not_of('0');
  mant.erase(last + 1);
  std::string out;
  if (e <= 0) {
    if (e > -6) {
      out = "0." + std::string(static_cast<size_t>(-e), '0') + mant;
    } else {
      out = mant.substr(0, 1) + (mant.size() > 1 ? "." + mant.substr(1) : "") +
            "e" + std::to_string(e - 1);
    }
  } else if (static_cast<size_t>(e) >= mant.size()) {
    if (e <= digits + 4) {
      out = mant + std::string(static_cast<size_t>(e) - mant.size(), '0');
    } else {
      out = mant.substr(0, 1) + (mant.size() > 1 ? "." + mant.substr(1) : "") +
            "e" + std::to_string(e - 1);
    }
  } else {
    out = mant.substr(0, static_cast<size_t>(e)) + "." + mant.substr(static_cast<size_t>(e));
  }
  return neg ? "-" + out : out;
}

std::ostream& operator<<(std::ostream& os, const Real& r) { return os << r.str(); }

#define POTPOLY_REAL_FN1(name, fn)                   \
  Real name(const Real& a) {                          \
    Real r(Real::AtPrecision{a.precision()});                            \
    mpfr_##fn(r.raw(), a.raw(), MPFR_RNDN);           \
    return r;                                         \
  }
POTPOLY_REAL_FN1(abs, abs)
POTPOLY_REAL_FN1(sqrt, sqrt)
POTPOLY_REAL_FN1(log, log)
POTPOLY_REAL_FN1(log1p, log1p)
POTPOLY_REAL_FN1(exp, exp)
POTPOLY_REAL_FN1(sin, sin)
POTPOLY_REAL_FN1(cos, cos)
POTPOLY_REAL_FN1(sinh, sinh)
POTPOLY_REAL_FN1(cosh, cosh)
POTPOLY_REAL_FN1(tanh, tanh)
POTPOLY_REAL_FN1(atan, atan)
POTPOLY_REAL_FN1(asin, asin)
POTPOLY_REAL_FN1(acos, acos)
#undef POTPOLY_REAL_FN1

Real atan2(const Real& y, const Real& x) {
  Real r(Real::AtPrecision{std::max(y.precision(), x.precision())});
  mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
  return r;
}

Real pow(const Real& a, const Real& b) {
  Real r(Real::AtPrecision{std::max(a.precision(), b.precision())});
  mpfr_pow(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}

Real pow(const Real& a, long n) {
  Real r(Real::AtPrecision{a.precision()});
  mpfr_pow_si(r.raw(), a.raw(), n, MPFR_RNDN);
  return r;
}

Real floor(const Real& a) {
  Real r(Real::AtPrecision{a.precision()});
  mpfr_floor(r.raw(), a.raw());
  return r;
}

Real ceil(const Real& a) {
  Real r(Real::AtPrecision{a.precision()});
  mpfr_ceil(r.raw(), a.raw());
  return r;
}

Real round(const Real& a) {
  Real r(Real::AtPrecision{a.precision()});
  mpfr_round(r.raw(), a.raw());
  return r;
}

Real hypot(const Real& a, const Real& b) {
  Real r(Real::AtPrecision{std::max(a.precision(), b.precision())});
  mpfr_hypot(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}

Real max(const Real& a, const Real& b) { return a < b ? b : a; }
Real min(const Real& a, const Real& b) { return a < b ? a : b; }

Real const_pi(mpfr_prec_t prec) {
  Real r(Real::AtPrecision{prec > 0 ? prec : Real::working_precision()});
  mpfr_const_pi(r.raw(), MPFR_RNDN);
  return r;
}

Complex sqrt(const Complex& z) {
  if (z.im.is_zero()) {
    if (z.re.sign() >= 0) return {sqrt(z.re), Real(0)};
    return {Real(0), sqrt(-z.re)};
  }
  // Principal branch via half-angle identities.
  Real m = z.abs();
  Real u = sqrt((m + z.re) / Real(2));
  Real v = sqrt((m - z.re) / Real(2));
  if (z.im.sign() < 0) v = -v;
  return {u, v};
}

Real log_abs(const Complex& z) {
  if (z.im.is_zero()) return log(abs(z.re));
  if (z.re.is_zero()) return log(abs(z.im));
  return log(z.abs());
}

}  // namespace potpoly
