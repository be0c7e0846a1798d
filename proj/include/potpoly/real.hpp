#pragma once

#include <mpfr.h>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>

namespace potpoly {

/// Arbitrary-precision real number backed by MPFR.
///
/// Every value carries its own precision (mantissa bits).  Newly constructed
/// values use the global working precision, see set_working_precision().
/// Binary operations allocate the result at the wider of the two operand
/// precisions, so precision never silently degrades through arithmetic.
class Real {
 public:
  struct AtPrecision {
    mpfr_prec_t bits;
  };

  Real() { mpfr_init2(v_, working_precision()); mpfr_set_zero(v_, 1); }
  explicit Real(AtPrecision p) { mpfr_init2(v_, p.bits); mpfr_set_zero(v_, 1); }
  Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real(Real&& o) noexcept { mpfr_init2(v_, MPFR_PREC_MIN); mpfr_swap(v_, o.v_); }
  Real(double d) { mpfr_init2(v_, working_precision()); mpfr_set_d(v_, d, MPFR_RNDN); }
  Real(int i) { mpfr_init2(v_, working_precision()); mpfr_set_si(v_, i, MPFR_RNDN); }
  Real(long i) { mpfr_init2(v_, working_precision()); mpfr_set_si(v_, i, MPFR_RNDN); }
  Real(unsigned long i) { mpfr_init2(v_, working_precision()); mpfr_set_ui(v_, i, MPFR_RNDN); }
  ~Real() { mpfr_clear(v_); }

  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    if (this != &o) mpfr_swap(v_, o.v_);
    return *this;
  }

  /// Process-wide default precision for new values.  Set once at startup
  /// (CLI --precision); changing it mid-computation only affects values
  /// created afterwards.
  static mpfr_prec_t working_precision() { return working_prec_; }
  static void set_working_precision(mpfr_prec_t p);

  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }

  /// Parse a decimal string at the given precision (default: working).
  static Real parse(const std::string& s, mpfr_prec_t prec = 0);

  /// Deterministic decimal rendering with `digits` significant digits.
  std::string str(int digits = 20) const;

  bool is_nan() const { return mpfr_nan_p(v_) != 0; }
  bool is_inf() const { return mpfr_inf_p(v_) != 0; }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  Real& operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

  friend Real operator-(const Real& a) {
    Real r(AtPrecision{mpfr_get_prec(a.v_)});
    mpfr_neg(r.v_, a.v_, MPFR_RNDN);
    return r;
  }

#define POTPOLY_REAL_BINOP(op, fn)                                          \
  friend Real operator op(const Real& a, const Real& b) {                   \
    Real r(AtPrecision{std::max(mpfr_get_prec(a.v_), mpfr_get_prec(b.v_))}); \
    mpfr_##fn(r.v_, a.v_, b.v_, MPFR_RNDN);                                 \
    return r;                                                               \
  }
  POTPOLY_REAL_BINOP(+, add)
  POTPOLY_REAL_BINOP(-, sub)
  POTPOLY_REAL_BINOP(*, mul)
  POTPOLY_REAL_BINOP(/, div)
#undef POTPOLY_REAL_BINOP

  friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
  friend bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend bool operator!=(const Real& a, const Real& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const Real& r);

 private:
  mpfr_t v_;
  static mpfr_prec_t working_prec_;
};

Real abs(const Real& a);
Real sqrt(const Real& a);
Real log(const Real& a);
Real log1p(const Real& a);
Real exp(const Real& a);
Real sin(const Real& a);
Real cos(const Real& a);
Real sinh(const Real& a);
Real cosh(const Real& a);
Real tanh(const Real& a);
Real atan(const Real& a);
Real atan2(const Real& y, const Real& x);
Real asin(const Real& a);
Real acos(const Real& a);
Real pow(const Real& a, const Real& b);
Real pow(const Real& a, long n);
Real floor(const Real& a);
Real ceil(const Real& a);
Real round(const Real& a);
Real hypot(const Real& a, const Real& b);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);
Real const_pi(mpfr_prec_t prec = 0);

/// exp(a) clamped into MPFR range; used for weights e^{nU} that underflow.
inline Real safe_exp(const Real& a) { return exp(a); }

/// Complex value over Real; only the operations the root finders and
/// potential evaluations need.
struct Complex {
  Real re, im;

  Complex() : re(0), im(0) {}
  Complex(Real r) : re(std::move(r)), im(0) {}
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  Complex(double r, double i = 0.0) : re(r), im(i) {}

  bool is_real_axis() const { return im.is_zero(); }

  friend Complex operator+(const Complex& a, const Complex& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend Complex operator-(const Complex& a, const Complex& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
  friend Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Complex operator/(const Complex& a, const Complex& b) {
    Real d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }

  Real abs2() const { return re * re + im * im; }
  Real abs() const { return hypot(re, im); }
  Complex conj() const { return {re, -im}; }
};

Complex sqrt(const Complex& z);
/// log|z|, computed as 0.5*log(re^2+im^2) with hypot guarding.
Real log_abs(const Complex& z);

}  // namespace potpoly
