#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "potpoly/decimal.hpp"
#include "potpoly/errors.hpp"
#include "potpoly/real.hpp"

namespace potpoly {

Real real_from_mpz(const mpz_class& z, mpfr_prec_t prec = 0);
Real real_from_mpq(const mpq_class& q, mpfr_prec_t prec = 0);

/// Exact integer-coefficient univariate polynomial, coefficients ascending.
/// The zero polynomial has an empty coefficient list and degree -1.
class IntPolynomial {
 public:
  IntPolynomial() = default;
  explicit IntPolynomial(std::vector<mpz_class> coeffs);
  static IntPolynomial from_strings(const std::vector<std::string>& coeffs);
  static IntPolynomial constant(const mpz_class& c);
  static IntPolynomial monomial(const mpz_class& c, int deg);
  /// prod (x - r) over integer roots.
  static IntPolynomial from_int_roots(const std::vector<mpz_class>& roots);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool monic() const { return !c_.empty() && c_.back() == 1; }
  const mpz_class& coeff(int i) const;
  const std::vector<mpz_class>& coeffs() const { return c_; }
  const mpz_class& leading() const;

  mpz_class evaluate(const mpz_class& x) const;
  mpq_class evaluate(const mpq_class& x) const;
  Real evaluate(const Real& x) const;
  Complex evaluate(const Complex& z) const;
  /// Exact sign of P(x) at a rational point.
  int sign_at(const mpq_class& x) const;

  IntPolynomial derivative() const;
  mpz_class content() const;  // gcd of coefficients, sign of leading
  IntPolynomial primitive_part() const;
  /// x^k * P.
  IntPolynomial shift_up(int k) const;
  /// P(-x).
  IntPolynomial reflect() const;

  std::string str() const;

  friend IntPolynomial operator+(const IntPolynomial& a, const IntPolynomial& b);
  friend IntPolynomial operator-(const IntPolynomial& a, const IntPolynomial& b);
  friend IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b);
  friend IntPolynomial operator*(const mpz_class& k, const IntPolynomial& a);
  friend bool operator==(const IntPolynomial& a, const IntPolynomial& b) {
    return a.c_ == b.c_;
  }

 private:
  std::vector<mpz_class> c_;
  void trim();
};

/// Quotient of an exact division; throws VerificationError if not exact.
IntPolynomial exact_divide(const IntPolynomial& a, const IntPolynomial& b);
/// Pseudo-remainder: lc(b)^{deg a - deg b + 1} * a mod b, exact over Z.
IntPolynomial pseudo_rem(const IntPolynomial& a, const IntPolynomial& b);
/// Primitive gcd via the subresultant remainder sequence.
IntPolynomial gcd(const IntPolynomial& a, const IntPolynomial& b);
/// Exact resultant via the subresultant sequence.  Sign follows the
/// convention res(P,Q) = lc(P)^{deg Q} prod Q(alpha_i); consumers in this
/// library use magnitudes.
mpz_class resultant(const IntPolynomial& p, const IntPolynomial& q);
bool is_squarefree(const IntPolynomial& p);
IntPolynomial squarefree_part(const IntPolynomial& p);
/// Yun decomposition: returns f_1, f_2, ... with p = content * prod f_i^i.
std::vector<IntPolynomial> squarefree_decomposition(const IntPolynomial& p);
bool eisenstein_check(const IntPolynomial& p, const mpz_class& prime);

/// One isolated root: an exact-decimal bracket [lo,hi] containing exactly one
/// real root of the stated multiplicity, or a complex approximation.
struct RootInterval {
  Decimal lo, hi;
  int multiplicity = 1;
  bool real = true;
  Complex approx;
};

struct RootSet {
  std::vector<RootInterval> roots;  // real roots, ascending
  int complex_count = 0;            // non-real roots counted with multiplicity
  int degree = 0;

  int real_count() const {
    int n = 0;
    for (const auto& r : roots) n += r.multiplicity;
    return n;
  }
};

/// Isolate all real roots with certified sign-change brackets of width <= tol.
RootSet real_roots(const IntPolynomial& p, const Real& tol);

/// Number of distinct real roots in (a, b] by Sturm's theorem, exact.
int sturm_count(const IntPolynomial& squarefree, const mpq_class& a, const mpq_class& b);
/// Total number of distinct real roots, exact.
int sturm_count_all(const IntPolynomial& squarefree);

/// All complex roots with multiplicity (Aberth iteration per squarefree
/// factor).  Root order is deterministic: ascending by (re, im).
std::vector<Complex> all_roots(const IntPolynomial& p, mpfr_prec_t prec = 0);

/// Aberth simultaneous iteration on raw ascending real coefficients;
/// returns one approximation per root of the (numerically) squarefree
/// input, unsorted.  Trailing zero coefficients are ignored.
std::vector<Complex> aberth_roots(std::vector<Real> coeffs, mpfr_prec_t prec = 0);

/// Refine an isolating bracket to `prec` bits by bisection + guarded Newton;
/// the returned bracket is still certified by exact signs.
std::pair<mpq_class, mpq_class> refine_root(const IntPolynomial& p, mpq_class lo,
                                            mpq_class hi, mpfr_prec_t prec);

/// Extended-precision real-coefficient polynomial, coefficients ascending.
class RealPolynomial {
 public:
  RealPolynomial() = default;
  explicit RealPolynomial(std::vector<Real> coeffs);
  static RealPolynomial from_int(const IntPolynomial& p, mpfr_prec_t prec = 0);
  static RealPolynomial from_roots(const std::vector<Real>& roots);
  static RealPolynomial constant(const Real& c);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const Real& coeff(int i) const;
  const std::vector<Real>& coeffs() const { return c_; }
  mpfr_prec_t precision() const;

  Real evaluate(const Real& x) const;
  Complex evaluate(const Complex& z) const;
  RealPolynomial derivative() const;
  /// Coefficients i in [lo, hi) as a polynomial (shifted down by lo when
  /// shift_down is true).
  RealPolynomial slice(int lo, int hi, bool shift_down = false) const;

  /// Nearest integer polynomial, plus the max coefficient rounding distance.
  std::pair<IntPolynomial, Real> round_to_int() const;

  friend RealPolynomial operator+(const RealPolynomial& a, const RealPolynomial& b);
  friend RealPolynomial operator-(const RealPolynomial& a, const RealPolynomial& b);
  friend RealPolynomial operator*(const RealPolynomial& a, const RealPolynomial& b);
  friend RealPolynomial operator*(const Real& k, const RealPolynomial& a);

  std::string str(int digits = 12) const;

 private:
  std::vector<Real> c_;
  void trim();
};

}  // namespace potpoly
