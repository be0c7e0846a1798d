#include "potpoly/polynomial.hpp"

#include <algorithm>
#include <sstream>

namespace potpoly {

Real real_from_mpz(const mpz_class& z, mpfr_prec_t prec) {
  Real r(Real::AtPrecision{prec > 0 ? prec : Real::working_precision()});
  mpfr_set_z(r.raw(), z.get_mpz_t(), MPFR_RNDN);
  return r;
}

Real real_from_mpq(const mpq_class& q, mpfr_prec_t prec) {
  Real r(Real::AtPrecision{prec > 0 ? prec : Real::working_precision()});
  mpfr_set_q(r.raw(), q.get_mpq_t(), MPFR_RNDN);
  return r;
}

namespace {
const mpz_class kZero = 0;
}

void IntPolynomial::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

IntPolynomial::IntPolynomial(std::vector<mpz_class> coeffs) : c_(std::move(coeffs)) {
  trim();
}

IntPolynomial IntPolynomial::from_strings(const std::vector<std::string>& coeffs) {
  std::vector<mpz_class> c;
  c.reserve(coeffs.size());
  for (const auto& s : coeffs) {
    try {
      c.emplace_back(s);
    } catch (const std::invalid_argument&) {
      throw UsageError("invalid integer coefficient: " + s);
    }
  }
  return IntPolynomial(std::move(c));
}

IntPolynomial IntPolynomial::constant(const mpz_class& c) {
  return IntPolynomial(std::vector<mpz_class>{c});
}

IntPolynomial IntPolynomial::monomial(const mpz_class& c, int deg) {
  std::vector<mpz_class> v(deg + 1, 0);
  v[deg] = c;
  return IntPolynomial(std::move(v));
}

IntPolynomial IntPolynomial::from_int_roots(const std::vector<mpz_class>& roots) {
  IntPolynomial p = constant(1);
  for (const auto& r : roots)
    p = p * IntPolynomial(std::vector<mpz_class>{-r, 1});
  return p;
}

const mpz_class& IntPolynomial::coeff(int i) const {
  if (i < 0 || i >= static_cast<int>(c_.size())) return kZero;
  return c_[i];
}

const mpz_class& IntPolynomial::leading() const {
  if (c_.empty()) throw UsageError("leading coefficient of the zero polynomial");
  return c_.back();
}

mpz_class IntPolynomial::evaluate(const mpz_class& x) const {
  mpz_class acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

mpq_class IntPolynomial::evaluate(const mpq_class& x) const {
  mpq_class acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Real IntPolynomial::evaluate(const Real& x) const {
  Real acc(Real::AtPrecision{x.precision()});
  for (auto it = c_.rbegin(); it != c_.rend(); ++it)
    acc = acc * x + real_from_mpz(*it, x.precision());
  return acc;
}

Complex IntPolynomial::evaluate(const Complex& z) const {
  Complex acc;
  mpfr_prec_t p = std::max(z.re.precision(), z.im.precision());
  for (auto it = c_.rbegin(); it != c_.rend(); ++it)
    acc = acc * z + Complex(real_from_mpz(*it, p));
  return acc;
}

int IntPolynomial::sign_at(const mpq_class& x) const {
  mpq_class v = evaluate(x);
  return sgn(v);
}

IntPolynomial IntPolynomial::derivative() const {
  if (c_.size() <= 1) return IntPolynomial();
  std::vector<mpz_class> d(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = mpz_class(i) * c_[i];
  return IntPolynomial(std::move(d));
}

mpz_class IntPolynomial::content() const {
  mpz_class g = 0;
  for (const auto& c : c_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  return g;  // nonnegative by mpz_gcd convention
}

IntPolynomial IntPolynomial::primitive_part() const {
  mpz_class g = content();
  if (g == 0 || g == 1) return *this;
  std::vector<mpz_class> v(c_.size());
  for (size_t i = 0; i < c_.size(); ++i) mpz_divexact(v[i].get_mpz_t(), c_[i].get_mpz_t(), g.get_mpz_t());
  return IntPolynomial(std::move(v));
}

IntPolynomial IntPolynomial::shift_up(int k) const {
  if (is_zero()) return {};
  std::vector<mpz_class> v(c_.size() + k, 0);
  for (size_t i = 0; i < c_.size(); ++i) v[i + k] = c_[i];
  return IntPolynomial(std::move(v));
}

IntPolynomial IntPolynomial::reflect() const {
  std::vector<mpz_class> v = c_;
  for (size_t i = 1; i < v.size(); i += 2) v[i] = -v[i];
  return IntPolynomial(std::move(v));
}

std::string IntPolynomial::str() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    const mpz_class& c = c_[i];
    if (c == 0) continue;
    mpz_class a = abs(c);
    if (first) {
      if (c < 0) os << "-";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    if (i == 0 || a != 1) os << a.get_str();
    if (i > 0) {
      os << "x";
      if (i > 1) os << "^" << i;
    }
  }
  return os.str();
}

IntPolynomial operator+(const IntPolynomial& a, const IntPolynomial& b) {
  std::vector<mpz_class> v(std::max(a.c_.size(), b.c_.size()), 0);
  for (size_t i = 0; i < v.size(); ++i) v[i] = a.coeff(i) + b.coeff(i);
  return IntPolynomial(std::move(v));
}

IntPolynomial operator-(const IntPolynomial& a, const IntPolynomial& b) {
  std::vector<mpz_class> v(std::max(a.c_.size(), b.c_.size()), 0);
  for (size_t i = 0; i < v.size(); ++i) v[i] = a.coeff(i) - b.coeff(i);
  return IntPolynomial(std::move(v));
}

IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<mpz_class> v(a.c_.size() + b.c_.size() - 1, 0);
  for (size_t i = 0; i < a.c_.size(); ++i)
    for (size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
  return IntPolynomial(std::move(v));
}

IntPolynomial operator*(const mpz_class& k, const IntPolynomial& a) {
  if (k == 0) return {};
  std::vector<mpz_class> v = a.c_;
  for (auto& c : v) c *= k;
  return IntPolynomial(std::move(v));
}

IntPolynomial exact_divide(const IntPolynomial& a, const IntPolynomial& b) {
  if (b.is_zero()) throw UsageError("division by zero polynomial");
  if (a.is_zero()) return {};
  if (a.degree() < b.degree())
    throw VerificationError("exact_divide: degree of dividend below divisor");
  std::vector<mpz_class> rem = a.coeffs();
  std::vector<mpz_class> quo(a.degree() - b.degree() + 1, 0);
  const mpz_class& lb = b.leading();
  for (int k = a.degree() - b.degree(); k >= 0; --k) {
    mpz_class& top = rem[k + b.degree()];
    if (top == 0) continue;
    if (!mpz_divisible_p(top.get_mpz_t(), lb.get_mpz_t()))
      throw VerificationError("exact_divide: inexact division");
    mpz_class q;
    mpz_divexact(q.get_mpz_t(), top.get_mpz_t(), lb.get_mpz_t());
    quo[k] = q;
    for (int i = 0; i <= b.degree(); ++i) rem[k + i] -= q * b.coeff(i);
  }
  for (const auto& r : rem)
    if (r != 0) throw VerificationError("exact_divide: nonzero remainder");
  return IntPolynomial(std::move(quo));
}

IntPolynomial pseudo_rem(const IntPolynomial& a, const IntPolynomial& b) {
  if (b.is_zero()) throw UsageError("pseudo_rem by zero polynomial");
  if (a.degree() < b.degree()) return a;
  int d = a.degree() - b.degree();
  const mpz_class& lb = b.leading();
  mpz_class scale;
  mpz_pow_ui(scale.get_mpz_t(), lb.get_mpz_t(), d + 1);
  std::vector<mpz_class> rem = a.coeffs();
  for (auto& c : rem) c *= scale;
  for (int k = d; k >= 0; --k) {
    mpz_class& top = rem[k + b.degree()];
    if (top == 0) continue;
    mpz_class q;
    mpz_divexact(q.get_mpz_t(), top.get_mpz_t(), lb.get_mpz_t());
    for (int i = 0; i <= b.degree(); ++i) rem[k + i] -= q * b.coeff(i);
  }
  rem.resize(b.degree());
  return IntPolynomial(std::move(rem));
}

IntPolynomial gcd(const IntPolynomial& a, const IntPolynomial& b) {
  if (a.is_zero()) return b.is_zero() ? IntPolynomial() : b.primitive_part();
  if (b.is_zero()) return a.primitive_part();
  IntPolynomial A = a.primitive_part();
  IntPolynomial B = b.primitive_part();
  if (A.degree() < B.degree()) std::swap(A, B);
  mpz_class g = 1, h = 1;
  while (!B.is_zero() && B.degree() > 0) {
    int d = A.degree() - B.degree();
    IntPolynomial R = pseudo_rem(A, B);
    A = B;
    mpz_class div = g;
    mpz_class hp;
    mpz_pow_ui(hp.get_mpz_t(), h.get_mpz_t(), d);
    div *= hp;
    if (!R.is_zero()) {
      std::vector<mpz_class> v(R.coeffs().size());
      for (size_t i = 0; i < v.size(); ++i)
        mpz_divexact(v[i].get_mpz_t(), R.coeffs()[i].get_mpz_t(), div.get_mpz_t());
      B = IntPolynomial(std::move(v));
    } else {
      B = IntPolynomial();
    }
    g = A.leading();
    if (d > 0) {
      mpz_class gd;
      mpz_pow_ui(gd.get_mpz_t(), g.get_mpz_t(), d);
      if (d == 1) {
        h = gd;
      } else {
        mpz_class hd;
        mpz_pow_ui(hd.get_mpz_t(), h.get_mpz_t(), d - 1);
        mpz_divexact(h.get_mpz_t(), gd.get_mpz_t(), hd.get_mpz_t());
      }
    }
  }
  if (!B.is_zero()) return IntPolynomial::constant(1);  // constant remainder: coprime
  IntPolynomial res = A.primitive_part();
  if (res.leading() < 0) res = mpz_class(-1) * res;
  return res;
}

mpz_class resultant(const IntPolynomial& p, const IntPolynomial& q) {
  if (p.is_zero() || q.is_zero()) throw UsageError("resultant of the zero polynomial");
  if (p.degree() == 0) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), p.coeff(0).get_mpz_t(), q.degree());
    return r;
  }
  if (q.degree() == 0) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), q.coeff(0).get_mpz_t(), p.degree());
    return r;
  }
  IntPolynomial A = p, B = q;
  int s = 1;
  if (A.degree() < B.degree()) {
    if ((A.degree() % 2) && (B.degree() % 2)) s = -s;
    std::swap(A, B);
  }
  // Extract contents; res(cA*A', cB*B') = cA^{deg B} cB^{deg A} res(A', B').
  mpz_class ca = A.content(), cb = B.content();
  A = A.primitive_part();
  B = B.primitive_part();
  mpz_class t;
  {
    mpz_class t1, t2;
    mpz_pow_ui(t1.get_mpz_t(), ca.get_mpz_t(), B.degree());
    mpz_pow_ui(t2.get_mpz_t(), cb.get_mpz_t(), A.degree());
    t = t1 * t2;
  }
  mpz_class g = 1, h = 1;
  while (B.degree() > 0) {
    int d = A.degree() - B.degree();
    if ((A.degree() % 2) && (B.degree() % 2)) s = -s;
    IntPolynomial R = pseudo_rem(A, B);
    A = B;
    mpz_class div;
    mpz_pow_ui(div.get_mpz_t(), h.get_mpz_t(), d);
    div *= g;
    if (R.is_zero()) return 0;
    std::vector<mpz_class> v(R.coeffs().size());
    for (size_t i = 0; i < v.size(); ++i)
      mpz_divexact(v[i].get_mpz_t(), R.coeffs()[i].get_mpz_t(), div.get_mpz_t());
    B = IntPolynomial(std::move(v));
    g = A.leading();
    if (d > 0) {
      mpz_class gd;
      mpz_pow_ui(gd.get_mpz_t(), g.get_mpz_t(), d);
      if (d == 1) {
        h = gd;
      } else {
        mpz_class hd;
        mpz_pow_ui(hd.get_mpz_t(), h.get_mpz_t(), d - 1);
        mpz_divexact(h.get_mpz_t(), gd.get_mpz_t(), hd.get_mpz_t());
      }
    }
  }
  // deg B == 0, B nonzero constant.
  mpz_class lb = B.coeff(0);
  int dA = A.degree();
  mpz_class num;
  mpz_pow_ui(num.get_mpz_t(), lb.get_mpz_t(), dA);
  if (dA > 1) {
    mpz_class hd;
    mpz_pow_ui(hd.get_mpz_t(), h.get_mpz_t(), dA - 1);
    mpz_divexact(num.get_mpz_t(), num.get_mpz_t(), hd.get_mpz_t());
  }
  return s * t * num;
}

bool is_squarefree(const IntPolynomial& p) {
  if (p.is_zero()) throw UsageError("squarefree test of the zero polynomial");
  if (p.degree() == 0) return true;
  return gcd(p, p.derivative()).degree() == 0;
}

IntPolynomial squarefree_part(const IntPolynomial& p) {
  if (p.is_zero()) throw UsageError("squarefree part of the zero polynomial");
  if (p.degree() == 0) return IntPolynomial::constant(1);
  IntPolynomial g = gcd(p, p.derivative());
  if (g.degree() == 0) {
    IntPolynomial r = p.primitive_part();
    if (r.leading() < 0) r = mpz_class(-1) * r;
    return r;
  }
  IntPolynomial r = exact_divide(p.primitive_part(), g);
  r = r.primitive_part();
  if (r.leading() < 0) r = mpz_class(-1) * r;
  return r;
}

std::vector<IntPolynomial> squarefree_decomposition(const IntPolynomial& p) {
  if (p.is_zero()) throw UsageError("squarefree decomposition of the zero polynomial");
  IntPolynomial f = p.primitive_part();
  if (f.leading() < 0) f = mpz_class(-1) * f;
  std::vector<IntPolynomial> out;
  if (f.degree() == 0) return out;
  IntPolynomial fp = f.derivative();
  IntPolynomial g = gcd(f, fp);
  if (g.degree() == 0) {
    out.push_back(f);
    return out;
  }
  IntPolynomial c = exact_divide(f, g);
  IntPolynomial d = exact_divide(fp, g) - c.derivative();
  while (true) {
    if (c.degree() == 0) break;
    IntPolynomial fi = gcd(c, d);
    if (fi.leading() < 0) fi = mpz_class(-1) * fi;
    out.push_back(fi);
    c = exact_divide(c, fi);
    d = exact_divide(d, fi) - c.derivative();
  }
  return out;
}

bool eisenstein_check(const IntPolynomial& p, const mpz_class& prime) {
  if (prime < 2 || mpz_probab_prime_p(prime.get_mpz_t(), 40) == 0)
    throw UsageError("eisenstein_check requires a prime");
  if (p.is_zero() || !p.monic())
    throw UsageError("eisenstein_check requires a monic polynomial");
  for (int i = 0; i < p.degree(); ++i)
    if (!mpz_divisible_p(p.coeff(i).get_mpz_t(), prime.get_mpz_t())) return false;
  mpz_class p2 = prime * prime;
  return !mpz_divisible_p(p.coeff(0).get_mpz_t(), p2.get_mpz_t());
}

// ---------------------------------------------------------------------------
// Sturm machinery.

namespace {

// Sign-preserving Sturm chain: each member is a positive multiple of the
// classical remainder, so sign-change counts are unaffected.
std::vector<IntPolynomial> sturm_chain(const IntPolynomial& f) {
  std::vector<IntPolynomial> chain;
  chain.push_back(f);
  chain.push_back(f.derivative());
  while (!chain.back().is_zero() && chain.back().degree() >= 0) {
    const IntPolynomial& A = chain[chain.size() - 2];
    const IntPolynomial& B = chain.back();
    if (B.degree() == 0) break;
    int d = A.degree() - B.degree();
    IntPolynomial R = pseudo_rem(A, B);
    if (R.is_zero()) break;
    // prem scales A by lc(B)^{d+1}; when that factor is negative the
    // remainder's sign is flipped relative to the true remainder.
    bool neg_scale = (B.leading() < 0) && ((d + 1) % 2 == 1);
    if (!neg_scale) R = mpz_class(-1) * R;  // Sturm negation
    mpz_class cont = R.content();
    if (cont > 1) {
      std::vector<mpz_class> v(R.coeffs().size());
      for (size_t i = 0; i < v.size(); ++i)
        mpz_divexact(v[i].get_mpz_t(), R.coeffs()[i].get_mpz_t(), cont.get_mpz_t());
      R = IntPolynomial(std::move(v));
    }
    chain.push_back(R);
  }
  return chain;
}

int sign_variations(const std::vector<IntPolynomial>& chain, const mpq_class& x) {
  int count = 0, last = 0;
  for (const auto& f : chain) {
    int s = f.is_zero() ? 0 : f.sign_at(x);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

// Sign variations in the leading coefficients at +infinity / -infinity.
int sign_variations_inf(const std::vector<IntPolynomial>& chain, int dir) {
  int count = 0, last = 0;
  for (const auto& f : chain) {
    if (f.is_zero()) continue;
    int s = sgn(f.leading());
    if (dir < 0 && (f.degree() % 2)) s = -s;
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

mpq_class cauchy_bound(const IntPolynomial& p) {
  // 1 + max |c_i| / |lc|.
  mpq_class m = 0;
  mpq_class lc = abs(mpq_class(p.leading()));
  for (int i = 0; i < p.degree(); ++i) {
    mpq_class v = abs(mpq_class(p.coeff(i))) / lc;
    if (v > m) m = v;
  }
  mpq_class bound = m + 1;
  // Round up to an integer so all bisection points are dyadic.
  mpz_class zi;
  mpz_cdiv_q(zi.get_mpz_t(), bound.get_num().get_mpz_t(), bound.get_den().get_mpz_t());
  return mpq_class(zi);
}

Decimal dyadic_to_decimal(const mpq_class& q) {
  // Exact: q = m / 2^k  ->  m * 5^k * 10^{-k}.
  mpz_class den = q.get_den();
  unsigned long k = mpz_scan1(den.get_mpz_t(), 0);
  // den must be a power of two for exactness.
  mpz_class check;
  mpz_ui_pow_ui(check.get_mpz_t(), 2, k);
  if (check != den) throw VerificationError("dyadic_to_decimal: non-dyadic rational");
  mpz_class five_k;
  mpz_ui_pow_ui(five_k.get_mpz_t(), 5, k);
  return Decimal(q.get_num() * five_k, -static_cast<long>(k));
}

}  // namespace

int sturm_count(const IntPolynomial& f, const mpq_class& a, const mpq_class& b) {
  auto chain = sturm_chain(f);
  return sign_variations(chain, a) - sign_variations(chain, b);
}

int sturm_count_all(const IntPolynomial& f) {
  auto chain = sturm_chain(f);
  return sign_variations_inf(chain, -1) - sign_variations_inf(chain, +1);
}

RootSet real_roots(const IntPolynomial& p, const Real& tol) {
  if (p.is_zero()) throw UsageError("real_roots of the zero polynomial");
  RootSet out;
  out.degree = p.degree();
  if (p.degree() == 0) return out;

  auto factors = squarefree_decomposition(p);
  IntPolynomial sf = IntPolynomial::constant(1);
  for (const auto& f : factors) sf = sf * f;
  auto chain = sturm_chain(sf);

  struct Span {
    mpq_class a, b;
    int count;
  };
  mpq_class M = cauchy_bound(sf);
  std::vector<Span> work;
  {
    int total = sign_variations(chain, -M) - sign_variations(chain, M);
    if (total > 0) work.push_back({-M, M, total});
  }
  std::vector<std::pair<mpq_class, mpq_class>> isolated;  // exactly one root each
  std::vector<mpq_class> exact;                            // rational roots hit head-on

  while (!work.empty()) {
    Span s = work.back();
    work.pop_back();
    if (s.count == 1) {
      // Certify a sign change bracket; shrink further during refinement.
      isolated.emplace_back(s.a, s.b);
      continue;
    }
    mpq_class mid = (s.a + s.b) / 2;
    if (sf.sign_at(mid) == 0) {
      exact.push_back(mid);
      // Carve out a dyadic window around the exact root.
      mpq_class w = (s.b - s.a) / 1024;
      while (sf.sign_at(mid - w) == 0 || sf.sign_at(mid + w) == 0) w /= 2;
      int lc = sign_variations(chain, s.a) - sign_variations(chain, mid - w);
      int rc = sign_variations(chain, mid + w) - sign_variations(chain, s.b);
      if (lc > 0) work.push_back({s.a, mid - w, lc});
      if (rc > 0) work.push_back({mid + w, s.b, rc});
    } else {
      int lc = sign_variations(chain, s.a) - sign_variations(chain, mid);
      if (lc > 0) work.push_back({s.a, mid, lc});
      if (s.count - lc > 0) work.push_back({mid, s.b, s.count - lc});
    }
  }

  // Refine isolated brackets to width <= tol by sign-change bisection.
  std::vector<std::pair<mpq_class, mpq_class>> brackets;
  for (auto& [a, b] : isolated) {
    // Ensure a strict sign change (the Sturm count guarantees one root in
    // (a, b]; nudge b if the root sits exactly at b).
    if (sf.sign_at(b) == 0) {
      exact.push_back(b);
      continue;
    }
    while (sf.sign_at(a) == 0) a = (a * 3 + b) / 4;  // dyadic-safe nudge
    mpq_class lo = a, hi = b;
    while (true) {
      Real width = real_from_mpq(hi - lo);
      if (width < tol) break;
      mpq_class mid = (lo + hi) / 2;
      int sm = sf.sign_at(mid);
      if (sm == 0) {
        exact.push_back(mid);
        lo = hi = mid;
        break;
      }
      if (sm == sf.sign_at(lo))
        lo = mid;
      else
        hi = mid;
    }
    if (lo != hi) brackets.emplace_back(lo, hi);
  }
  for (const auto& e : exact) brackets.emplace_back(e, e);
  std::sort(brackets.begin(), brackets.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  // Assign multiplicities from the Yun decomposition.
  for (const auto& [lo, hi] : brackets) {
    int mult = 1;
    for (size_t i = 0; i < factors.size(); ++i) {
      if (factors[i].degree() == 0) continue;
      bool hit;
      if (lo == hi) {
        hit = factors[i].sign_at(lo) == 0;
      } else {
        hit = factors[i].sign_at(lo) * factors[i].sign_at(hi) < 0;
      }
      if (hit) {
        mult = static_cast<int>(i + 1);
        break;
      }
    }
    RootInterval ri;
    ri.lo = dyadic_to_decimal(lo);
    ri.hi = dyadic_to_decimal(hi);
    ri.multiplicity = mult;
    ri.real = true;
    ri.approx = Complex(real_from_mpq((lo + hi) / 2));
    out.roots.push_back(std::move(ri));
  }
  out.complex_count = out.degree - out.real_count();
  return out;
}

std::pair<mpq_class, mpq_class> refine_root(const IntPolynomial& p, mpq_class lo,
                                            mpq_class hi, mpfr_prec_t prec) {
  int slo = p.sign_at(lo);
  if (slo == 0) return {lo, lo};
  if (p.sign_at(hi) == 0) return {hi, hi};
  if (slo == p.sign_at(hi))
    throw VerificationError("refine_root: bracket has no sign change");
  mpq_class scale = std::max(abs(lo), abs(hi)) + 1;
  // Target width: scale * 2^-prec.
  mpz_class denom;
  mpz_ui_pow_ui(denom.get_mpz_t(), 2, prec);
  mpq_class target = scale / mpq_class(denom);
  while (hi - lo > target) {
    mpq_class mid = (lo + hi) / 2;
    int sm = p.sign_at(mid);
    if (sm == 0) return {mid, mid};
    if (sm == slo)
      lo = mid;
    else
      hi = mid;
  }
  return {lo, hi};
}

// ---------------------------------------------------------------------------
// Aberth simultaneous iteration.

std::vector<Complex> aberth_roots(std::vector<Real> cr, mpfr_prec_t prec) {
  if (prec <= 0) prec = Real::working_precision() + 64;
  while (!cr.empty() && cr.back().is_zero()) cr.pop_back();
  if (cr.size() <= 1) return {};
  int d = static_cast<int>(cr.size()) - 1;
  std::vector<Complex> z(d);
  if (d == 1) return {Complex(-cr[0] / cr[1])};

  auto eval = [&](const Complex& x, Complex& val, Complex& der) {
    val = Complex(cr[d]);
    der = Complex(Real(0), Real(0));
    for (int i = d - 1; i >= 0; --i) {
      der = der * x + val;
      val = val * x + Complex(cr[i]);
    }
  };

  Real R(0);
  for (int i = 0; i < d; ++i) R = max(R, abs(cr[i]) / abs(cr[d]));
  R += Real(1);
  // Fujiwara bound; far tighter than Cauchy when middle coefficients are
  // large, which keeps the start ring close enough to converge at high degree.
  Real fu(0);
  for (int i = 0; i < d; ++i) {
    if (cr[i].is_zero()) continue;
    Real ratio = abs(cr[i]) / abs(cr[d]);
    if (i == 0) ratio = ratio / Real(2);
    fu = max(fu, pow(ratio, Real(1) / Real(d - i)));
  }
  fu = Real(2) * fu + Real(1) / Real(1024);
  R = min(R, fu);
  Real pi = const_pi(prec);
  for (int k = 0; k < d; ++k) {
    Real th = (Real(2) * pi * (Real(k) + Real(0.37))) / Real(d);
    Real rad = R * (Real(0.65) + Real(0.3) * Real(k % 5) / Real(5));
    z[k] = Complex(rad * cos(th), rad * sin(th) + R * Real(1e-3));
  }

  Real eps = pow(Real(2), -static_cast<long>(prec - 16));
  for (int iter = 0; iter < 600; ++iter) {
    Real worst(0);
    for (int i = 0; i < d; ++i) {
      Complex val, der;
      eval(z[i], val, der);
      if (val.abs2().is_zero()) continue;
      Complex w;
      if (der.abs2().is_zero()) {
        z[i] = z[i] + Complex(Real(1e-3) * (Real(1) + z[i].abs()));
        worst = Real(1);
        continue;
      }
      w = val / der;
      Complex s;
      for (int j = 0; j < d; ++j) {
        if (j == i) continue;
        s = s + Complex(Real(1)) / (z[i] - z[j]);
      }
      Complex denom = Complex(Real(1)) - w * s;
      Complex corr = denom.abs2().is_zero() ? w : w / denom;
      z[i] = z[i] - corr;
      Real rel = corr.abs() / (Real(1) + z[i].abs());
      worst = max(worst, rel);
    }
    if (worst < eps) break;
  }
  return z;
}

namespace {

std::vector<Complex> aberth_distinct(const IntPolynomial& f, mpfr_prec_t prec) {
  int d = f.degree();
  if (d == 0) return {};
  std::vector<Real> cr(d + 1, Real(Real::AtPrecision{prec}));
  for (int i = 0; i <= d; ++i) cr[i] = real_from_mpz(f.coeff(i), prec);
  return aberth_roots(std::move(cr), prec);
}

}  // namespace

std::vector<Complex> all_roots(const IntPolynomial& p, mpfr_prec_t prec) {
  if (p.is_zero()) throw UsageError("all_roots of the zero polynomial");
  if (prec <= 0) prec = Real::working_precision() + 64;
  std::vector<Complex> out;
  auto factors = squarefree_decomposition(p);
  for (size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].degree() <= 0) continue;
    auto roots = aberth_distinct(factors[i], prec);
    // Snap near-real candidates whose realness an exact sign change confirms.
    for (auto& r : roots) {
      if (r.im.is_zero()) continue;
      Real tol = abs(r.im) * Real(4) + pow(Real(2), -static_cast<long>(prec / 2));
      if (abs(r.im) < pow(Real(2), -static_cast<long>(prec / 3)) * (Real(1) + abs(r.re))) {
        // Bracket re exactly (binary floats are rational) and test for a
        // sign change before snapping onto the axis.
        auto to_q = [](const Real& v) {
          mpq_class q;
          mpfr_get_q(q.get_mpq_t(), v.raw());
          return q;
        };
        mpq_class lo_q = to_q(r.re - tol);
        mpq_class hi_q = to_q(r.re + tol);
        if (factors[i].sign_at(lo_q) * factors[i].sign_at(hi_q) < 0) {
          auto [a, b] = refine_root(factors[i], lo_q, hi_q, prec);
          r = Complex(real_from_mpq((a + b) / 2, prec));
        }
      }
    }
    for (int copy = 0; copy <= static_cast<int>(i); ++copy)
      out.insert(out.end(), roots.begin(), roots.end());
  }
  std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    if (a.re < b.re) return true;
    if (b.re < a.re) return false;
    return a.im < b.im;
  });
  return out;
}

// ---------------------------------------------------------------------------
// RealPolynomial.

void RealPolynomial::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

RealPolynomial::RealPolynomial(std::vector<Real> coeffs) : c_(std::move(coeffs)) {
  trim();
}

RealPolynomial RealPolynomial::from_int(const IntPolynomial& p, mpfr_prec_t prec) {
  std::vector<Real> c;
  c.reserve(p.coeffs().size());
  for (const auto& z : p.coeffs()) c.push_back(real_from_mpz(z, prec));
  return RealPolynomial(std::move(c));
}

RealPolynomial RealPolynomial::from_roots(const std::vector<Real>& roots) {
  std::vector<Real> acc{Real(1)};
  for (const auto& r : roots) {
    std::vector<Real> next(acc.size() + 1, Real(0));
    for (size_t i = 0; i < acc.size(); ++i) {
      next[i + 1] += acc[i];
      next[i] -= r * acc[i];
    }
    acc = std::move(next);
  }
  return RealPolynomial(std::move(acc));
}

RealPolynomial RealPolynomial::constant(const Real& c) {
  return RealPolynomial(std::vector<Real>{c});
}

const Real& RealPolynomial::coeff(int i) const {
  static const Real zero(0);
  if (i < 0 || i >= static_cast<int>(c_.size())) return zero;
  return c_[i];
}

mpfr_prec_t RealPolynomial::precision() const {
  mpfr_prec_t p = 0;
  for (const auto& c : c_) p = std::max(p, c.precision());
  return p == 0 ? Real::working_precision() : p;
}

Real RealPolynomial::evaluate(const Real& x) const {
  Real acc(Real::AtPrecision{std::max(x.precision(), precision())});
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Complex RealPolynomial::evaluate(const Complex& z) const {
  Complex acc;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + Complex(*it);
  return acc;
}

RealPolynomial RealPolynomial::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Real> d(c_.size() - 1, Real(0));
  for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = Real(static_cast<long>(i)) * c_[i];
  return RealPolynomial(std::move(d));
}

RealPolynomial RealPolynomial::slice(int lo, int hi, bool shift_down) const {
  std::vector<Real> v;
  for (int i = lo; i < hi; ++i) v.push_back(coeff(i));
  if (!shift_down) {
    std::vector<Real> padded(lo, Real(0));
    padded.insert(padded.end(), v.begin(), v.end());
    return RealPolynomial(std::move(padded));
  }
  return RealPolynomial(std::move(v));
}

std::pair<IntPolynomial, Real> RealPolynomial::round_to_int() const {
  std::vector<mpz_class> zi(c_.size());
  Real worst(0);
  for (size_t i = 0; i < c_.size(); ++i) {
    Real r = round(c_[i]);
    mpfr_get_z(zi[i].get_mpz_t(), r.raw(), MPFR_RNDN);
    worst = max(worst, abs(c_[i] - real_from_mpz(zi[i])));
  }
  return {IntPolynomial(std::move(zi)), worst};
}

RealPolynomial operator+(const RealPolynomial& a, const RealPolynomial& b) {
  std::vector<Real> v(std::max(a.c_.size(), b.c_.size()), Real(0));
  for (size_t i = 0; i < v.size(); ++i) v[i] = a.coeff(i) + b.coeff(i);
  return RealPolynomial(std::move(v));
}

RealPolynomial operator-(const RealPolynomial& a, const RealPolynomial& b) {
  std::vector<Real> v(std::max(a.c_.size(), b.c_.size()), Real(0));
  for (size_t i = 0; i < v.size(); ++i) v[i] = a.coeff(i) - b.coeff(i);
  return RealPolynomial(std::move(v));
}

RealPolynomial operator*(const RealPolynomial& a, const RealPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Real> v(a.c_.size() + b.c_.size() - 1, Real(0));
  for (size_t i = 0; i < a.c_.size(); ++i)
    for (size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
  return RealPolynomial(std::move(v));
}

RealPolynomial operator*(const Real& k, const RealPolynomial& a) {
  std::vector<Real> v = a.c_;
  for (auto& c : v) c *= k;
  return RealPolynomial(std::move(v));
}

std::string RealPolynomial::str(int digits) const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  for (int i = degree(); i >= 0; --i) {
    if (i < degree()) os << " + ";
    os << c_[i].str(digits);
    if (i > 0) os << "*x^" << i;
  }
  return os.str();
}

}  // namespace potpoly
