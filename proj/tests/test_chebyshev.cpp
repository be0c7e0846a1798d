#include "potpoly/chebyshev.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "potpoly/errors.hpp"
#include "potpoly/interval.hpp"
#include "potpoly/measure.hpp"
#include "potpoly/polynomial.hpp"

using namespace potpoly;

namespace {

double dd(const Real& r) { return r.to_double(); }

IntervalUnion seg(const char* lo, const char* hi) {
  return IntervalUnion::single(Decimal::parse(lo), Decimal::parse(hi));
}

IntPolynomial poly(std::initializer_list<const char*> coeffs) {
  std::vector<std::string> v;
  for (auto* s : coeffs) v.emplace_back(s);
  return IntPolynomial::from_strings(v);
}

mpq_class rat(const Decimal& d) {
  long e = d.exponent();
  mpz_class p10;
  mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
  mpq_class q = e < 0 ? mpq_class(d.mantissa(), p10) : mpq_class(d.mantissa() * p10);
  q.canonicalize();
  return q;
}

IntervalUnion sym26() { return seg("-2.6", "2.6"); }

// Binary doubles for 2.6 land just above the decimal endpoint, so the
// equilibrium measure must be seated on the parsed value instead.
MixtureMeasure equilibrium26() {
  return MixtureMeasure::equilibrium(Decimal::parse("-2.6").to_real(192),
                                     Decimal::parse("2.6").to_real(192));
}

}  // namespace

TEST_CASE("segment minimax matches the classical polynomials") {
  // Degree 2 on [0,4]: (x-2)^2 - 2.
  ChebyshevResult c2 = chebyshev(seg("0", "4"), 2);
  REQUIRE(c2.T.degree() == 2);
  CHECK(dd(abs(c2.T.coeff(0) - Real(2))) < 1e-28);
  CHECK(dd(abs(c2.T.coeff(1) + Real(4))) < 1e-28);
  CHECK(dd(abs(c2.T.coeff(2) - Real(1))) < 1e-30);
  CHECK(dd(abs(c2.norm0 - Real(2))) < 1e-28);
  REQUIRE(c2.alternation_points.size() == 3);
  CHECK(dd(abs(c2.alternation_points[0] - Real(0))) < 1e-26);
  CHECK(dd(abs(c2.alternation_points[1] - Real(2))) < 1e-26);
  CHECK(dd(abs(c2.alternation_points[2] - Real(4))) < 1e-26);

  // Degree 1 on a symmetric segment is x itself.
  ChebyshevResult c1 = chebyshev(seg("-2.5", "2.5"), 1);
  REQUIRE(c1.T.degree() == 1);
  CHECK(dd(abs(c1.T.coeff(0))) < 1e-28);
  CHECK(dd(abs(c1.T.coeff(1) - Real(1))) < 1e-30);
  CHECK(dd(abs(c1.norm0 - Real(2.5))) < 1e-28);

  // Degree 6 on [-2,2]: x^6 - 6x^4 + 9x^2 - 2.
  ChebyshevResult c6 = chebyshev(seg("-2", "2"), 6);
  REQUIRE(c6.T.degree() == 6);
  const double want[] = {-2, 0, 9, 0, -6, 0, 1};
  for (int i = 0; i <= 6; ++i) CHECK(dd(abs(c6.T.coeff(i) - Real(want[i]))) < 1e-24);
  CHECK(dd(abs(c6.norm0 - Real(2))) < 1e-26);

  ChebyshevResult c0 = chebyshev(seg("0", "4"), 0);
  REQUIRE(c0.T.degree() == 0);
  CHECK(dd(abs(c0.T.coeff(0) - Real(1))) < 1e-30);
  CHECK(dd(abs(c0.norm0 - Real(1))) < 1e-30);
}

TEST_CASE("segment norms follow the capacity power law") {
  // On one segment the minimax norm is exactly 2 cap^r.
  ChebyshevResult c20 = chebyshev(sym26(), 20);
  Real want = Real(2) * pow(Real(13) / Real(10), 20L);
  CHECK(dd(abs(c20.norm0 - want) / want) < 1e-22);
  double growth = std::pow(dd(c20.norm0) / 2.0, 1.0 / 20.0);
  CHECK(growth == doctest::Approx(1.3).epsilon(1e-9));

  // Odd degree on a symmetric segment: the polynomial is odd.
  ChebyshevResult c7 = chebyshev(sym26(), 7);
  Real want7 = Real(2) * pow(Real(13) / Real(10), 7L);
  CHECK(dd(abs(c7.norm0 - want7) / want7) < 1e-22);
  for (int i = 0; i <= 6; i += 2) CHECK(dd(abs(c7.T.coeff(i))) / dd(c7.norm0) < 1e-22);
}

TEST_CASE("union minimax equioscillates above the capacity bound") {
  // Symmetric two-interval set: degree 2 minimax is x^2 - (a^2+b^2)/2 with
  // norm (b^2-a^2)/2, here x^2 - 5/2 with norm 3/2.
  IntervalUnion twoS(std::vector<Interval>{{Decimal::parse("-2"), Decimal::parse("-1")},
                                           {Decimal::parse("1"), Decimal::parse("2")}});
  ChebyshevResult s2 = chebyshev(twoS, 2);
  REQUIRE(s2.T.degree() == 2);
  CHECK(dd(abs(s2.T.coeff(0) + Real(2.5))) < 1e-22);
  CHECK(dd(abs(s2.T.coeff(1))) < 1e-22);
  CHECK(dd(abs(s2.norm0 - Real(1.5))) < 1e-22);

  IntervalUnion u(std::vector<Interval>{{Decimal::parse("0"), Decimal::parse("1")},
                                        {Decimal::parse("3"), Decimal::parse("4")}});
  ChebyshevResult c4 = chebyshev(u, 4);
  Real cap = capacity(u).capacity;
  CHECK(dd(c4.norm0) >= dd(pow(cap, 4L)));
  // Pinned value for this set, cross-checked against the capacity bound.
  CHECK(dd(c4.norm0) == doctest::Approx(1.124974444).epsilon(1e-7));

  ChebyshevResult c5 = chebyshev(u, 5);
  REQUIRE(c5.alternation_points.size() == 6);
  int prev_sign = 0;
  for (size_t i = 0; i < c5.alternation_points.size(); ++i) {
    const Real& x = c5.alternation_points[i];
    CHECK(u.contains(x, Real(1e-20)));
    if (i) CHECK(dd(c5.alternation_points[i - 1]) < dd(x));
    Real v = c5.T.evaluate(x);
    CHECK(dd(abs(abs(v) - c5.norm0)) / dd(c5.norm0) < 1e-18);
    int s = v.sign();
    CHECK(s != 0);
    if (i) CHECK(s == -prev_sign);
    prev_sign = s;
  }
}

TEST_CASE("minimax input validation") {
  CHECK_THROWS_AS(chebyshev(seg("0", "4"), -1), ParameterError);
  IntervalUnion ray(std::vector<Interval>{{Decimal::parse("0"), Decimal::parse("1")}},
                    Ray{+1, Decimal::parse("5")});
  CHECK_THROWS_AS(chebyshev(ray, 3), NotCompactError);
}

TEST_CASE("window planning respects the growth constraints") {
  IntervalUnion s = sym26();
  const double lnk = std::log(1.3);
  for (int n : {66, 120}) {
    AdjusterPlan plan = plan_parameters(s, n);
    CHECK(plan.d0 >= 2);
    CHECK(plan.m % plan.d0 == 0);
    CHECK(plan.r == plan.m / plan.d0);
    CHECK(plan.m < n);
    CHECK((plan.m / 2.0) * lnk > std::log(static_cast<double>(n)));
  }
  // Same inputs, same plan.
  AdjusterPlan a = plan_parameters(s, 90);
  AdjusterPlan b = plan_parameters(s, 90);
  CHECK(a.m == b.m);
  CHECK(a.d0 == b.d0);

  // Below the workable range the error names the smallest usable degree.
  try {
    plan_parameters(s, 40);
    CHECK(false);
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("smallest workable degree") != std::string::npos);
  }
  // Capacity 1 admits no window at all.
  CHECK_THROWS_AS(plan_parameters(seg("0", "4"), 80), ParameterError);
}

TEST_CASE("adjuster output carries the window invariants") {
  IntervalUnion s = sym26();
  const int n = 66, m = 62;
  RealPolynomial p = RealPolynomial::from_roots(
      {Real(-1.5), Real(-0.5), Real(0.5), Real(1.5)});
  AdjusterResult res = forge_adjuster(p, s, n, m);

  REQUIRE(res.Q.degree() == m);
  CHECK(dd(abs(res.Q.coeff(m) - Real(1))) < 1e-18);
  CHECK(res.parity_defect.to_double() <= 1e-18);
  REQUIRE(static_cast<int>(res.roots.size()) == m);
  REQUIRE(res.margins.size() == res.roots.size());
  for (size_t i = 0; i < res.roots.size(); ++i) {
    CHECK(s.contains(res.roots[i], Real(0)));
    CHECK(dd(res.margins[i]) > 0);
    if (i) CHECK(dd(res.roots[i - 1]) < dd(res.roots[i]));
  }
  CHECK(dd(res.norm_window.first) > 0);
  CHECK(dd(res.norm_window.second) >= dd(res.norm_window.first));

  // Independent parity re-check of the product coefficients.
  RealPolynomial prod = res.Q * p;
  REQUIRE(prod.degree() == n);
  for (int i = n - m; i <= n - 1; ++i) {
    Real c = prod.coeff(i);
    CHECK(dd(abs(c - Real(2) * round(c / Real(2)))) < 1e-12);
  }
}

TEST_CASE("adjuster input validation") {
  IntervalUnion s = sym26();
  RealPolynomial p4 = RealPolynomial::from_roots(
      {Real(-1.5), Real(-0.5), Real(0.5), Real(1.5)});
  RealPolynomial p3 = RealPolynomial::from_roots({Real(-0.5), Real(0), Real(0.5)});
  CHECK_THROWS_AS(forge_adjuster(p3, s, 66, 62), DegreeError);
  CHECK_THROWS_AS(forge_adjuster(p4, s, 66, 63), ParameterError);
  CHECK_THROWS_AS(forge_adjuster(p4, s, 66, 30), ParameterError);
  CHECK_THROWS_AS(forge_adjuster(p4, seg("0", "4"), 66, 62), ParameterError);
  std::vector<Real> sc{Real(0), Real(0), Real(0), Real(0), Real(2)};
  CHECK_THROWS_AS(forge_adjuster(RealPolynomial(sc), s, 66, 62), UsageError);
  RealPolynomial pout = RealPolynomial::from_roots(
      {Real(-3), Real(-0.5), Real(0.5), Real(1.5)});
  CHECK_THROWS_AS(forge_adjuster(pout, s, 66, 62), UsageError);
}

TEST_CASE("integer construction is certified end to end") {
  IntervalUnion s = sym26();
  MixtureMeasure mu = equilibrium26();
  const int n = 66;
  ConstructionReport rep = construct(mu, s, n);

  REQUIRE(rep.degree == n);
  REQUIRE(rep.P_n.degree() == n);
  CHECK(rep.P_n.monic());
  CHECK(rep.eisenstein_prime == 2);

  // Eisenstein shape at 2: every coefficient below the top is even and the
  // constant term is not divisible by 4.
  for (int i = 0; i < n; ++i) CHECK(rep.P_n.coeff(i) % 2 == 0);
  mpz_class c0m4 = ((rep.P_n.coeff(0) % 4) + 4) % 4;
  CHECK(c0m4 == 2);

  REQUIRE(rep.roots.degree == n);
  CHECK(rep.roots.complex_count == 0);
  REQUIRE(rep.roots.real_count() == n);
  REQUIRE(rep.membership_margins.size() == static_cast<size_t>(n));

  // Re-verify every bracket with exact rational sign evaluations, and keep
  // the brackets ordered and inside the set.
  mpq_class lo_edge(-26, 10), hi_edge(26, 10);
  mpq_class prev_hi = lo_edge;
  for (int i = 0; i < n; ++i) {
    const RootInterval& ri = rep.roots.roots[i];
    mpq_class lo = rat(ri.lo), hi = rat(ri.hi);
    CHECK(lo < hi);
    CHECK(lo >= prev_hi);
    CHECK(hi <= hi_edge);
    int sl = rep.P_n.sign_at(lo), sh = rep.P_n.sign_at(hi);
    CHECK(sl * sh == -1);
    CHECK(dd(rep.membership_margins[i]) > 0);
    prev_hi = hi;
  }

  CHECK(dd(rep.cdf_dist) <= 0.1);
  Real mean_root = Real(0) - real_from_mpq(mpq_class(rep.P_n.coeff(n - 1)), 256) /
                                 Real(static_cast<long>(n));
  CHECK(dd(abs(rep.trace_ratio - mean_root)) < 1e-30);
  CHECK(std::abs(dd(rep.trace_ratio)) <= 2.6);

  // Two routes to the mean log of x^2 - 2 against the root measure: the
  // potential sum and the exact resultant must agree.
  IntPolynomial q = poly({"-2", "0", "1"});
  MixtureMeasure nu = counting_measure(rep.P_n);
  PotentialValue li = log_integral(q, nu);
  REQUIRE(!li.infinite);
  mpz_class res = resultant(rep.P_n, q);
  REQUIRE(res != 0);
  Real rhs = log(abs(real_from_mpq(mpq_class(res), 512))) / Real(static_cast<long>(n));
  CHECK(dd(abs(li.value - rhs)) < 1e-9);

  // Same inputs, same integer polynomial.
  ConstructionReport rep2 = construct(mu, s, n);
  CHECK(rep2.P_n == rep.P_n);
}

TEST_CASE("construction rejects unusable inputs") {
  IntervalUnion s = sym26();
  MixtureMeasure mu = equilibrium26();
  IntervalUnion ray(std::vector<Interval>{{Decimal::parse("0"), Decimal::parse("1")}},
                    Ray{+1, Decimal::parse("5")});
  CHECK_THROWS_AS(construct(mu, ray, 66), NotCompactError);
  CHECK_THROWS_AS(construct(mu, seg("0", "4"), 66), ParameterError);
  MixtureMeasure half = MixtureMeasure::equilibrium(Real(-1), Real(1), Real(0.5));
  CHECK_THROWS_AS(construct(half, s, 66), NotProbabilityError);
  MixtureMeasure atoms = counting_measure(poly({"-2", "0", "1"}));
  CHECK_THROWS_AS(construct(atoms, s, 66), UsageError);
  MixtureMeasure wide = MixtureMeasure::equilibrium(Real(-3), Real(3));
  CHECK_THROWS_AS(construct(wide, s, 66), UsageError);
  // Degree below the workable range for this set.
  CHECK_THROWS_AS(construct(mu, s, 40), ParameterError);
  // Pool member with negative mean log against the target measure.
  MixtureMeasure tight = MixtureMeasure::equilibrium(Real(0.9), Real(1.1));
  std::vector<IntPolynomial> pool{poly({"-1", "1"})};
  CHECK_THROWS_AS(construct(tight, s, 66, pool), UsageError);
}
