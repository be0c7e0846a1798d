#include "potpoly/norm.hpp"

#include <random>
#include <string>
#include <vector>

#include "doctest.h"

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

}  // namespace

TEST_CASE("sup norm basics") {
  IntervalUnion s04 = seg("0", "4");
  MixtureMeasure mu = MixtureMeasure::equilibrium(Real(0), Real(4));
  CHECK(dd(abs(n_norm(poly({"1"}), 0, mu, s04) - Real(1))) < 1e-40);
  CHECK(dd(abs(n_norm(poly({"-2", "1"}), 0, mu, s04) - Real(2))) < 1e-40);
  // Interior maximum of |x(x-2)| on [0,2] is 1 at x = 1.
  RealPolynomial hump = RealPolynomial::from_roots({Real(0), Real(2)});
  CHECK(dd(abs(n_norm(hump, 0, mu, seg("0", "2")) - Real(1))) < 1e-30);
  // Union: the larger component endpoint wins for x^2.
  IntervalUnion u(std::vector<Interval>{{Decimal::parse("-1"), Decimal::parse("1")},
                                        {Decimal::parse("2"), Decimal::parse("3")}});
  CHECK(dd(abs(n_norm(poly({"0", "0", "1"}), 0, mu, u) - Real(9))) < 1e-30);
  // Rays have no sup norm.
  IntervalUnion ray(std::vector<Interval>{{Decimal::parse("0"), Decimal::parse("1")}},
                    Ray{+1, Decimal::parse("5")});
  CHECK_THROWS_AS(n_norm(poly({"1"}), 0, mu, ray), NotCompactError);
  CHECK_THROWS_AS(n_norm(poly({"1"}), -1, mu, s04), ParameterError);
}

TEST_CASE("weighted norm with constant potential") {
  // U is identically 0 on [0,4] for its own arcsine law, so weights drop out.
  IntervalUnion s04 = seg("0", "4");
  MixtureMeasure mu04 = MixtureMeasure::equilibrium(Real(0), Real(4));
  IntPolynomial p = poly({"-1", "-1", "1"});
  Real plain = n_norm(p, 0, mu04, s04);
  Real weighted = n_norm(p, 7, mu04, s04);
  CHECK(dd(abs(plain - weighted)) < 1e-28);
  // On [1,2] the arcsine potential is the constant log 4: factor 4^n.
  IntervalUnion s12 = seg("1", "2");
  MixtureMeasure mu12 = MixtureMeasure::equilibrium(Real(1), Real(2));
  Real v = n_norm(poly({"-1", "1"}), 3, mu12, s12);
  CHECK(dd(abs(v - Real(64))) < 1e-25);
}

TEST_CASE("weighted norm of quantile polynomials grows at most polynomially") {
  MixtureMeasure mu = MixtureMeasure::equilibrium(Real(0), Real::parse("4.2"));
  IntervalUnion sigma = seg("0", "4.2");
  for (int n : {4, 8, 16, 32}) {
    RealPolynomial p = approximating_polynomial(mu, n);
    Real v = n_norm(p, n, mu, sigma);
    Real grade = pow(Real(n), Real(6));
    CHECK(dd(v) < dd(grade));
    CHECK(dd(v) > 1.0 / dd(grade));
  }
}

TEST_CASE("norm is submultiplicative across weights") {
  MixtureMeasure mu = MixtureMeasure::equilibrium(Real(0), Real(4));
  IntervalUnion sigma = seg("0", "4");
  std::mt19937_64 rng(77u);
  std::uniform_int_distribution<int> coeff(-9, 9), deg(1, 4), nn(0, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> pc, qc;
    int dp = deg(rng), dq = deg(rng);
    for (int i = 0; i <= dp; ++i) pc.push_back(std::to_string(coeff(rng)));
    for (int i = 0; i <= dq; ++i) qc.push_back(std::to_string(coeff(rng)));
    IntPolynomial p = IntPolynomial::from_strings(pc);
    IntPolynomial q = IntPolynomial::from_strings(qc);
    if (p.is_zero() || q.is_zero()) continue;
    long n = nn(rng), m = nn(rng);
    Real lhs = n_norm(p * q, n + m, mu, sigma);
    Real rhs = n_norm(p, n, mu, sigma) * n_norm(q, m, mu, sigma);
    CHECK(dd(lhs) <= dd(rhs) * (1 + 1e-20));
  }
}

TEST_CASE("dividing out a root obeys a polynomial growth bound") {
  MixtureMeasure mu = MixtureMeasure::equilibrium(Real(0), Real(4));
  IntervalUnion sigma = seg("0", "4");
  int m = 10;
  RealPolynomial p = approximating_polynomial(mu, m);
  std::vector<Real> roots;
  for (int i = 1; i <= m; ++i) roots.push_back(quantile(mu, Real(i) / Real(m)));
  for (int drop : {0, 3, 7}) {
    std::vector<Real> rest;
    for (int i = 0; i < m; ++i)
      if (i != drop) rest.push_back(roots[i]);
    RealPolynomial q = RealPolynomial::from_roots(rest);
    for (long n : {0L, 5L}) {
      Real ratio = n_norm(q, n, mu, sigma) / n_norm(p, n, mu, sigma);
      CHECK(dd(ratio) <= dd(pow(Real(n + m + 1), Real(3))));
    }
  }
}

TEST_CASE("quantile polynomial construction") {
  MixtureMeasure mu = MixtureMeasure::equilibrium(Real(0), Real(4));
  RealPolynomial p2 = approximating_polynomial(mu, 2);
  // Roots at the median 2 and maximum 4: z^2 - 6z + 8.
  CHECK(dd(abs(p2.coeff(0) - Real(8))) < 1e-28);
  CHECK(dd(abs(p2.coeff(1) + Real(6))) < 1e-28);
  CHECK(dd(abs(p2.coeff(2) - Real(1))) < 1e-40);
  RealPolynomial p1 = approximating_polynomial(mu, 1);
  CHECK(dd(abs(p1.coeff(0) + Real(4))) < 1e-28);

  // Mixed measure: roots sorted inside the support hull.
  MixtureMeasure mix = Real(0.5) * MixtureMeasure::equilibrium(Real(0), Real(1)) +
                       Real(0.5) * MixtureMeasure::nu(Real(2), Real(3));
  RealPolynomial p13 = approximating_polynomial(mix, 13);
  auto rs = real_roots_numeric(p13);
  REQUIRE(rs.size() == 13);
  for (size_t i = 0; i + 1 < rs.size(); ++i) CHECK(dd(rs[i]) <= dd(rs[i + 1]));
  CHECK(dd(rs.front()) >= 0.0);
  CHECK(dd(rs.back()) <= 3.0 + 1e-20);

  CHECK_THROWS_AS(approximating_polynomial(mu, 0), ParameterError);
  CHECK_THROWS_AS(approximating_polynomial(MixtureMeasure::atom(Real(0)), 2), UsageError);
}

TEST_CASE("root pruning") {
  // Five roots in one component, pruned to the middle three.
  RealPolynomial p = RealPolynomial::from_roots(
      {Real(0.125), Real(0.25), Real(0.5), Real(0.75), Real(0.875)});
  RealPolynomial t = prune(p, seg("0", "1"), 3);
  auto rs = real_roots_numeric(t);
  REQUIRE(rs.size() == 3);
  CHECK(dd(abs(rs[0] - Real(0.25))) < 1e-25);
  CHECK(dd(abs(rs[1] - Real(0.5))) < 1e-25);
  CHECK(dd(abs(rs[2] - Real(0.75))) < 1e-25);

  // Roots outside the set are never selected.
  RealPolynomial far = RealPolynomial::from_roots(
      {Real(-5), Real(0.25), Real(0.5), Real(0.75), Real(7)});
  RealPolynomial t1 = prune(far, seg("0", "1"), 1);
  auto rs1 = real_roots_numeric(t1);
  REQUIRE(rs1.size() == 1);
  CHECK(dd(abs(rs1[0] - Real(0.5))) < 1e-25);

  // Two components, each keeps its interior pair.
  IntervalUnion two(std::vector<Interval>{{Decimal::parse("0"), Decimal::parse("1")},
                                          {Decimal::parse("2"), Decimal::parse("3")}});
  RealPolynomial p8 = RealPolynomial::from_roots(
      {Real(0.125), Real(0.25), Real(0.375), Real(0.5),
       Real(2.125), Real(2.25), Real(2.375), Real(2.5)});
  auto rs4 = real_roots_numeric(prune(p8, two, 4));
  REQUIRE(rs4.size() == 4);
  CHECK(dd(abs(rs4[0] - Real(0.25))) < 1e-25);
  CHECK(dd(abs(rs4[1] - Real(0.375))) < 1e-25);
  CHECK(dd(abs(rs4[2] - Real(2.25))) < 1e-25);
  CHECK(dd(abs(rs4[3] - Real(2.375))) < 1e-25);

  CHECK_THROWS_AS(prune(p, seg("0", "1"), 4), PruneInfeasibleError);
  CHECK_THROWS_AS(prune(Real(3) * p, seg("0", "1"), 2), UsageError);
  CHECK_THROWS_AS(prune(p, seg("0", "1"), 0), ParameterError);
  CHECK_THROWS_AS(real_roots_numeric(RealPolynomial::from_int(poly({"1", "0", "1"}))),
                  UsageError);
}
