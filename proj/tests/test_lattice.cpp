#include "potpoly/lattice.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "potpoly/norm.hpp"

using namespace potpoly;

namespace {

double dd(const Real& r) { return r.to_double(); }

IntervalUnion seg(const char* lo, const char* hi) {
  return IntervalUnion::single(Decimal::parse(lo), Decimal::parse(hi));
}

IntPolynomial ip(std::vector<long> c) {
  std::vector<mpz_class> v(c.begin(), c.end());
  return IntPolynomial(std::move(v));
}

// Fraction-free Bareiss determinant; exact over mpz.
mpz_class bareiss_det(std::vector<std::vector<mpz_class>> a) {
  size_t n = a.size();
  if (n == 0) return 1;
  mpz_class prev = 1;
  int sign = 1;
  for (size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      size_t piv = k;
      for (size_t r = k + 1; r < n; ++r)
        if (a[r][k] != 0) {
          piv = r;
          break;
        }
      if (a[piv][k] == 0) return 0;
      std::swap(a[k], a[piv]);
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i)
      for (size_t j = k + 1; j < n; ++j) {
        mpz_class num = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        mpz_divexact(a[i][j].get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

IntPolynomial random_squarefree(std::mt19937_64& rng, int deg) {
  std::uniform_int_distribution<long> coeff(-9, 9);
  for (;;) {
    std::vector<long> c(deg + 1);
    for (int i = 0; i < deg; ++i) c[i] = coeff(rng);
    while (c[deg] == 0) c[deg] = coeff(rng);
    IntPolynomial p = ip(c);
    if (is_squarefree(p)) return p;
  }
}

}  // namespace

TEST_CASE("adjustment identity cases") {
  IntPolynomial p = ip({-1, -1, 0, 1});  // x^3 - x - 1, squarefree
  std::vector<Real> qc = {Real(2), Real(-3), Real(1)};
  RealPolynomial q(qc);

  AdjustmentResult a = adjust_to_integer(q, p);
  REQUIRE(a.R.degree() == 2);
  CHECK(a.R.coeff(0) == 2);
  CHECK(a.R.coeff(1) == -3);
  CHECK(a.R.coeff(2) == 1);
  CHECK(dd(a.beta_l1) < 1e-40);
  CHECK(dd(a.residual) < 1e-40);

  AdjustmentResult z = adjust_to_integer(RealPolynomial(), p);
  CHECK(z.R.is_zero());
  CHECK(dd(z.beta_l1) < 1e-60);
  CHECK(dd(z.residual) < 1e-60);
}

TEST_CASE("adjustment of a half coefficient") {
  // P = x^2 - 2 with roots +-sqrt(2); Q = x/2 has beta_j = 1/4 at both roots
  // when R = 0, and no integer R does better than |beta|_1 = 1/2.
  IntPolynomial p = ip({-2, 0, 1});
  std::vector<Real> qc = {Real(0), Real(1) / Real(2)};
  RealPolynomial q(qc);

  AdjustmentResult a = adjust_to_integer(q, p);
  CHECK(dd(a.beta_l1) <= 0.5 + 1e-30);
  CHECK(dd(a.beta_l1) >= 0.5 - 1e-30);
  REQUIRE(a.betas.size() == 2);
  for (const auto& b : a.betas) {
    CHECK(dd(abs(b.re - Real(1) / Real(4))) < 1e-40);
    CHECK(dd(abs(b.im)) < 1e-40);
  }
  CHECK(dd(a.residual) < 1e-40);
}

TEST_CASE("adjustment rejects bad moduli") {
  IntPolynomial dbl = ip({1, -2, 1});  // (x-1)^2
  std::vector<Real> qc = {Real(0), Real(1) / Real(2)};
  CHECK_THROWS_AS(adjust_to_integer(RealPolynomial(qc), dbl), NotSquarefreeError);

  IntPolynomial p = ip({-2, 0, 1});
  std::vector<Real> big = {Real(0), Real(0), Real(1) / Real(2)};
  CHECK_THROWS_AS(adjust_to_integer(RealPolynomial(big), p), DegreeError);

  CHECK_THROWS_AS(adjust_to_integer(RealPolynomial(qc), ip({3})), UsageError);
}

TEST_CASE("randomized adjustment keeps the Lagrange identity") {
  std::mt19937_64 rng(20260818ULL);
  std::uniform_int_distribution<int> degd(4, 10);
  std::uniform_real_distribution<double> coefd(-3.0, 3.0);

  for (int trial = 0; trial < 25; ++trial) {
    int n = degd(rng);
    IntPolynomial p = random_squarefree(rng, n);
    std::vector<Real> qc(n);
    for (auto& c : qc) c = Real(coefd(rng));
    RealPolynomial q(qc);

    AdjustmentResult a = adjust_to_integer(q, p);
    CHECK((a.R.is_zero() || a.R.degree() <= n - 1));
    REQUIRE(static_cast<int>(a.betas.size()) == n);

    // Residual bound from the spec: below 2^{-precision/2} up to coefficient
    // scale. Working precision is 192 bits here.
    double scale = 1.0;
    for (const auto& c : qc) scale = std::max(scale, std::abs(c.to_double()));
    CHECK(dd(a.residual) <= 1.3e-29 * scale);

    // beta_j must match (Q - R)(alpha_j) / P'(alpha_j) at independently
    // recomputed roots; all_roots ordering is deterministic.
    auto roots = all_roots(p, 256);
    RealPolynomial qr = q - RealPolynomial::from_int(a.R, 256);
    RealPolynomial pd = RealPolynomial::from_int(p.derivative(), 256);
    Real l1(0);
    for (size_t j = 0; j < roots.size(); ++j) {
      Complex lhs = qr.is_zero() ? Complex(Real(0)) : qr.evaluate(roots[j]);
      Complex rhs = a.betas[j] * pd.evaluate(roots[j]);
      CHECK(dd((lhs - rhs).abs()) < 1e-25 * scale);
      l1 += a.betas[j].abs();
    }
    CHECK(dd(abs(l1 - a.beta_l1)) < 1e-40);

    // Heuristic nearest-plane quality bound.
    CHECK(dd(a.beta_l1) <= 5.0 * n * std::log(2.0 * n));
  }
}

TEST_CASE("norm basis at degree zero and the two point bound") {
  IntervalUnion s04 = seg("0", "4");
  MixtureMeasure mu = MixtureMeasure::equilibrium(Real(0), Real(4));

  NormBasis nb0 = small_norm_basis(mu, s04, 0);
  REQUIRE(nb0.polynomials.size() == 1);
  CHECK(nb0.polynomials[0].degree() == 0);
  CHECK(dd(abs(nb0.norms[0] - Real(1))) < 1e-30);
  CHECK(dd(abs(nb0.product_log)) < 1e-30);

  // n=1 on [0,4]: quantile points 2 and 4, unit weights, so the Minkowski
  // product bound reads prod >= |2-4| / 2! = 1.
  NormBasis nb1 = small_norm_basis(mu, s04, 1);
  REQUIRE(nb1.polynomials.size() == 2);
  Real a0 = quantile(mu, Real(1) / Real(2));
  Real a1 = quantile(mu, Real(1));
  Real d = abs(a0 - a1) * exp(potential(mu, a0).value) * exp(potential(mu, a1).value);
  CHECK(dd(nb1.product_log) >= dd(log(d / Real(2))) - 1e-20);
}

TEST_CASE("norm basis is unimodular in the monomial coordinates") {
  MixtureMeasure mu = MixtureMeasure::equilibrium(Real(0), Real::parse("4.2"));
  NormBasis nb = small_norm_basis(mu, seg("0", "4.2"), 6);
  REQUIRE(nb.polynomials.size() == 7);
  std::vector<std::vector<mpz_class>> m(7, std::vector<mpz_class>(7, 0));
  for (size_t i = 0; i < 7; ++i) {
    const auto& p = nb.polynomials[i];
    REQUIRE(!p.is_zero());
    REQUIRE(p.degree() <= 6);
    for (int j = 0; j <= p.degree(); ++j) m[i][j] = p.coeff(j);
  }
  mpz_class det = bareiss_det(m);
  CHECK((det == 1 || det == -1));
}

TEST_CASE("norm basis products obey the energy squeeze") {
  // Lower bound holds for every linearly independent family (Minkowski);
  // upper bound is the recorded regression constant C = 10.
  auto check_bounds = [&](const MixtureMeasure& mu, const IntervalUnion& sig, int n,
                          const Real& imu) {
    NormBasis nb = small_norm_basis(mu, sig, n);
    Real logfact(0);
    for (int i = 2; i <= n + 1; ++i) logfact += log(Real(i));
    Real lower = -logfact + (Real(n) * Real(n) / Real(2) + Real(n) / Real(2)) * imu;
    Real upper = Real(10) * Real(n) * log(Real(n)) + Real(n) * Real(n) / Real(2) * imu;
    CHECK(dd(nb.product_log) >= dd(lower) - 1e-12);
    CHECK(dd(nb.product_log) <= dd(upper) + 1e-12);
    for (const auto& nm : nb.norms) CHECK(dd(nm) > 0.0);
  };

  MixtureMeasure m04 = MixtureMeasure::equilibrium(Real(0), Real(4));
  check_bounds(m04, seg("0", "4"), 4, Real(0));
  check_bounds(m04, seg("0", "4"), 10, Real(0));

  MixtureMeasure m042 = MixtureMeasure::equilibrium(Real(0), Real::parse("4.2"));
  Real i042 = -log(Real(21) / Real(20));
  CHECK(dd(abs(energy(m042) - i042)) < 1e-25);
  check_bounds(m042, seg("0", "4.2"), 10, i042);
}

TEST_CASE("norm basis rejects bad inputs") {
  MixtureMeasure mu = MixtureMeasure::equilibrium(Real(0), Real(4));
  CHECK_THROWS_AS(small_norm_basis(mu, seg("0", "4"), -1), ParameterError);

  MixtureMeasure atom = MixtureMeasure::atom(Real(1));
  CHECK_THROWS_AS(small_norm_basis(atom, seg("0", "4"), 2), UsageError);
}

TEST_CASE("combining one squarefree input is the identity") {
  IntPolynomial q1 = ip({1, 0, 1});  // x^2 + 1
  CombineResult c = combine_squarefree({q1});
  CHECK(c.bs.empty());
  CHECK(c.q.degree() == 2);
  CHECK((c.q - q1).is_zero());
  CHECK(c.r.degree() == 0);
}

TEST_CASE("combining shifts away a shared factor") {
  IntPolynomial q1 = ip({0, 0, 1});  // x^2
  IntPolynomial q2 = ip({0, 1, 1});  // x^2 + x
  CombineResult c = combine_squarefree({q1, q2});
  REQUIRE(c.bs.size() == 1);
  CHECK(c.bs[0] == 1);
  CHECK((c.q - ip({0, 1})).is_zero());
  CHECK((c.r - ip({1, 2})).is_zero());

  IntPolynomial lhs = q1 + mpz_class(c.bs[0]) * q2;
  CHECK((lhs - c.q * c.r).is_zero());

  CHECK_THROWS_AS(combine_squarefree({}), UsageError);
  CHECK_THROWS_AS(combine_squarefree({IntPolynomial()}), UsageError);
}

TEST_CASE("random combinations stay in the advertised box") {
  std::mt19937_64 rng(977ULL);
  std::uniform_int_distribution<int> degd(1, 4);
  std::uniform_int_distribution<int> kd(2, 3);

  for (int trial = 0; trial < 10; ++trial) {
    int k = kd(rng);
    std::vector<IntPolynomial> qs;
    for (int i = 0; i < k; ++i) qs.push_back(random_squarefree(rng, degd(rng)));
    int n = 0;
    for (const auto& q : qs) n = std::max(n, q.degree());

    CombineResult c = combine_squarefree(qs);
    REQUIRE(static_cast<int>(c.bs.size()) == k - 1);
    IntPolynomial f = qs[0];
    for (int i = 1; i < k; ++i) {
      CHECK(c.bs[i - 1] >= 0);
      CHECK(c.bs[i - 1] <= static_cast<long>(n) * (k + 2));
      f = f + mpz_class(c.bs[i - 1]) * qs[i];
    }
    CHECK((f - c.q * c.r).is_zero());
    CHECK(f.degree() == n);
    CHECK(is_squarefree(c.r));
    for (const auto& q : qs) CHECK(gcd(c.r, q).degree() == 0);
  }
}

TEST_CASE("squarefree construction hits the requested degree") {
  MixtureMeasure mu = MixtureMeasure::equilibrium(Real::parse("-2.6"), Real::parse("2.6"));
  IntervalUnion sig = seg("-2.6", "2.6");

  for (int n : {4, 9, 16}) {
    IntPolynomial q = squarefree_small_norm(mu, sig, n);
    CHECK(q.degree() == n);
    CHECK(is_squarefree(q));
    // Recorded regression: log-norm growth stays within c*sqrt(n)*log(n)
    // for c = 10 on this capacity-1.3 interval.
    Real nm = n_norm(q, n, mu, sig);
    CHECK(dd(log(nm)) <= 10.0 * std::sqrt(static_cast<double>(n)) *
                             std::log(static_cast<double>(n)));
  }

  CHECK_THROWS_AS(squarefree_small_norm(mu, sig, 1), ParameterError);
}
