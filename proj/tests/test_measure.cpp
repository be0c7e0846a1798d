#include "potpoly/measure.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "potpoly/quadrature.hpp"

using namespace potpoly;

namespace {

double dd(const Real& r) { return r.to_double(); }

// Quadrature oracle for the potential of nu_[a,b] at a point off the
// support, using the density sqrt(ab) / (pi t sqrt((t-a)(b-t))) via the
// angle substitution t = c + r cos(theta).
Real nu_potential_quadrature(const Real& a, const Real& b, const Complex& z) {
  Real c = (a + b) / Real(2), r = (b - a) / Real(2);
  Real sab = sqrt(a * b);
  auto g = [&](const Real& th) {
    Real t = c + r * cos(th);
    return -sab / t * log_abs(z - Complex(t));
  };
  return chebyshev_angle_integral(g, 640);
}

IntPolynomial poly(std::initializer_list<const char*> coeffs) {
  std::vector<std::string> v;
  for (auto* s : coeffs) v.emplace_back(s);
  return IntPolynomial::from_strings(v);
}

}  // namespace

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(MixtureMeasure::nu(Real(0), Real(1)), UsageError);
  CHECK_THROWS_AS(MixtureMeasure::nu(Real(2), Real(1)), UsageError);
  CHECK_THROWS_AS(MixtureMeasure::equilibrium(Real(1), Real(1)), UsageError);
  CHECK_THROWS_AS(MixtureMeasure::grid({Real(0), Real(-1)}, {Real(1)}), UsageError);
  CHECK_THROWS_AS(MixtureMeasure::grid({Real(0), Real(1)}, {Real(1), Real(1)}), UsageError);
  MixtureMeasure m = MixtureMeasure::atom(Real(3), Real(2));
  CHECK(dd(m.mass()) == doctest::Approx(2.0));
  CHECK(!m.is_probability());
  CHECK(MixtureMeasure::equilibrium(Real(0), Real(1)).is_probability());
}

TEST_CASE("atom potential and superposition") {
  MixtureMeasure d3 = MixtureMeasure::atom(Real(3));
  PotentialValue u = potential(d3, Real(5));
  CHECK(dd(abs(u.value + log(Real(2)))) < 1e-40);
  CHECK(potential(d3, Real(3)).infinite);

  MixtureMeasure mix = Real(0.5) * d3 + Real(0.5) * MixtureMeasure::atom(Real(-1));
  PotentialValue um = potential(mix, Real(1));
  // -(log 2)/2 - (log 2)/2 = -log 2.
  CHECK(dd(abs(um.value + log(Real(2)))) < 1e-40);
  CHECK(dd(mix.mass()) == doctest::Approx(1.0));
}

TEST_CASE("equilibrium component potential closed forms") {
  // U for [0,4] is identically 0 on the set (capacity 1).
  MixtureMeasure eq04 = MixtureMeasure::equilibrium(Real(0), Real(4));
  for (double x : {0.0, 0.5, 2.0, 3.7, 4.0})
    CHECK(dd(abs(potential(eq04, Real(x)).value)) < 1e-40);
  // U^{eq[1,4]}(0) = -2 log(3/2).
  MixtureMeasure eq14 = MixtureMeasure::equilibrium(Real(1), Real(4));
  Real want = Real(-2) * log(Real(3) / Real(2));
  CHECK(dd(abs(potential(eq14, Real(0)).value - want)) < 1e-40);
}

TEST_CASE("nu potential closed form vs quadrature and hand values") {
  MixtureMeasure nu14 = MixtureMeasure::nu(Real(1), Real(4));
  // At 0: 2 log((1 + 1/2)/2) = log(9/16).
  Real at0 = potential(nu14, Real(0)).value;
  CHECK(dd(abs(at0 - log(Real(9) / Real(16)))) < 1e-40);
  // On the support at z = 2: log(3/2).
  Real at2 = potential(nu14, Real(2)).value;
  CHECK(dd(abs(at2 - log(Real(3) / Real(2)))) < 1e-35);
  // Off support: agree with direct density quadrature.
  for (double x : {-3.0, 0.25, 7.5}) {
    Real cf = potential(nu14, Real(x)).value;
    Real q = nu_potential_quadrature(Real(1), Real(4), Complex(Real(x)));
    CHECK(dd(abs(cf - q)) < 1e-30);
  }
  Complex zc(Real(2), Real(3));
  Real cf = potential(nu14, zc).value;
  Real q = nu_potential_quadrature(Real(1), Real(4), zc);
  CHECK(dd(abs(cf - q)) < 1e-30);
  // Mass 1: potential at huge R behaves like -log R.
  Real far = potential(nu14, Real(1e18)).value;
  CHECK(dd(abs(far + log(Real(1e18)))) < 1e-15);
}

TEST_CASE("transported nu potential") {
  // Reflected copy about 10: support [6, 9], same potential as base at the
  // mirrored point.
  MeasureComponent c;
  c.kind = MeasureComponent::Kind::Nu;
  c.a = Real(1);
  c.b = Real(4);
  c.shift = Real(10);
  c.reflect = true;
  MixtureMeasure refl;
  refl.add(c);
  MixtureMeasure base = MixtureMeasure::nu(Real(1), Real(4));
  CHECK(dd(refl.support_min()) == doctest::Approx(6.0));
  CHECK(dd(refl.support_max()) == doctest::Approx(9.0));
  for (double x : {5.0, 7.0, 12.0}) {
    Real a = potential(refl, Real(x)).value;
    Real b = potential(base, Real(10 - x)).value;
    CHECK(dd(abs(a - b)) < 1e-45);
  }
}

TEST_CASE("grid potential closed forms") {
  MixtureMeasure uni = MixtureMeasure::grid({Real(0), Real(1)}, {Real(1)});
  // -int_0^1 log|1/2 - t| dt = 1 + log 2.
  Real mid = potential(uni, Real(0.5)).value;
  CHECK(dd(abs(mid - (Real(1) + log(Real(2))))) < 1e-40);
  // At i: 1 - (log 2)/2 - pi/4.
  Real ati = potential(uni, Complex(Real(0), Real(1))).value;
  Real want = Real(1) - log(Real(2)) / Real(2) - const_pi() / Real(4);
  CHECK(dd(abs(ati - want)) < 1e-40);
  // Refining the cell structure of the same density changes nothing.
  MixtureMeasure uni4 = MixtureMeasure::grid(
      {Real(0), Real(0.25), Real(0.5), Real(0.75), Real(1)},
      {Real(1), Real(1), Real(1), Real(1)});
  for (double x : {-2.0, 0.3, 0.5, 5.0})
    CHECK(dd(abs(potential(uni, Real(x)).value - potential(uni4, Real(x)).value)) < 1e-40);
}

TEST_CASE("energy closed forms") {
  CHECK(dd(abs(energy(MixtureMeasure::equilibrium(Real(0), Real(4))))) < 1e-40);
  Real e12 = energy(MixtureMeasure::equilibrium(Real(1), Real(2)));
  CHECK(dd(abs(e12 - log(Real(4)))) < 1e-40);
  // I(nu_[1,4]) = log(9/16) + log 3 = log(27/16).
  Real en = energy(MixtureMeasure::nu(Real(1), Real(4)));
  CHECK(dd(abs(en - log(Real(27) / Real(16)))) < 1e-35);
  // Same value through the measure integral of the potential.
  MixtureMeasure nu14 = MixtureMeasure::nu(Real(1), Real(4));
  Real sab = Real(2);
  auto f = [&](const Real& th) {
    Real t = Real(2.5) + Real(1.5) * cos(th);
    return sab / t * potential(nu14, Real(t)).value;
  };
  Real by_integral = chebyshev_angle_integral(f, 640);
  CHECK(dd(abs(en - by_integral)) < 1e-30);
  // Uniform density on [0,1]: I = 3/2, independent of cell structure.
  Real eu = energy(MixtureMeasure::grid({Real(0), Real(1)}, {Real(1)}));
  CHECK(dd(abs(eu - Real(1.5))) < 1e-40);
  Real eu3 = energy(MixtureMeasure::grid({Real(0), Real(0.125), Real(0.75), Real(1)},
                                         {Real(0.125), Real(0.625), Real(0.25)}));
  CHECK(dd(abs(eu3 - Real(1.5))) < 1e-40);
  // Atoms have infinite energy.
  CHECK(energy(MixtureMeasure::atom(Real(0))).is_inf());
}

TEST_CASE("mutual energy routes agree") {
  MixtureMeasure eq01 = MixtureMeasure::equilibrium(Real(0), Real(1));
  MixtureMeasure eq34 = MixtureMeasure::equilibrium(Real(3), Real(4));
  auto f = [&](const Real& t) { return potential(eq01, t).value; };
  Real oracle = arcsine_integral(f, Real(3), Real(4), 512);
  Real got = mutual_energy(eq01, eq34);
  CHECK(dd(abs(got - oracle)) < 1e-28);
  CHECK(dd(abs(mutual_energy(eq34, eq01) - got)) < 1e-28);
  // Nested supports: U^{eq[0,4]} = 0 on [1,4], so the cross term vanishes.
  MixtureMeasure eq04 = MixtureMeasure::equilibrium(Real(0), Real(4));
  MixtureMeasure nu14 = MixtureMeasure::nu(Real(1), Real(4));
  CHECK(dd(abs(mutual_energy(eq04, nu14))) < 1e-28);
  // Mixture energy decomposes accordingly.
  MixtureMeasure mix = Real(0.5) * eq04 + Real(0.5) * nu14;
  Real want = Real(0.25) * energy(nu14);
  CHECK(dd(abs(energy(mix) - want)) < 1e-28);
  // Atom against continuous equals the potential there.
  Real ae = mutual_energy(MixtureMeasure::atom(Real(7)), eq01);
  CHECK(dd(abs(ae - potential(eq01, Real(7)).value)) < 1e-40);
  // Coincident atoms blow up.
  CHECK(mutual_energy(MixtureMeasure::atom(Real(1)), MixtureMeasure::atom(Real(1))).is_inf());
  // Grid x grid closed form vs simple double oracle.
  MixtureMeasure u01 = MixtureMeasure::grid({Real(0), Real(1)}, {Real(1)});
  MixtureMeasure u23 = MixtureMeasure::grid({Real(2), Real(3)}, {Real(1)});
  auto fg = [&](const Real& t) { return potential(u01, t).value; };
  Real grid_oracle(0);
  int n = 4000;
  for (int i = 0; i < n; ++i)
    grid_oracle += fg(Real(2) + (Real(i) + Real(0.5)) / Real(n));
  grid_oracle /= Real(n);
  CHECK(dd(abs(mutual_energy(u01, u23) - grid_oracle)) < 1e-7);
  // Grid against continuous.
  Real gc = mutual_energy(u01, eq34);
  auto fu = [&](const Real& t) { return potential(u01, t).value; };
  Real gc_oracle = arcsine_integral(fu, Real(3), Real(4), 512);
  CHECK(dd(abs(gc - gc_oracle)) < 1e-25);
}

TEST_CASE("cdf closed forms and quantiles") {
  MixtureMeasure eq04 = MixtureMeasure::equilibrium(Real(0), Real(4));
  CHECK(dd(cdf(eq04, Real(-1))) == 0.0);
  CHECK(dd(cdf(eq04, Real(5))) == 1.0);
  CHECK(dd(abs(cdf(eq04, Real(2)) - Real(0.5))) < 1e-40);
  Real t14 = Real(2) - sqrt(Real(2));
  CHECK(dd(abs(cdf(eq04, t14) - Real(0.25))) < 1e-40);
  CHECK(dd(abs(quantile(eq04, Real(0.25)) - t14)) < 1e-30);
  CHECK(dd(abs(quantile(eq04, Real(0)) - Real(0))) == 0.0);
  CHECK(dd(abs(quantile(eq04, Real(1)) - Real(4))) < 1e-30);

  // Median of nu_[a,b] is the harmonic mean 2ab/(a+b).
  MixtureMeasure nu14 = MixtureMeasure::nu(Real(1), Real(4));
  CHECK(dd(abs(quantile(nu14, Real(0.5)) - Real(8) / Real(5))) < 1e-30);
  CHECK(dd(cdf(nu14, Real(1))) == 0.0);
  CHECK(dd(cdf(nu14, Real(4))) == 1.0);

  // Atom mixture: right continuity at the atom.
  MixtureMeasure mix = Real(0.5) * MixtureMeasure::atom(Real(1)) + Real(0.5) * eq04;
  // F(1) = 1/2 + F_eq(1)/2 = 1/2 + 1/6 = 2/3.
  CHECK(dd(abs(cdf(mix, Real(1)) - Real(2) / Real(3))) < 1e-35);
  CHECK(dd(abs(quantile(mix, Real(0.5)) - Real(1))) < 1e-30);

  CHECK_THROWS_AS(quantile(eq04, Real(-0.1)), ParameterError);
  CHECK_THROWS_AS(quantile(eq04, Real(1.1)), ParameterError);
  CHECK_THROWS_AS(quantile(Real(2) * eq04, Real(0.5)), UsageError);
  CHECK_THROWS_AS(cdf(MixtureMeasure::atom_at(Complex(Real(0), Real(1))), Real(0)),
                  UsageError);
}

TEST_CASE("cdf quantile round trip on a mixed measure") {
  MixtureMeasure m = Real(0.4) * MixtureMeasure::equilibrium(Real(0), Real(1)) +
                     Real(0.3) * MixtureMeasure::nu(Real(2), Real(3)) +
                     Real(0.3) * MixtureMeasure::grid({Real(5), Real(6)}, {Real(1)});
  for (double p : {0.05, 0.2, 0.4, 0.55, 0.7, 0.9, 0.99}) {
    Real q = quantile(m, Real(p));
    CHECK(dd(abs(cdf(m, q) - Real(p))) < 1e-25);
  }
  // Monotone.
  CHECK(dd(cdf(m, Real(0.9))) <= dd(cdf(m, Real(2.5))));
  CHECK(dd(cdf(m, Real(2.5))) <= dd(cdf(m, Real(5.5))));
}

TEST_CASE("counting measure") {
  IntPolynomial p = poly({"1", "-3", "1"});  // x^2 - 3x + 1
  MixtureMeasure mu = counting_measure(p);
  CHECK(mu.components().size() == 2);
  CHECK(dd(mu.mass()) == doctest::Approx(1.0));
  CHECK(mu.source_poly.has_value());
  // Roots multiply to 1, so U(0) = 0.
  CHECK(dd(abs(potential(mu, Real(0)).value)) < 1e-35);
  CHECK_THROWS_AS(counting_measure(IntPolynomial::constant(mpz_class(5))), UsageError);
  // Complex roots are carried as complex atoms.
  MixtureMeasure mc = counting_measure(poly({"1", "0", "1"}));
  CHECK(mc.has_complex_atoms());
  CHECK_THROWS_AS(cdf(mc, Real(0)), UsageError);
}

TEST_CASE("log integral hand oracle") {
  // P = x^2 - 2, Q = x^2 - 3x + 1: Q(sqrt2) Q(-sqrt2) = -9, so the mean of
  // log|Q| over the roots of P is (log 9)/2 = log 3.
  IntPolynomial p = poly({"-2", "0", "1"});
  IntPolynomial q = poly({"1", "-3", "1"});
  MixtureMeasure mu = counting_measure(p);
  PotentialValue numeric = log_integral(q, mu);
  CHECK(!numeric.infinite);
  CHECK(dd(abs(numeric.value - log(Real(3)))) < 1e-30);
  auto symbolic = log_integral_symbolic(q, mu);
  REQUIRE(symbolic.has_value());
  CHECK(dd(abs(*symbolic - log(Real(3)))) < 1e-40);
  // Shared root: both routes report negative infinity.
  PotentialValue self = log_integral(p, mu);
  CHECK(self.infinite);
  CHECK(self.infinity_sign == -1);
  auto ssym = log_integral_symbolic(p, mu);
  REQUIRE(ssym.has_value());
  CHECK(ssym->is_inf());
  CHECK(ssym->sign() < 0);
  // No provenance, no symbolic route.
  CHECK(!log_integral_symbolic(q, MixtureMeasure::equilibrium(Real(0), Real(1)))
             .has_value());
}

TEST_CASE("log integral numeric matches exact resultant route randomized") {
  std::mt19937_64 rng(20260818u);
  std::uniform_int_distribution<int> coeff(-9, 9), deg(1, 5);
  int done = 0;
  while (done < 30) {
    std::vector<std::string> pc, qc;
    int dp = deg(rng), dq = deg(rng);
    for (int i = 0; i <= dp; ++i) pc.push_back(std::to_string(coeff(rng)));
    for (int i = 0; i <= dq; ++i) qc.push_back(std::to_string(coeff(rng)));
    IntPolynomial p = IntPolynomial::from_strings(pc);
    IntPolynomial q = IntPolynomial::from_strings(qc);
    if (p.is_zero() || q.is_zero() || p.degree() < 1 || q.degree() < 1) continue;
    if (resultant(p, q) == 0) continue;
    MixtureMeasure mu = counting_measure(p);
    PotentialValue numeric = log_integral(q, mu);
    auto symbolic = log_integral_symbolic(q, mu);
    REQUIRE(symbolic.has_value());
    REQUIRE(!numeric.infinite);
    CHECK(dd(abs(numeric.value - *symbolic)) < 1e-25 * (1 + dd(abs(*symbolic))));
    ++done;
  }
}

TEST_CASE("log integral against continuous measures") {
  // int log|x| dmu_[0,4] equals -U^{mu}(0) = 2 log(3/2) - ... for [1,4];
  // use [0,4]: U = 0 at 0, so the integral is 0; lc term for 2x: log 2.
  MixtureMeasure eq04 = MixtureMeasure::equilibrium(Real(0), Real(4));
  IntPolynomial two_x = poly({"0", "2"});
  PotentialValue v = log_integral(two_x, eq04);
  CHECK(dd(abs(v.value - log(Real(2)))) < 1e-35);
  // Constant polynomial: mass times log of the constant.
  PotentialValue c = log_integral(IntPolynomial::constant(mpz_class(7)), eq04);
  CHECK(dd(abs(c.value - log(Real(7)))) < 1e-40);
  CHECK_THROWS_AS(log_integral(IntPolynomial(), eq04), UsageError);
}

TEST_CASE("smoothing") {
  CHECK_THROWS_AS(smooth(MixtureMeasure::atom(Real(0)), Real(0.6), true), ParameterError);
  CHECK_THROWS_AS(smooth(MixtureMeasure::atom(Real(0)), Real(0), true), ParameterError);
  // Right smoothing of a point mass is one nu component just right of it.
  MixtureMeasure r = smooth(MixtureMeasure::atom(Real(2)), Real(0.125), true);
  CHECK(r.components().size() == 1);
  CHECK(r.atomless());
  CHECK(dd(r.mass()) == doctest::Approx(1.0));
  CHECK(dd(abs(r.support_min() - Real(2.015625))) < 1e-45);
  CHECK(dd(abs(r.support_max() - Real(2.125))) < 1e-45);
  // Left smoothing mirrors the support.
  MixtureMeasure l = smooth(MixtureMeasure::atom(Real(0)), Real(0.25), false);
  CHECK(dd(abs(l.support_min() + Real(0.25))) < 1e-45);
  CHECK(dd(abs(l.support_max() + Real(0.0625))) < 1e-45);
  // Smoothing a continuous measure keeps mass and roughly its shape.
  MixtureMeasure eq01 = MixtureMeasure::equilibrium(Real(0), Real(1));
  MixtureMeasure s = smooth(eq01, Real(0.05), true, 96);
  CHECK(dd(s.mass()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dd(s.support_min()) >= 0.0);
  CHECK(dd(s.support_max()) <= 1.0 + 0.05 + 1e-12);
  CHECK(dd(cdf_distance(s, eq01)) < 0.08);
}

TEST_CASE("cdf distance") {
  MixtureMeasure eq04 = MixtureMeasure::equilibrium(Real(0), Real(4));
  CHECK(dd(cdf_distance(eq04, eq04)) == 0.0);
  CHECK(dd(abs(cdf_distance(MixtureMeasure::atom(Real(0)), MixtureMeasure::atom(Real(1))) -
               Real(1))) < 1e-45);
  // Root-counting measure of x^2 - 3x + 1 against the arcsine law on [0,4]:
  // the sup gap is 0.4, attained at the upper root.
  MixtureMeasure mu = counting_measure(poly({"1", "-3", "1"}));
  Real d = cdf_distance(mu, eq04);
  CHECK(dd(abs(d - Real(0.4))) < 1e-9);
  CHECK_THROWS_AS(cdf_distance(Real(2) * eq04, eq04), UsageError);
}

TEST_CASE("holder estimate") {
  auto h = holder_estimate(MixtureMeasure::equilibrium(Real(0), Real(1)));
  CHECK(h.closed_form);
  CHECK(dd(h.eta) == 0.5);
  CHECK(dd(h.A) > 0.5);
  CHECK(dd(h.A) < 0.9);
  auto hg = holder_estimate(MixtureMeasure::grid({Real(0), Real(1)}, {Real(1)}));
  CHECK(dd(hg.eta) == 1.0);
  CHECK(dd(hg.A) == doctest::Approx(1.0).epsilon(1e-6));
  auto ha = holder_estimate(MixtureMeasure::atom(Real(0)));
  CHECK(!ha.closed_form);
  CHECK(ha.A.is_inf());
}

TEST_CASE("equilibrium measure single interval is exact") {
  IntervalUnion sigma = IntervalUnion::single(Decimal::parse("0"), Decimal::parse("4"));
  MixtureMeasure mu = equilibrium_measure(sigma, 16);
  REQUIRE(mu.components().size() == 1);
  CHECK(mu.components()[0].kind == MeasureComponent::Kind::Equilibrium);
  CHECK(dd(abs(potential(mu, Real(1)).value)) < 1e-40);
}

TEST_CASE("equilibrium measure union approximates constant potential") {
  IntervalUnion sigma(std::vector<Interval>{{Decimal::parse("0"), Decimal::parse("1")},
                                            {Decimal::parse("3"), Decimal::parse("4")}});
  MixtureMeasure mu = equilibrium_measure(sigma, 400);
  CHECK(dd(mu.mass()) == doctest::Approx(1.0).epsilon(1e-12));
  Real level = robin_constant(sigma);
  for (double x : {0.2, 0.5, 0.85, 3.15, 3.5, 3.8}) {
    Real u = potential(mu, Real(x)).value;
    CHECK(dd(abs(u - level)) < 5e-3);
  }
  // Symmetric union: median sits in the gap, cdf at the gap midpoint is 1/2.
  CHECK(dd(abs(cdf(mu, Real(2)) - Real(0.5))) < 1e-6);
  CHECK_THROWS_AS(equilibrium_measure(sigma, 3), InsufficientNodesError);
}

TEST_CASE("sweetening against a capacity 1.3 set") {
  IntervalUnion sigma = IntervalUnion::single(Decimal::parse("-2.6"), Decimal::parse("2.6"));
  MixtureMeasure nu = MixtureMeasure::equilibrium(Real(-1), Real(1));
  MixtureMeasure ref = equilibrium_measure(sigma, 64);
  SweetenResult sw = sweeten(nu, ref, sigma, 256);
  // B = log 2.6, beta = log 2.6 / log 3.38, computed from the constant
  // potentials of the two arcsine laws.
  Real B_want = log(Real::parse("2.6"));
  Real beta_want = B_want / (log(Real::parse("1.3")) + B_want);
  CHECK(dd(abs(sw.B - B_want)) < 1e-9);
  CHECK(dd(abs(sw.beta - beta_want)) < 1e-9);
  CHECK(dd(abs(sw.amount - beta_want)) < 1e-9);
  CHECK(dd(sw.measure.mass()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dd(sw.worst_margin) <= 1e-9);

  // Capacity at most 1 leaves the construction undefined.
  IntervalUnion unit = IntervalUnion::single(Decimal::parse("-2"), Decimal::parse("2"));
  CHECK_THROWS_AS(sweeten(nu, ref, unit, 64), SweetenerUndefinedError);
  // Atoms make the dominating potential unbounded.
  CHECK_THROWS_AS(sweeten(MixtureMeasure::atom(Real(0)), ref, sigma, 64), UnboundedError);
}
