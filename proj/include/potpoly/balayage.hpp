#pragma once

#include <utility>
#include <vector>

#include "potpoly/measure.hpp"
#include "potpoly/smyth.hpp"

namespace potpoly {

/// Two-parameter optimal measure mu = c * equilibrium[a,b] + (1-c) * nu[a,b]:
/// a, b, c solve U^mu(0) = 0, U^mu(a) = -(1-c) log a, and the mean is
/// stationary over the remaining degree of freedom.
struct SerreMeasure {
  Real a{0};
  Real b{0};
  Real c{0};     // mixing weight in (0,1)
  Real mean{0};  // int x dmu

  MixtureMeasure measure() const;
};

/// Verdict of the sufficient-condition check: a probability measure mu with
/// U^mu(z) <= sum_i -a_i log|Q_i(z)| everywhere, sum a_i deg Q_i <= 1, and
/// nonnegative log-integrals qualifies for the main guarantee on sigma.
struct NeedBalReport {
  std::vector<std::pair<IntPolynomial, Real>> pool;
  bool degree_sum_ok = false;
  bool potential_dominated = false;
  Real worst_margin{0};  // max over checked z of U^mu(z) + sum a_i log|Q_i(z)|
  Complex worst_point;
  std::vector<Real> log_integrals;
  bool pass = false;
};

/// Probability-bound report for abelian varieties over F_q: lambda in both
/// objective directions with matched dual runs and their duality gaps.
struct HondaReport {
  Real q{0};
  SmythCertificate lower_cert;  // lambda(Sigma, F), F = log|q+1-x|
  SmythCertificate upper_cert;  // lambda(Sigma, -F)
  DualSolution lower_dual;      // min int F dmu over feasible mu
  DualSolution upper_dual;      // min int -F dmu
  Real lower_exponent{0};       // #A(F_q)^(1/dim) >= exp of this, asymptotically
  Real upper_exponent{0};       // ... <= exp of this
  Real gap_lower{0};            // dual minus primal, >= 0 by weak duality
  Real gap_upper{0};
  Real serre_constant{0};       // q + 2 sqrt(q) - 0.8984, for comparison
};

/// Balayage of the unit Dirac mass at 0 onto [a, b], 0 < a < b:
/// dnu(t) = sqrt(ab) dt / (pi t sqrt((b-t)(t-a))).
MixtureMeasure nu_measure(const Real& a, const Real& b);

/// Balayage of delta_y onto [a, b] for y outside (a, b).  y = 0 with a > 0
/// returns nu_measure exactly; boundary y returns the atom; other poles get
/// a clustered-grid measure with closed-form cell masses whose potential is
/// verified against -log|z-y| + g(y) on the interval before returning.
MixtureMeasure balayage_point(const Real& y, const Interval& interval, int cells = 2048);

/// Solves the three-constraint system for SerreMeasure by nested bracketing:
/// for each a, the interior equation picks b (with c eliminated through the
/// two potential identities), and the mean is minimized over a.
SerreMeasure serre_solve(double tol);

/// Grid-plus-tail verification of the domination inequality together with
/// the degree-sum and log-integral conditions.  Requires capacity(sigma) > 1.
NeedBalReport need_bal_check(const MixtureMeasure& mu, const IntervalUnion& sigma,
                             const std::vector<std::pair<IntPolynomial, Real>>& pool,
                             double tol = 1e-7);

/// Point-count exponent bounds for abelian varieties over F_q (q a prime
/// power >= 2): runs primal and dual for F = log|q+1-x| and -F on
/// [-2 sqrt(q), 2 sqrt(q)] with the given auxiliary pool.
HondaReport honda_bounds(const Real& q, const std::vector<IntPolynomial>& pool = {},
                         const SmythOptions& opt = {});

}  // namespace potpoly
