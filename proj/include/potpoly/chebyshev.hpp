#pragma once

#include <utility>
#include <vector>

#include "potpoly/interval.hpp"
#include "potpoly/measure.hpp"
#include "potpoly/polynomial.hpp"

namespace potpoly {

/// Minimax monic polynomial of an interval union with its equioscillation
/// data: |T(x_i)| = norm0 with alternating signs at r+1 points of sigma.
struct ChebyshevResult {
  RealPolynomial T;                      // monic, degree r
  std::vector<Real> alternation_points;  // ascending, all in sigma
  Real norm0;                            // sup of |T| over sigma
};

/// Remez exchange for the monic minimax polynomial of degree r on a compact
/// sigma.  References start at classical Chebyshev extrema distributed over
/// components in proportion to equilibrium mass; one reference point swaps
/// per round.  Throws IterationLimitError (with best-iterate diagnostics in
/// the message) if the exchange stalls.
ChebyshevResult chebyshev(const IntervalUnion& sigma, int r);

/// Parameters of the parity adjuster for degree n on sigma: the companion
/// degree m, the stepped-product multiplicity d0 dividing m, and the step
/// polynomial degree r = m / d0.  Chosen from measured Chebyshev norms so
/// the parity passes keep a verified sign margin; requires capacity > 1 and
/// kappa^(m/2) > n for some admissible m, else ParameterError.
struct AdjusterPlan {
  int m;
  int d0;
  int r;
};
AdjusterPlan plan_parameters(const IntervalUnion& sigma, int n);

/// Companion polynomial for P of degree n - m: Q monic of degree m, product
/// Q*P carries near-even coefficients in degrees [n-m, n-1], all roots of Q
/// lie inside sigma away from roots of P and from the boundary, and |Q| is
/// pinned to kappa^m within the reported window on a dense grid.
struct AdjusterResult {
  RealPolynomial Q;           // monic, degree m
  std::vector<Real> roots;    // ascending, all interior to sigma
  std::vector<Real> margins;  // per root: min distance to roots of P and boundary
  /// min |Q(x)| / (kappa^m * dist to nearest root), max |Q(x)| / kappa^m,
  /// both over a dense grid on sigma; an offset grid re-check allows slack 2.
  std::pair<Real, Real> norm_window;
  Real parity_defect;  // max distance of window product coefficients from even
  long shift;          // k of the separating vertical shift Q1 + k*a
};
AdjusterResult forge_adjuster(const RealPolynomial& p, const IntervalUnion& sigma,
                              int n, int m);

/// Certified output of the integer construction: P_n monic with exact even
/// coefficients below the top down to degree n-m, constant term 2 mod 4
/// (Eisenstein at 2), and one exact-sign isolating bracket per root, all
/// brackets interior to sigma.
struct ConstructionReport {
  IntPolynomial P_n;
  int degree = 0;
  RootSet roots;                          // n sign-certified brackets, ascending
  std::vector<Real> membership_margins;   // bracket distance to the component edge
  Real cdf_dist;                          // cdf_distance(root counting measure, mu)
  int eisenstein_prime = 2;
  Real trace_ratio;                       // (sum of roots) / degree
};

/// Build a monic integer polynomial of degree n, irreducible by Eisenstein
/// at 2, with all roots in sigma and root distribution tracking mu.  Pool
/// members are checked for nonnegative mean log before construction starts.
ConstructionReport construct(const MixtureMeasure& mu, const IntervalUnion& sigma, int n,
                             const std::vector<IntPolynomial>& pool = {});

}  // namespace potpoly
