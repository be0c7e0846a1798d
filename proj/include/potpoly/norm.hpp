#pragma once

#include "potpoly/interval.hpp"
#include "potpoly/measure.hpp"
#include "potpoly/polynomial.hpp"

namespace potpoly {

/// max over sigma of e^{n U^mu(x)} |P(x)|.  n = 0 is the plain sup-norm.
/// Maximization runs per component on a Chebyshev-spaced grid scaled with
/// deg(P), refining every grid-local maximum by golden section.
Real n_norm(const RealPolynomial& p, long n, const MixtureMeasure& mu,
            const IntervalUnion& sigma);
Real n_norm(const IntPolynomial& p, long n, const MixtureMeasure& mu,
            const IntervalUnion& sigma);

/// prod_{i=1..n} (z - quantile(mu, i/n)); roots non-decreasing.
RealPolynomial approximating_polynomial(const MixtureMeasure& mu, int n);

/// Monic degree-n polynomial whose roots are a subset of P's roots inside
/// sigma, never using the least or greatest root within any component that
/// meets the root set.  Selection spreads evenly across components in
/// proportion to the surviving root counts.
RealPolynomial prune(const RealPolynomial& p, const IntervalUnion& sigma, int n);

/// Sorted real roots of a numerically real-rooted polynomial; throws
/// UsageError if any root strays from the axis.
std::vector<Real> real_roots_numeric(const RealPolynomial& p);

}  // namespace potpoly
