#pragma once

#include <functional>

#include "potpoly/real.hpp"

namespace potpoly {

/// Numerical integration utilities.
///
/// tanh_sinh handles integrable endpoint singularities (log or algebraic)
/// at double-exponential convergence; it is the workhorse for potential and
/// energy integrals whose integrands blow up at interval ends.
/// gauss_chebyshev integrates f against the arcsine weight
/// 1/(pi*sqrt((b-t)(t-a))) exactly for smooth f: the substitution
/// t = c + r*cos(theta) absorbs the singular factor into the measure.

using RealFn = std::function<Real(const Real&)>;

struct QuadratureResult {
  Real value;
  Real error_estimate;  // difference between the two finest levels
  int levels_used = 0;
};

/// \int_a^b f(t) dt by tanh-sinh quadrature.  f may be singular at the
/// endpoints as long as the integral converges.  max_level doublings of the
/// node density (level k has about 2^k * 6 nodes).
QuadratureResult tanh_sinh(const RealFn& f, const Real& a, const Real& b,
                           int max_level = 12, const Real& tol = Real(1e-30));

/// (1/pi) \int_0^pi g(theta) dtheta by the midpoint rule, which is
/// spectrally accurate for smooth periodic-extendable g.  Equivalent to
/// \int_a^b g(acos((2t-a-b)/(b-a)))/(pi*sqrt((b-t)(t-a))) dt after the
/// Chebyshev substitution.
Real chebyshev_angle_integral(const RealFn& g, int nodes = 256);

/// \int_a^b f dμ_{arcsine[a,b]}: arcsine-weighted integral of smooth f.
Real arcsine_integral(const RealFn& f, const Real& a, const Real& b, int nodes = 256);

}  // namespace potpoly
