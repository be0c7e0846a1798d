#include "potpoly/quadrature.hpp"

#include <vector>

namespace potpoly {

// Abscissa/weight for tanh-sinh: x = tanh((pi/2) sinh(u)), w = dx/du.
// Nodes are generated symmetrically; the transform maps (-1,1).
static void ts_node(const Real& u, Real& x, Real& w) {
  Real half_pi = const_pi() / Real(2);
  Real su = sinh(u);
  Real cu = cosh(u);
  Real t = half_pi * su;
  x = tanh(t);
  Real ch = cosh(t);
  w = half_pi * cu / (ch * ch);
}

QuadratureResult tanh_sinh(const RealFn& f, const Real& a, const Real& b,
                           int max_level, const Real& tol) {
  // Transform to (-1,1): t = c + r*x.
  Real c = (a + b) / Real(2);
  Real r = (b - a) / Real(2);
  // Node cutoff: past |x| so close to ±1 that (1-|x|) underflows the
  // integrand's singularity scale.  u_max ~ asinh(2/pi * atanh(1-eps)).
  double u_max = 4.0;

  Real h(u_max);
  Real sum(0);
  // Level 0: nodes at u = 0 (plus endpoints of the u ladder handled below).
  {
    Real x, w;
    ts_node(Real(0), x, w);
    sum = w * f(c + r * x);
  }
  Real prev = sum * h;
  QuadratureResult out{prev, abs(prev), 0};

  for (int level = 1; level <= max_level; ++level) {
    h /= Real(2);
    // New nodes at odd multiples of h.
    Real add(0);
    long k = 1;
    while (true) {
      Real u = h * Real(static_cast<long>(k));
      if (u > Real(u_max)) break;
      Real x, w;
      ts_node(u, x, w);
      // Guard: skip nodes where 1-|x| is numerically 0 (f would see an exact
      // endpoint).  Their weights are double-exponentially negligible.
      Real gap = Real(1) - abs(x);
      if (!(gap > Real(0))) break;
      add += w * (f(c + r * x) + f(c - r * x));
      k += 2;
    }
    Real cur = prev / Real(2) + h * add;
    out.error_estimate = abs(cur - prev);
    out.levels_used = level;
    prev = cur;
    out.value = cur;
    if (level >= 4 && out.error_estimate < tol * (Real(1) + abs(cur))) break;
  }
  out.value = prev * r;
  out.error_estimate *= abs(r);
  return out;
}

Real chebyshev_angle_integral(const RealFn& g, int nodes) {
  Real pi = const_pi();
  Real h = pi / Real(static_cast<long>(nodes));
  Real sum(0);
  for (int j = 0; j < nodes; ++j) {
    Real theta = h * (Real(static_cast<long>(j)) + Real(0.5));
    sum += g(theta);
  }
  return sum / Real(static_cast<long>(nodes));
}

Real arcsine_integral(const RealFn& f, const Real& a, const Real& b, int nodes) {
  Real c = (a + b) / Real(2);
  Real r = (b - a) / Real(2);
  return chebyshev_angle_integral(
      [&](const Real& theta) { return f(c + r * cos(theta)); }, nodes);
}

}  // namespace potpoly
