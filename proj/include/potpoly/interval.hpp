#pragma once

#include <optional>
#include <string>
#include <vector>

#include "potpoly/decimal.hpp"
#include "potpoly/errors.hpp"
#include "potpoly/real.hpp"

namespace potpoly {

struct Interval {
  Decimal lo, hi;
};

/// Half-infinite extension [start, +inf) or (-inf, start]; only admissible
/// as an optimization domain, never for capacity or equilibrium work.
struct Ray {
  int direction = +1;  // +1 right, -1 left
  Decimal start;
};

/// Finite union of disjoint closed intervals with exact decimal endpoints,
/// kept sorted; optionally extended by a ray.
class IntervalUnion {
 public:
  IntervalUnion() = default;
  explicit IntervalUnion(std::vector<Interval> parts,
                         std::optional<Ray> ray = std::nullopt,
                         bool allow_points = false);

  static IntervalUnion single(const Decimal& lo, const Decimal& hi);

  const std::vector<Interval>& parts() const { return parts_; }
  const std::optional<Ray>& ray() const { return ray_; }
  bool compact() const { return !ray_.has_value(); }
  size_t component_count() const { return parts_.size(); }

  bool contains(const Real& x, const Real& slack = Real(0)) const;
  /// Index of the component containing x, or -1.
  int component_of(const Real& x) const;

  Decimal inf() const;  // throws NotCompactError if unbounded below
  Decimal sup() const;  // throws NotCompactError if unbounded above
  Real total_length() const;

  /// Hausdorff-style inclusion test against another union (exact endpoints).
  bool includes(const IntervalUnion& other) const;

 private:
  std::vector<Interval> parts_;  // sorted, pairwise disjoint, lo < hi
  std::optional<Ray> ray_;
};

struct CapacityResult {
  Real capacity;
  std::string method;  // "closed-form" | "energy-minimization"
  Real estimated_error;
};

/// Logarithmic capacity of a compact interval union.
/// Single interval: (hi-lo)/4 exactly.  Unions: equilibrium measure from the
/// gap-orthogonality conditions (the stationarity system of the energy
/// minimization), with the reported error taken from the measured potential
/// oscillation across the set.  Throws NotCompactError for rays.
CapacityResult capacity(const IntervalUnion& sigma);

/// Robin constant -log(capacity) together with the equilibrium potential
/// level; convenience wrapper used by energy identities.
Real robin_constant(const IntervalUnion& sigma);

/// Joukowski-type conformal map for [a,b]: phi(z) = w + sqrt(w^2-1) with
/// w = (2z-a-b)/(b-a), branch chosen so |phi| >= 1.
Complex joukowski_phi(const Real& a, const Real& b, const Complex& z);

/// Green's function of the complement of [a,b] with pole at infinity:
/// g(z) = log|phi(z)|; zero on [a,b].
Real interval_green(const Real& a, const Real& b, const Complex& z);

/// Two-pole Green's function g(z, y) of the complement of [a,b];
/// y real outside (a,b).  Vanishes for z on [a,b].
Real interval_green_pole(const Real& a, const Real& b, const Complex& z, const Real& y);

/// Equilibrium potential of [a,b] at z: -log((b-a)/4) - g(z).
Real interval_equilibrium_potential(const Real& a, const Real& b, const Complex& z);

/// Internal structure of the equilibrium measure of a union: density
/// |R(t)| / (pi * sqrt(prod |t-e|)) with one zero of R per gap.
struct EquilibriumStructure {
  std::vector<Real> gap_zeros;        // one per gap, K-1 entries
  std::vector<Real> component_mass;   // K entries, sums to 1
  Real robin;                          // equilibrium potential level on Sigma
  Real oscillation;                    // measured max-min of U over Sigma
};

EquilibriumStructure equilibrium_structure(const IntervalUnion& sigma,
                                           int quad_nodes = 512);

/// Potential of the union's equilibrium measure at real x, evaluated by
/// direct quadrature of the density (verification path, not closed form).
Real equilibrium_union_potential(const IntervalUnion& sigma,
                                 const EquilibriumStructure& eq, const Real& x);

}  // namespace potpoly
