#pragma once

#include <optional>
#include <vector>

#include "potpoly/interval.hpp"
#include "potpoly/polynomial.hpp"
#include "potpoly/real.hpp"

namespace potpoly {

/// Potential value U^mu(z); `infinite` marks z at an atom (+inf) or, for
/// log-integrals, a root collision (-inf, sign = -1).
struct PotentialValue {
  Real value;
  Real error_bound;
  bool infinite = false;
  int infinity_sign = +1;
};

/// One measure component.  All kinds carry unit mass scaled by `weight`:
///  - Atom: Dirac mass at `point` (complex allowed for counting measures).
///  - Equilibrium: arcsine law on [a, b].
///  - Nu: the balayage of delta_0 onto [a, b] (0 < a < b), optionally
///    transported by x -> shift + s*x with s = +1 (reflect=false) or -1;
///    smoothing produces translated/reflected copies.
///  - Grid: piecewise-uniform density with `breaks` (M+1 ascending) and
///    `cellmass` (M nonnegative, summing to 1).
struct MeasureComponent {
  enum class Kind { Atom, Equilibrium, Nu, Grid };
  Kind kind = Kind::Atom;
  Real weight{1};
  Complex point;
  Real a{0}, b{0};
  Real shift{0};
  bool reflect = false;
  std::vector<Real> breaks;
  std::vector<Real> cellmass;
};

class MixtureMeasure {
 public:
  MixtureMeasure() = default;

  static MixtureMeasure atom(const Real& x, const Real& w = Real(1));
  static MixtureMeasure atom_at(const Complex& z, const Real& w = Real(1));
  static MixtureMeasure equilibrium(const Real& a, const Real& b, const Real& w = Real(1));
  static MixtureMeasure nu(const Real& a, const Real& b, const Real& w = Real(1));
  static MixtureMeasure grid(std::vector<Real> breaks, std::vector<Real> cellmass,
                             const Real& w = Real(1));

  void add(MeasureComponent c);
  const std::vector<MeasureComponent>& components() const { return comps_; }
  bool empty() const { return comps_.empty(); }

  Real mass() const;
  bool is_probability(const Real& tol = Real(1e-12)) const;
  bool atomless() const;
  bool has_complex_atoms() const;

  /// Real-line support: merged closed intervals (atoms as points).
  std::vector<std::pair<Real, Real>> support_intervals() const;
  Real support_min() const;
  Real support_max() const;

  friend MixtureMeasure operator+(const MixtureMeasure& x, const MixtureMeasure& y);
  friend MixtureMeasure operator*(const Real& k, const MixtureMeasure& m);

  /// Set by counting_measure: enables the exact resultant route of
  /// log_integral_symbolic.
  std::optional<IntPolynomial> source_poly;

 private:
  std::vector<MeasureComponent> comps_;
};

PotentialValue potential(const MixtureMeasure& mu, const Real& z);
PotentialValue potential(const MixtureMeasure& mu, const Complex& z);

/// I(mu) via bilinear expansion over component pairs; +inf if mu has atoms.
Real energy(const MixtureMeasure& mu);
/// -iint log|z-w| dmu dnu; +inf on coincident atoms.
Real mutual_energy(const MixtureMeasure& mu, const MixtureMeasure& nu);

/// Right-continuous CDF; rejects complex atoms.
Real cdf(const MixtureMeasure& mu, const Real& t);
/// Minimal alpha with CDF(alpha) >= p (equality for continuous measures).
Real quantile(const MixtureMeasure& mu, const Real& p);

/// Uniform atoms at the roots of P (with multiplicity), mass 1.
MixtureMeasure counting_measure(const IntPolynomial& p);

/// int log|Q| dmu, numerically: mass*log|lc Q| - sum_roots m_j U^mu(beta_j).
PotentialValue log_integral(const IntPolynomial& q, const MixtureMeasure& mu);
/// Exact route when mu = mu_P: log|res(P,Q)|/deg P (lc-corrected); nullopt
/// when mu has no polynomial provenance.
std::optional<Real> log_integral_symbolic(const IntPolynomial& q, const MixtureMeasure& mu);

/// Convolution with nu_eps = nu_[eps^2, eps] (right) or its reflection
/// (left).  Continuous components are discretized into `cells` equal-mass
/// pieces first.
MixtureMeasure smooth(const MixtureMeasure& mu, const Real& eps, bool right_direction,
                      int cells = 256);

struct SweetenResult {
  MixtureMeasure measure;
  Real B;
  Real beta;
  Real amount;        // beta + gamma - beta*gamma
  Real worst_margin;  // max over grid of U^sw - (1-beta) U^ref, expected <= 0
};
SweetenResult sweeten(const MixtureMeasure& nu, const MixtureMeasure& mu_ref,
                      const IntervalUnion& sigma, int grid_points = 512);

/// Kolmogorov distance between CDFs, exact at atoms, grid-refined elsewhere.
Real cdf_distance(const MixtureMeasure& mu, const MixtureMeasure& nu, int refine = 2048);

struct HolderEstimate {
  Real A;
  Real eta;
  bool closed_form;  // true when every component has a known exponent
};
HolderEstimate holder_estimate(const MixtureMeasure& mu);

/// Equilibrium measure of sigma as a MixtureMeasure: exact arcsine component
/// for one interval, a grid built from the semi-analytic density for unions.
MixtureMeasure equilibrium_measure(const IntervalUnion& sigma, int nodes);

}  // namespace potpoly
