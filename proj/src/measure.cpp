#include "potpoly/measure.hpp"

#include <algorithm>

#include "potpoly/quadrature.hpp"

namespace potpoly {

namespace {

Real make_inf(int sign) {
  Real r;
  mpfr_set_inf(r.raw(), sign);
  return r;
}

Real rounding_bound(const Real& value) {
  return pow(Real(2), -static_cast<long>(Real::working_precision() - 24)) *
         (Real(1) + abs(value));
}

// Unit-mass potential of the nu component's base measure nu_[a,b] at complex
// z, via the inversion identity: nu_[a,b] is the image of the equilibrium
// measure of [1/b, 1/a] under s -> 1/s, giving
//   U(z) = U(0) - log|z| - log((B-A)/4) - g_{[A,B]}(1/z),  A=1/b, B=1/a,
// which is cancellation-free for every z != 0.
Real nu_unit_potential(const Real& a, const Real& b, const Complex& z) {
  Real A = Real(1) / b, B = Real(1) / a;
  Real u0 = Real(2) * log((Real(1) / sqrt(a) + Real(1) / sqrt(b)) / Real(2));
  Real az2 = z.abs2();
  if (az2.is_zero()) return u0;
  Complex w = Complex(Real(1)) / z;
  return u0 - Real(0.5) * log(az2) - log((B - A) / Real(4)) - interval_green(A, B, w);
}

Real nu_cdf_base(const Real& a, const Real& b, const Real& t) {
  if (t <= a) return Real(0);
  if (t >= b) return Real(1);
  Real A = Real(1) / b, B = Real(1) / a;
  Real s = Real(1) / t;
  Real u = (Real(2) * s - A - B) / (B - A);
  if (u > Real(1)) u = Real(1);
  if (u < Real(-1)) u = Real(-1);
  Real Feq = Real(0.5) + asin(u) / const_pi();
  return Real(1) - Feq;
}

Real eq_cdf(const Real& a, const Real& b, const Real& t) {
  if (t <= a) return Real(0);
  if (t >= b) return Real(1);
  Real u = (Real(2) * t - a - b) / (b - a);
  if (u > Real(1)) u = Real(1);
  if (u < Real(-1)) u = Real(-1);
  return Real(0.5) + asin(u) / const_pi();
}

// Antiderivative pieces for piecewise-uniform potentials.
Real prim_real(const Real& u) {
  if (u.is_zero()) return Real(0);
  return u * (log(abs(u)) - Real(1));
}

Real prim_complex(const Real& u, const Real& y) {
  // d/du [ u/2 log(u^2+y^2) - u + y atan(u/y) ] = 1/2 log(u^2+y^2).
  Real u2y2 = u * u + y * y;
  return Real(0.5) * u * log(u2y2) - u + y * atan(u / y);
}

Real grid_unit_potential(const std::vector<Real>& breaks, const std::vector<Real>& mass,
                         const Complex& z) {
  Real total(0);
  bool on_axis = z.im.is_zero();
  for (size_t i = 0; i < mass.size(); ++i) {
    if (mass[i].is_zero()) continue;
    const Real& p = breaks[i];
    const Real& q = breaks[i + 1];
    Real h = q - p;
    if (h.is_zero()) continue;
    Real integral = on_axis
                        ? prim_real(z.re - p) - prim_real(z.re - q)
                        : prim_complex(z.re - p, z.im) - prim_complex(z.re - q, z.im);
    total -= mass[i] / h * integral;
  }
  return total;
}

Real component_unit_potential(const MeasureComponent& c, const Complex& z, bool& infinite) {
  infinite = false;
  switch (c.kind) {
    case MeasureComponent::Kind::Atom: {
      Complex d = z - c.point;
      if (d.abs2().is_zero()) {
        infinite = true;
        return Real(0);
      }
      return -log_abs(d);
    }
    case MeasureComponent::Kind::Equilibrium:
      return interval_equilibrium_potential(c.a, c.b, z);
    case MeasureComponent::Kind::Nu: {
      Complex y = c.reflect ? Complex(c.shift) - z : z - Complex(c.shift);
      return nu_unit_potential(c.a, c.b, y);
    }
    case MeasureComponent::Kind::Grid:
      return grid_unit_potential(c.breaks, c.cellmass, z);
  }
  return Real(0);
}

Real component_unit_cdf(const MeasureComponent& c, const Real& t) {
  switch (c.kind) {
    case MeasureComponent::Kind::Atom:
      return t >= c.point.re ? Real(1) : Real(0);
    case MeasureComponent::Kind::Equilibrium:
      return eq_cdf(c.a, c.b, t);
    case MeasureComponent::Kind::Nu:
      return c.reflect ? Real(1) - nu_cdf_base(c.a, c.b, c.shift - t)
                       : nu_cdf_base(c.a, c.b, t - c.shift);
    case MeasureComponent::Kind::Grid: {
      if (t <= c.breaks.front()) return Real(0);
      if (t >= c.breaks.back()) return Real(1);
      Real acc(0);
      for (size_t i = 0; i < c.cellmass.size(); ++i) {
        if (t >= c.breaks[i + 1]) {
          acc += c.cellmass[i];
          continue;
        }
        if (t > c.breaks[i]) {
          Real h = c.breaks[i + 1] - c.breaks[i];
          if (!h.is_zero()) acc += c.cellmass[i] * (t - c.breaks[i]) / h;
        }
        break;
      }
      return acc;
    }
  }
  return Real(0);
}

std::pair<Real, Real> component_support(const MeasureComponent& c) {
  switch (c.kind) {
    case MeasureComponent::Kind::Atom:
      return {c.point.re, c.point.re};
    case MeasureComponent::Kind::Equilibrium:
      return {c.a, c.b};
    case MeasureComponent::Kind::Nu:
      if (c.reflect) return {c.shift - c.b, c.shift - c.a};
      return {c.shift + c.a, c.shift + c.b};
    case MeasureComponent::Kind::Grid:
      return {c.breaks.front(), c.breaks.back()};
  }
  return {Real(0), Real(0)};
}

}  // namespace

MixtureMeasure MixtureMeasure::atom(const Real& x, const Real& w) {
  return atom_at(Complex(x), w);
}

MixtureMeasure MixtureMeasure::atom_at(const Complex& z, const Real& w) {
  MixtureMeasure m;
  MeasureComponent c;
  c.kind = MeasureComponent::Kind::Atom;
  c.point = z;
  c.weight = w;
  m.add(std::move(c));
  return m;
}

MixtureMeasure MixtureMeasure::equilibrium(const Real& a, const Real& b, const Real& w) {
  if (!(a < b)) throw UsageError("equilibrium component requires a < b");
  MixtureMeasure m;
  MeasureComponent c;
  c.kind = MeasureComponent::Kind::Equilibrium;
  c.a = a;
  c.b = b;
  c.weight = w;
  m.add(std::move(c));
  return m;
}

MixtureMeasure MixtureMeasure::nu(const Real& a, const Real& b, const Real& w) {
  if (!(Real(0) < a && a < b)) throw UsageError("nu component requires 0 < a < b");
  MixtureMeasure m;
  MeasureComponent c;
  c.kind = MeasureComponent::Kind::Nu;
  c.a = a;
  c.b = b;
  c.weight = w;
  m.add(std::move(c));
  return m;
}

MixtureMeasure MixtureMeasure::grid(std::vector<Real> breaks, std::vector<Real> cellmass,
                                    const Real& w) {
  if (breaks.size() < 2 || breaks.size() != cellmass.size() + 1)
    throw UsageError("grid component needs M+1 breaks and M cell masses");
  Real total(0);
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i] <= breaks[i + 1]))
      throw UsageError("grid breakpoints must ascend");
    if (cellmass[i].sign() < 0) throw UsageError("grid cell masses must be nonnegative");
    total += cellmass[i];
  }
  if (total.is_zero()) throw UsageError("grid component has zero mass");
  for (auto& m : cellmass) m /= total;
  MixtureMeasure m;
  MeasureComponent c;
  c.kind = MeasureComponent::Kind::Grid;
  c.breaks = std::move(breaks);
  c.cellmass = std::move(cellmass);
  c.weight = w;
  m.add(std::move(c));
  return m;
}

void MixtureMeasure::add(MeasureComponent c) {
  if (!(c.weight > Real(0))) throw UsageError("component weight must be positive");
  comps_.push_back(std::move(c));
}

Real MixtureMeasure::mass() const {
  Real m(0);
  for (const auto& c : comps_) m += c.weight;
  return m;
}

bool MixtureMeasure::is_probability(const Real& tol) const {
  return abs(mass() - Real(1)) <= tol;
}

bool MixtureMeasure::atomless() const {
  for (const auto& c : comps_)
    if (c.kind == MeasureComponent::Kind::Atom) return false;
  return true;
}

bool MixtureMeasure::has_complex_atoms() const {
  for (const auto& c : comps_)
    if (c.kind == MeasureComponent::Kind::Atom && !c.point.im.is_zero()) return true;
  return false;
}

std::vector<std::pair<Real, Real>> MixtureMeasure::support_intervals() const {
  std::vector<std::pair<Real, Real>> iv;
  for (const auto& c : comps_) iv.push_back(component_support(c));
  std::sort(iv.begin(), iv.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<std::pair<Real, Real>> merged;
  for (auto& p : iv) {
    if (!merged.empty() && p.first <= merged.back().second) {
      if (p.second > merged.back().second) merged.back().second = p.second;
    } else {
      merged.push_back(p);
    }
  }
  return merged;
}

Real MixtureMeasure::support_min() const {
  if (comps_.empty()) throw EmptySetError();
  return support_intervals().front().first;
}

Real MixtureMeasure::support_max() const {
  if (comps_.empty()) throw EmptySetError();
  return support_intervals().back().second;
}

MixtureMeasure operator+(const MixtureMeasure& x, const MixtureMeasure& y) {
  MixtureMeasure m;
  m.comps_ = x.comps_;
  m.comps_.insert(m.comps_.end(), y.comps_.begin(), y.comps_.end());
  return m;
}

MixtureMeasure operator*(const Real& k, const MixtureMeasure& m) {
  if (!(k > Real(0))) throw UsageError("measure scaling requires a positive factor");
  MixtureMeasure r;
  r.comps_ = m.comps_;
  for (auto& c : r.comps_) c.weight *= k;
  return r;
}

PotentialValue potential(const MixtureMeasure& mu, const Real& z) {
  return potential(mu, Complex(z));
}

PotentialValue potential(const MixtureMeasure& mu, const Complex& z) {
  PotentialValue out{Real(0), Real(0), false, +1};
  for (const auto& c : mu.components()) {
    bool inf_here = false;
    Real u = component_unit_potential(c, z, inf_here);
    if (inf_here) return PotentialValue{Real(0), Real(0), true, +1};
    out.value += c.weight * u;
  }
  out.error_bound = rounding_bound(out.value);
  return out;
}

// ---------------------------------------------------------------------------
// Energies.

namespace {

// Self-energy of a unit-mass component; +inf for atoms.
Real component_self_energy(const MeasureComponent& c) {
  switch (c.kind) {
    case MeasureComponent::Kind::Atom:
      return make_inf(+1);
    case MeasureComponent::Kind::Equilibrium:
      return -log((c.b - c.a) / Real(4));
    case MeasureComponent::Kind::Nu: {
      // I(nu) = U^nu(0) + g_[a,b](0); translation/reflection invariant.
      Real u0 = Real(2) * log((Real(1) / sqrt(c.a) + Real(1) / sqrt(c.b)) / Real(2));
      return u0 + interval_green(c.a, c.b, Complex(Real(0)));
    }
    case MeasureComponent::Kind::Grid: {
      // -iint log|x-y| over cell pairs, closed form via
      // G(u) = u^2 (2 log|u| - 3)/4.
      auto G = [](const Real& u) {
        if (u.is_zero()) return Real(0);
        return u * u * (Real(2) * log(abs(u)) - Real(3)) / Real(4);
      };
      const auto& t = c.breaks;
      const auto& m = c.cellmass;
      Real total(0);
      for (size_t i = 0; i < m.size(); ++i) {
        if (m[i].is_zero()) continue;
        Real hi = t[i + 1] - t[i];
        if (hi.is_zero()) continue;
        Real di = m[i] / hi;
        // Self cell: iint_{[0,h]^2} log|x-y| = 2 G(h).
        total -= di * di * Real(2) * G(hi);
        for (size_t j = i + 1; j < m.size(); ++j) {
          if (m[j].is_zero()) continue;
          Real hj = t[j + 1] - t[j];
          if (hj.is_zero()) continue;
          Real dj = m[j] / hj;
          Real block = G(t[i + 1] - t[j]) - G(t[i + 1] - t[j + 1]) -
                       G(t[i] - t[j]) + G(t[i] - t[j + 1]);
          total -= Real(2) * di * dj * block;
        }
      }
      return total;
    }
  }
  return Real(0);
}

// Integrate f over component c (unit mass) with singularity-aware quadrature.
Real integrate_against(const MeasureComponent& c, const std::function<Real(const Real&)>& f,
                       const std::vector<Real>& split_at) {
  Real pi = const_pi();
  switch (c.kind) {
    case MeasureComponent::Kind::Atom:
      return f(c.point.re);
    case MeasureComponent::Kind::Equilibrium:
    case MeasureComponent::Kind::Nu: {
      // Angle substitution over the base interval maps the density to a
      // smooth (equilibrium) or smooth-positive (nu) weight in theta.
      bool is_nu = c.kind == MeasureComponent::Kind::Nu;
      Real a = c.a, b = c.b;
      Real ctr = (a + b) / Real(2), rad = (b - a) / Real(2);
      Real sab = is_nu ? sqrt(a * b) : Real(0);
      auto point_of = [&](const Real& th) {
        Real t = ctr + rad * cos(th);
        if (c.kind == MeasureComponent::Kind::Nu)
          return c.reflect ? c.shift - t : c.shift + t;
        return t;
      };
      auto g = [&](const Real& th) {
        Real t_base = ctr + rad * cos(th);
        Real w = is_nu ? sab / t_base : Real(1);
        return w * f(point_of(th));
      };
      // Split angles where the transported point crosses a requested split.
      std::vector<Real> cuts{Real(0), pi};
      for (const Real& s : split_at) {
        Real t_base = is_nu ? (c.reflect ? c.shift - s : s - c.shift) : s;
        if (t_base > a && t_base < b) {
          Real u = (Real(2) * t_base - a - b) / (b - a);
          if (u > Real(1)) u = Real(1);
          if (u < Real(-1)) u = Real(-1);
          cuts.push_back(acos(u));
        }
      }
      std::sort(cuts.begin(), cuts.end());
      Real total(0);
      for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i + 1] - cuts[i] > Real(1e-30))) continue;
        total += tanh_sinh(g, cuts[i], cuts[i + 1], 10).value;
      }
      return total / pi;
    }
    case MeasureComponent::Kind::Grid: {
      Real total(0);
      for (size_t i = 0; i < c.cellmass.size(); ++i) {
        if (c.cellmass[i].is_zero()) continue;
        Real p = c.breaks[i], q = c.breaks[i + 1];
        Real h = q - p;
        if (h.is_zero()) continue;
        Real cell = tanh_sinh(f, p, q, 7).value;
        total += c.cellmass[i] / h * cell;
      }
      return total;
    }
  }
  return Real(0);
}

bool same_nu(const MeasureComponent& x, const MeasureComponent& y) {
  return x.a == y.a && x.b == y.b && x.shift == y.shift && x.reflect == y.reflect;
}

Real component_mutual_energy(const MeasureComponent& x, const MeasureComponent& y) {
  using K = MeasureComponent::Kind;
  // Atom on either side: the potential of the other, at the atom.
  if (x.kind == K::Atom || y.kind == K::Atom) {
    const MeasureComponent& at = x.kind == K::Atom ? x : y;
    const MeasureComponent& other = x.kind == K::Atom ? y : x;
    if (other.kind == K::Atom) {
      Complex d = at.point - other.point;
      if (d.abs2().is_zero()) return make_inf(+1);
      return -log_abs(d);
    }
    bool inf_here = false;
    Real u = component_unit_potential(other, at.point, inf_here);
    return inf_here ? make_inf(+1) : u;
  }
  // Identical continuous components: closed-form self-energy.
  if (x.kind == y.kind) {
    if (x.kind == K::Equilibrium && x.a == y.a && x.b == y.b)
      return component_self_energy(x);
    if (x.kind == K::Nu && same_nu(x, y)) return component_self_energy(x);
  }
  // Grid x Grid: closed form over cell pairs.
  if (x.kind == K::Grid && y.kind == K::Grid) {
    auto G = [](const Real& u) {
      if (u.is_zero()) return Real(0);
      return u * u * (Real(2) * log(abs(u)) - Real(3)) / Real(4);
    };
    Real total(0);
    for (size_t i = 0; i < x.cellmass.size(); ++i) {
      if (x.cellmass[i].is_zero()) continue;
      Real hx = x.breaks[i + 1] - x.breaks[i];
      if (hx.is_zero()) continue;
      Real dx = x.cellmass[i] / hx;
      for (size_t j = 0; j < y.cellmass.size(); ++j) {
        if (y.cellmass[j].is_zero()) continue;
        Real hy = y.breaks[j + 1] - y.breaks[j];
        if (hy.is_zero()) continue;
        Real dy = y.cellmass[j] / hy;
        Real block = G(x.breaks[i + 1] - y.breaks[j]) - G(x.breaks[i + 1] - y.breaks[j + 1]) -
                     G(x.breaks[i] - y.breaks[j]) + G(x.breaks[i] - y.breaks[j + 1]);
        total -= dx * dy * block;
      }
    }
    return total;
  }
  // Mixed continuous kinds: integrate the closed-form potential of one
  // against the other's density, splitting at the first one's endpoints.
  const MeasureComponent& pot_side = x.kind == K::Grid ? y : x;
  const MeasureComponent& int_side = x.kind == K::Grid ? x : y;
  auto [slo, shi] = component_support(pot_side);
  auto f = [&](const Real& t) {
    bool inf_here = false;
    Real u = component_unit_potential(pot_side, Complex(t), inf_here);
    return u;
  };
  return integrate_against(int_side, f, {slo, shi});
}

}  // namespace

Real mutual_energy(const MixtureMeasure& mu, const MixtureMeasure& nu) {
  Real total(0);
  for (const auto& cx : mu.components()) {
    for (const auto& cy : nu.components()) {
      Real e = component_mutual_energy(cx, cy);
      if (e.is_inf()) return e;
      total += cx.weight * cy.weight * e;
    }
  }
  return total;
}

Real energy(const MixtureMeasure& mu) {
  const auto& cs = mu.components();
  Real total(0);
  for (size_t i = 0; i < cs.size(); ++i) {
    Real self = component_self_energy(cs[i]);
    if (self.is_inf()) return self;
    total += cs[i].weight * cs[i].weight * self;
    for (size_t j = i + 1; j < cs.size(); ++j) {
      Real e = component_mutual_energy(cs[i], cs[j]);
      if (e.is_inf()) return e;
      total += Real(2) * cs[i].weight * cs[j].weight * e;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// CDF / quantile.

Real cdf(const MixtureMeasure& mu, const Real& t) {
  if (mu.has_complex_atoms())
    throw UsageError("cdf undefined for measures with non-real atoms");
  Real acc(0);
  for (const auto& c : mu.components()) acc += c.weight * component_unit_cdf(c, t);
  return acc;
}

namespace {
Real cdf_left(const MixtureMeasure& mu, const Real& t) {
  Real acc = cdf(mu, t);
  for (const auto& c : mu.components())
    if (c.kind == MeasureComponent::Kind::Atom && c.point.re == t) acc -= c.weight;
  return acc;
}
}  // namespace

Real quantile(const MixtureMeasure& mu, const Real& p) {
  if (p < Real(0) || p > Real(1))
    throw ParameterError("quantile requires p in [0,1]");
  if (!mu.is_probability())
    throw UsageError("quantile requires a probability measure");
  if (mu.has_complex_atoms())
    throw UsageError("quantile undefined for measures with non-real atoms");
  Real lo = mu.support_min();
  Real hi = mu.support_max();
  if (p.is_zero()) return lo;
  lo -= Real(1);
  // inf{alpha : CDF(alpha) >= p}; CDF continuity makes it the minimal alpha
  // with CDF = p for atomless measures.
  for (int i = 0; i < 220; ++i) {
    Real mid = (lo + hi) / Real(2);
    if (cdf(mu, mid) >= p)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// ---------------------------------------------------------------------------
// Counting measures and log-integrals.

MixtureMeasure counting_measure(const IntPolynomial& p) {
  if (p.is_zero() || p.degree() < 1)
    throw UsageError("counting measure needs degree >= 1");
  auto roots = all_roots(p);
  MixtureMeasure m;
  Real w = Real(1) / Real(p.degree());
  for (const auto& r : roots) {
    MeasureComponent c;
    c.kind = MeasureComponent::Kind::Atom;
    c.point = r;
    c.weight = w;
    m.add(std::move(c));
  }
  m.source_poly = p;
  return m;
}

PotentialValue log_integral(const IntPolynomial& q, const MixtureMeasure& mu) {
  if (q.is_zero()) throw UsageError("log_integral of the zero polynomial");
  Real mass = mu.mass();
  Real val = mass * log(abs(real_from_mpz(q.leading())));
  if (q.degree() == 0) return PotentialValue{val, rounding_bound(val), false, +1};
  auto roots = all_roots(q);
  for (const auto& beta : roots) {
    PotentialValue u = potential(mu, beta);
    if (u.infinite) return PotentialValue{Real(0), Real(0), true, -1};
    val -= u.value;
  }
  return PotentialValue{val, rounding_bound(val) * Real(q.degree() + 1), false, +1};
}

std::optional<Real> log_integral_symbolic(const IntPolynomial& q, const MixtureMeasure& mu) {
  if (!mu.source_poly.has_value()) return std::nullopt;
  const IntPolynomial& p = *mu.source_poly;
  mpz_class res = resultant(p, q);
  if (res == 0) return make_inf(-1);
  Real lr = log(abs(real_from_mpz(res)));
  Real corr = Real(q.degree()) * log(abs(real_from_mpz(p.leading())));
  return (lr - corr) / Real(p.degree());
}

// ---------------------------------------------------------------------------
// Smoothing.

MixtureMeasure smooth(const MixtureMeasure& mu, const Real& eps, bool right_direction,
                      int cells) {
  if (!(eps > Real(0)) || !(eps < Real(0.5)))
    throw ParameterError("smooth requires eps in (0, 1/2)");
  if (!mu.is_probability()) throw UsageError("smooth requires a probability measure");
  if (mu.has_complex_atoms()) throw UsageError("smooth requires a real measure");
  if (cells < 2) throw ParameterError("smooth needs at least 2 cells");
  Real e2 = eps * eps;
  MixtureMeasure out;
  auto add_bump = [&](const Real& at, const Real& w) {
    MeasureComponent c;
    c.kind = MeasureComponent::Kind::Nu;
    c.a = e2;
    c.b = eps;
    c.shift = at;
    c.reflect = !right_direction;
    c.weight = w;
    out.add(std::move(c));
  };
  for (const auto& c : mu.components()) {
    if (c.kind == MeasureComponent::Kind::Atom) {
      add_bump(c.point.re, c.weight);
      continue;
    }
    // Equal-mass discretization of the continuous component.
    MixtureMeasure single;
    MeasureComponent unit = c;
    unit.weight = Real(1);
    single.add(unit);
    for (int i = 0; i < cells; ++i) {
      Real p = (Real(i) + Real(0.5)) / Real(cells);
      Real at = quantile(single, p);
      add_bump(at, c.weight / Real(cells));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweetening.

SweetenResult sweeten(const MixtureMeasure& nu, const MixtureMeasure& mu_ref,
                      const IntervalUnion& sigma, int grid_points) {
  CapacityResult cap = capacity(sigma);
  if (!(cap.capacity > Real(1)))
    throw SweetenerUndefinedError("sweetening needs capacity(sigma) > 1");
  if (!mu_ref.is_probability(Real(1e-9)))
    throw UsageError("sweeten requires a probability reference measure");
  Real gamma = Real(1) - nu.mass();
  if (gamma < Real(-1e-12) || gamma >= Real(1))
    throw UsageError("sweeten requires mass(nu) in (0, 1]");
  if (gamma < Real(0)) gamma = Real(0);

  MixtureMeasure eq = equilibrium_measure(sigma, std::max(grid_points, 64));
  MixtureMeasure combined = nu;
  if (gamma > Real(0)) combined = combined + gamma * eq;
  if (!combined.atomless())
    throw UnboundedError("sweeten: U of an atomic measure is unbounded above");

  // B = sup_z (U^{nu + gamma mu_sigma} - U^{mu_ref}).  The difference is
  // harmonic off the two supports and tends to 0 at infinity (both masses
  // are 1), so the maximum principle confines the sup to the supports,
  // sampled densely here; it also forces B >= 0.
  auto supports = combined.support_intervals();
  for (auto& s : mu_ref.support_intervals()) supports.push_back(s);
  for (const auto& p : sigma.parts())
    supports.push_back({p.lo.to_real(), p.hi.to_real()});
  Real B(0);
  int per = std::max(16, grid_points / std::max<int>(1, supports.size()));
  for (const auto& [lo, hi] : supports) {
    for (int i = 0; i <= per; ++i) {
      Real x = lo + (hi - lo) * Real(i) / Real(per);
      PotentialValue uc = potential(combined, x);
      PotentialValue ur = potential(mu_ref, x);
      if (uc.infinite || ur.infinite) continue;
      Real diff = uc.value - ur.value;
      if (diff > B) B = diff;
    }
  }

  Real logk = log(cap.capacity);
  Real beta = B / (logk + B);
  Real amount = beta + gamma - beta * gamma;

  SweetenResult out;
  out.B = B;
  out.beta = beta;
  out.amount = amount;
  out.measure = (Real(1) - beta) * nu;
  if (amount > Real(0)) out.measure = out.measure + amount * eq;

  Real worst = make_inf(-1);
  for (const auto& [lo, hi] : supports) {
    for (int i = 0; i <= per; ++i) {
      Real x = lo + (hi - lo) * Real(i) / Real(per);
      PotentialValue us = potential(out.measure, x);
      PotentialValue ur = potential(mu_ref, x);
      if (us.infinite || ur.infinite) continue;
      Real margin = us.value - (Real(1) - beta) * ur.value;
      if (margin > worst || worst.is_inf()) worst = margin;
    }
  }
  out.worst_margin = worst;
  return out;
}

// ---------------------------------------------------------------------------
// CDF distance.

Real cdf_distance(const MixtureMeasure& mu, const MixtureMeasure& nu, int refine) {
  if (!mu.is_probability(Real(1e-9)) || !nu.is_probability(Real(1e-9)))
    throw UsageError("cdf_distance requires probability measures");
  if (mu.has_complex_atoms() || nu.has_complex_atoms())
    throw UsageError("cdf_distance requires real measures");
  std::vector<Real> candidates;
  std::vector<Real> atoms;
  auto collect = [&](const MixtureMeasure& m) {
    for (const auto& c : m.components()) {
      switch (c.kind) {
        case MeasureComponent::Kind::Atom:
          atoms.push_back(c.point.re);
          break;
        case MeasureComponent::Kind::Grid:
          for (const auto& t : c.breaks) candidates.push_back(t);
          break;
        default: {
          auto [lo, hi] = component_support(c);
          candidates.push_back(lo);
          candidates.push_back(hi);
        }
      }
    }
  };
  collect(mu);
  collect(nu);
  Real lo = min(mu.support_min(), nu.support_min());
  Real hi = max(mu.support_max(), nu.support_max());
  for (int i = 0; i <= refine; ++i)
    candidates.push_back(lo + (hi - lo) * Real(i) / Real(refine));
  Real d(0);
  for (const auto& t : candidates) {
    Real v = abs(cdf(mu, t) - cdf(nu, t));
    if (v > d) d = v;
  }
  for (const auto& t : atoms) {
    Real v1 = abs(cdf(mu, t) - cdf(nu, t));
    Real v2 = abs(cdf_left(mu, t) - cdf_left(nu, t));
    d = max(d, max(v1, v2));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Hoelder estimation.

HolderEstimate holder_estimate(const MixtureMeasure& mu) {
  if (!mu.atomless()) return HolderEstimate{make_inf(+1), Real(0), false};
  bool any_half = false;
  for (const auto& c : mu.components())
    if (c.kind != MeasureComponent::Kind::Grid) any_half = true;
  Real eta = any_half ? Real(0.5) : Real(1);
  Real lo = mu.support_min();
  Real hi = mu.support_max();
  Real diam = hi - lo;
  Real A(0);
  for (int k = 1; k <= 12; ++k) {
    Real h = diam / pow(Real(2), static_cast<long>(k));
    int samples = 48;
    for (int i = 0; i < samples; ++i) {
      Real x = lo + (diam - h) * Real(i) / Real(samples - 1);
      Real massxy = cdf(mu, x + h) - cdf(mu, x);
      Real ratio = massxy / pow(h, eta);
      if (ratio > A) A = ratio;
    }
  }
  return HolderEstimate{A, eta, true};
}

// ---------------------------------------------------------------------------
// Equilibrium measure as a mixture.

MixtureMeasure equilibrium_measure(const IntervalUnion& sigma, int nodes) {
  if (!sigma.compact()) throw NotCompactError("equilibrium measure of an unbounded set");
  const auto& parts = sigma.parts();
  if (nodes < 2 * static_cast<int>(parts.size()))
    throw InsufficientNodesError("need at least 2 nodes per component");
  if (parts.size() == 1)
    return MixtureMeasure::equilibrium(parts[0].lo.to_real(), parts[0].hi.to_real());

  EquilibriumStructure eq = equilibrium_structure(sigma);
  std::vector<Real> ends;
  for (const auto& p : parts) {
    ends.push_back(p.lo.to_real());
    ends.push_back(p.hi.to_real());
  }
  Real pi = const_pi();
  MixtureMeasure out;
  for (size_t k = 0; k < parts.size(); ++k) {
    Real a = ends[2 * k], b = ends[2 * k + 1];
    Real c = (a + b) / Real(2), r = (b - a) / Real(2);
    double share = eq.component_mass[k].to_double();
    int nk = std::max(2, static_cast<int>(nodes * share + 0.5));
    // Chebyshev-angle cells cluster at the endpoints where the density
    // blows up like an inverse square root.
    std::vector<Real> breaks(nk + 1, Real(0));
    std::vector<Real> mass(nk, Real(0));
    for (int j = 0; j <= nk; ++j) {
      Real th = pi * Real(nk - j) / Real(nk);
      breaks[j] = c + r * cos(th);
    }
    auto dens = [&](const Real& th) {
      Real t = c + r * cos(th);
      Real prod(1);
      for (size_t e = 0; e < ends.size(); ++e) {
        if (e == 2 * k || e == 2 * k + 1) continue;
        prod *= abs(t - ends[e]);
      }
      Real w = Real(1) / sqrt(prod);
      Real rp(1);
      for (const auto& z : eq.gap_zeros) rp *= (t - z);
      return abs(rp) * w;
    };
    for (int j = 0; j < nk; ++j) {
      // theta decreasing in j; integrate the cell's angle range.
      Real th_hi = pi * Real(nk - j) / Real(nk);
      Real th_lo = pi * Real(nk - j - 1) / Real(nk);
      int sub = 24;
      Real acc(0);
      for (int s = 0; s < sub; ++s) {
        Real th = th_lo + (th_hi - th_lo) * (Real(s) + Real(0.5)) / Real(sub);
        acc += dens(th);
      }
      mass[j] = acc * (th_hi - th_lo) / Real(sub) / pi;
    }
    Real total(0);
    for (const auto& m : mass) total += m;
    for (auto& m : mass) m = m / total * eq.component_mass[k];
    MeasureComponent comp;
    comp.kind = MeasureComponent::Kind::Grid;
    comp.breaks = std::move(breaks);
    comp.cellmass = std::move(mass);
    comp.weight = Real(1);
    // Normalize cell masses to unit component mass, fold share into weight.
    Real cm(0);
    for (const auto& m : comp.cellmass) cm += m;
    for (auto& m : comp.cellmass) m /= cm;
    comp.weight = cm;
    out.add(std::move(comp));
  }
  return out;
}

}  // namespace potpoly
