#include "potpoly/balayage.hpp"

#include <algorithm>
#include <cmath>

#include "potpoly/errors.hpp"
#include "potpoly/interval.hpp"

namespace potpoly {

namespace {

// Closed forms for mu = c * equilibrium[a,b] + (1-c) * nu[a,b], 0 < a < b.
// g0 is the complement Green's function at the pole 0; potentials at 0 follow
// from U^eq = robin - green and the involution t -> ab/t that exchanges the
// equilibrium and balayage densities.
struct SerreForms {
  Real a, b;
  Real L;     // log((b-a)/4), the negated Robin constant
  Real g0;    // green(0)
  Real ueq0;  // U^eq(0)
  Real unu0;  // U^nu(0)

  SerreForms(const Real& a_, const Real& b_) : a(a_), b(b_) {
    Real s = sqrt(a * b);
    L = log((b - a) / Real(4));
    g0 = log((a + b + Real(2) * s) / (b - a));
    ueq0 = -L - g0;
    unu0 = -log(a * b) - ueq0;
  }

  // Mixing weight from U^mu(0) = 0.
  Real cmix() const { return unu0 / (unu0 - ueq0); }

  // Interior condition U^mu(a) = -(1-c) log a, cleared of the cmix
  // denominator: root in b for fixed a.
  Real interior() const { return unu0 * L + ueq0 * g0; }

  Real mean() const {
    Real c = cmix();
    return c * (a + b) / Real(2) + (Real(1) - c) * sqrt(a * b);
  }
};

// Root of the interior condition in b for fixed a; the condition runs from
// negative at small b to positive (limit log(4a) < 0 requires a < 1/4, and
// the Robin term dominates upward beyond the crossing).
Real solve_b(const Real& a, int bisect_iters) {
  Real lo = a + Real(0.25);
  Real flo = SerreForms(a, lo).interior();
  Real hi = lo;
  Real fhi = flo;
  bool bracketed = false;
  Real gap(0.25);
  for (int k = 0; k < 80; ++k) {
    gap = gap * Real(2);
    hi = a + gap;
    fhi = SerreForms(a, hi).interior();
    if (fhi.sign() != flo.sign()) {
      bracketed = true;
      break;
    }
    lo = hi;
    flo = fhi;
  }
  if (!bracketed) throw IterationLimitError("no bracket for the interior endpoint equation");
  for (int k = 0; k < bisect_iters; ++k) {
    Real mid = (lo + hi) / Real(2);
    Real fm = SerreForms(a, mid).interior();
    if (fm.sign() == flo.sign()) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / Real(2);
}

bool is_prime_power(long q) {
  if (q < 2) return false;
  long p = 0;
  for (long d = 2; d * d <= q; ++d)
    if (q % d == 0) {
      p = d;
      break;
    }
  if (p == 0) return true;  // prime
  while (q % p == 0) q /= p;
  return q == 1;
}

}  // namespace

MixtureMeasure SerreMeasure::measure() const {
  return MixtureMeasure::equilibrium(a, b, c) + MixtureMeasure::nu(a, b, Real(1) - c);
}

MixtureMeasure nu_measure(const Real& a, const Real& b) {
  if (!(Real(0) < a) || !(a < b)) throw UsageError("balayage bump needs 0 < a < b");
  return MixtureMeasure::nu(a, b);
}

MixtureMeasure balayage_point(const Real& y, const Interval& interval, int cells) {
  Real a = interval.lo.to_real();
  Real b = interval.hi.to_real();
  if (!(a < b)) throw UsageError("balayage interval is empty");
  if (cells < 8) throw ParameterError("balayage grid needs at least 8 cells");
  if (y > a && y < b) throw UsageError("balayage point must lie outside the open interval");
  if (y == a || y == b) return MixtureMeasure::atom(y);
  if (y.is_zero()) {
    if (Real(0) < a) return MixtureMeasure::nu(a, b);
    // Interval left of the pole: reflect the canonical bump through 0.
    MeasureComponent comp;
    comp.kind = MeasureComponent::Kind::Nu;
    comp.a = -b;
    comp.b = -a;
    comp.reflect = true;
    MixtureMeasure m;
    m.add(comp);
    return m;
  }

  // Density sqrt((y-a)(y-b)) / (pi |t-y| sqrt((b-t)(t-a))): the cumulative
  // mass has a closed form after t = m + r sin(phi), u = tan(phi/2).
  Real m = (a + b) / Real(2);
  Real r = (b - a) / Real(2);
  Real A = y - m;
  Real D = sqrt((y - a) * (y - b));
  Real sgn = A.sign() > 0 ? Real(1) : Real(-1);
  Real pi = const_pi();
  auto cum = [&](const Real& u) {
    return sgn * Real(2) / pi * atan((A * u - r) / D);
  };

  Real green_y = interval_green(a, b, Complex(y));

  int n = cells;
  for (int attempt = 0; attempt < 5; ++attempt) {
    std::vector<Real> breaks, mass, cumvals;
    breaks.reserve(n + 1);
    cumvals.reserve(n + 1);
    for (int j = 0; j <= n; ++j) {
      Real phi = pi * (Real(j) / Real(n) - Real(0.5));
      breaks.push_back(m + r * sin(phi));
      Real half = phi / Real(2);
      cumvals.push_back(cum(sin(half) / cos(half)));
    }
    breaks.front() = a;
    breaks.back() = b;
    Real total = cumvals.back() - cumvals.front();
    mass.reserve(n);
    for (int j = 0; j < n; ++j) mass.push_back((cumvals[j + 1] - cumvals[j]) / total);
    MixtureMeasure out = MixtureMeasure::grid(breaks, mass);

    // The defining property: U = -log|x-y| + g(y) on the interval, gated on
    // points offset from the construction grid, with endpoint clusters where
    // the density is singular.
    Real worst(0);
    auto gate = [&](const Real& phi) {
      Real x = m + r * sin(phi);
      Real target = -log(abs(x - y)) + green_y;
      Real dev = abs(potential(out, x).value - target);
      if (dev > worst) worst = dev;
    };
    for (int k = 0; k < 97; ++k) gate(pi * ((Real(k) + Real(0.5)) / Real(97) - Real(0.5)));
    for (int j = 2; j <= 10; ++j) {
      Real off = pi * (Real(0.5) - pow(Real(2), Real(-j)));
      gate(off);
      gate(-off);
    }
    if (worst <= Real(4e-7)) return out;
    n *= 2;
    if (n > (1 << 15)) break;
  }
  throw VerificationError("balayage potential match did not reach tolerance");
}

SerreMeasure serre_solve(double tol) {
  if (!(tol > 0)) throw UsageError("solver tolerance must be positive");
  if (tol < 1e-50) throw IterationLimitError("tolerance below working precision");

  double target_a = std::min(tol, 1e-10);
  int gold_iters = static_cast<int>(std::ceil(std::log(0.3 / target_a) / std::log(1.618))) + 5;
  int bisect_iters = static_cast<int>(std::ceil(std::log(1e4 / (target_a * 1e-3)) / std::log(2.0))) + 5;
  if (gold_iters > 400 || bisect_iters > 500)
    throw IterationLimitError("tolerance needs more iterations than the solver allows");

  auto mean_at = [&](const Real& a) {
    Real b = solve_b(a, bisect_iters);
    return SerreForms(a, b).mean();
  };

  // Coarse geometric scan locates the basin; golden section refines it.
  // The interior equation only brackets for a < 1/4.
  Real best_a(0), best_val(0);
  bool have = false;
  std::vector<Real> scan;
  for (int i = 0; i <= 40; ++i)
    scan.push_back(Real(0.01) * pow(Real(24), Real(i) / Real(40)));
  size_t best_i = 0;
  for (size_t i = 0; i < scan.size(); ++i) {
    Real v = mean_at(scan[i]);
    if (!have || v < best_val) {
      have = true;
      best_val = v;
      best_a = scan[i];
      best_i = i;
    }
  }
  Real lo = scan[best_i == 0 ? 0 : best_i - 1];
  Real hi = scan[std::min(best_i + 1, scan.size() - 1)];

  Real invphi = (sqrt(Real(5)) - Real(1)) / Real(2);
  Real x1 = hi - invphi * (hi - lo);
  Real x2 = lo + invphi * (hi - lo);
  Real f1 = mean_at(x1), f2 = mean_at(x2);
  for (int i = 0; i < gold_iters; ++i) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = mean_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = mean_at(x2);
    }
  }

  SerreMeasure out;
  out.a = f1 < f2 ? x1 : x2;
  out.b = solve_b(out.a, bisect_iters);
  SerreForms forms(out.a, out.b);
  out.c = forms.cmix();
  out.mean = forms.mean();

  // Residuals of the two potential identities at the returned parameters.
  Real r0 = abs(out.c * forms.ueq0 + (Real(1) - out.c) * forms.unu0);
  Real ra = abs(out.c * (-forms.L) + (Real(1) - out.c) * forms.g0);
  if (!(r0 < Real(tol)) || !(ra < Real(tol)) || !(Real(0) < out.c) || !(out.c < Real(1)))
    throw IterationLimitError("solver residuals exceed the requested tolerance");
  return out;
}

NeedBalReport need_bal_check(const MixtureMeasure& mu, const IntervalUnion& sigma,
                             const std::vector<std::pair<IntPolynomial, Real>>& pool,
                             double tol) {
  CapacityResult cap = capacity(sigma);
  if (!(cap.capacity > Real(1)))
    throw UsageError("the condition needs capacity strictly above 1");
  if (!mu.is_probability(Real(1e-9)))
    throw NotProbabilityError("the condition applies to probability measures");
  for (const auto& [q, w] : pool) {
    if (q.is_zero() || q.degree() < 1) throw UsageError("pool polynomials must be nonconstant");
    mpz_class c = q.content();
    if (c != 1 && c != -1) throw UsageError("pool polynomials must be primitive");
    if (!is_squarefree(q)) throw UsageError("pool polynomials must be squarefree");
    if (!(w > Real(0))) throw UsageError("pool weights must be positive");
  }

  NeedBalReport rep;
  rep.pool = pool;

  Real degsum(0);
  for (const auto& [q, w] : pool) degsum += w * Real(q.degree());
  rep.degree_sum_ok = degsum <= Real(1) + Real(1e-12);

  bool li_ok = true;
  for (const auto& [q, w] : pool) {
    PotentialValue pv = log_integral(q, mu);
    Real v = pv.infinite ? Real(pv.infinity_sign) * Real(1e18) : pv.value;
    rep.log_integrals.push_back(v);
    if (!(v >= Real(-tol))) li_ok = false;
  }

  // Margin u(z) = U^mu(z) + sum a_i log|Q_i(z)|; u is harmonic off the
  // support, roots and infinity, so its maximum sits on supp(mu) or at
  // infinity.  The dense scan covers the support; the box and far circle are
  // diagnostics; the tail term is analytic.
  auto margin_at = [&](const Complex& z) -> Real {
    PotentialValue pv = potential(mu, z);
    if (pv.infinite) return Real(pv.infinity_sign) * Real(1e18);
    Real u = pv.value;
    for (const auto& [q, w] : pool) {
      Complex v = q.evaluate(z);
      if (v.abs2().is_zero()) return Real(-1e18);  // vacuous at a root
      u += w * log_abs(v);
    }
    return u;
  };

  Real lo = mu.support_min() - Real(2);
  Real hi = mu.support_max() + Real(2);
  for (const auto& [q, w] : pool)
    for (const auto& z : all_roots(q)) {
      lo = min(lo, z.re - Real(1));
      hi = max(hi, z.re + Real(1));
    }

  Real worst(-1e18);
  Complex worst_at;
  auto consider = [&](const Complex& z) {
    Real u = margin_at(z);
    if (u > worst) {
      worst = u;
      worst_at = z;
    }
  };

  for (int i = 0; i <= 4096; ++i)
    consider(Complex(lo + (hi - lo) * Real(i) / Real(4096)));
  // Chebyshev clustering toward the support endpoints where densities peak.
  Real pi = const_pi();
  for (const auto& [sa, sb] : mu.support_intervals()) {
    Real sm = (sa + sb) / Real(2), sr = (sb - sa) / Real(2);
    for (int k = 0; k <= 512; ++k)
      consider(Complex(sm + sr * sin(pi * (Real(k) / Real(512) - Real(0.5)))));
  }
  Real h = (hi - lo) / Real(2);
  for (int i = 0; i <= 48; ++i)
    for (int j = 1; j <= 24; ++j)
      consider(Complex(lo + (hi - lo) * Real(i) / Real(48), h * Real(j) / Real(24)));
  Real far = Real(10) * max(abs(lo), abs(hi)) + Real(10);
  for (int k = 0; k < 32; ++k) {
    Real th = Real(2) * pi * Real(k) / Real(32);
    consider(Complex(far * cos(th), far * sin(th)));
  }

  bool tail_ok;
  if (degsum < Real(1) - Real(1e-12)) {
    tail_ok = true;  // margin -> -inf like (degsum - 1) log|z|
  } else {
    Real lc_term(0);
    for (const auto& [q, w] : pool) {
      Real lead(0);
      mpfr_set_z(lead.raw(), q.leading().get_mpz_t(), MPFR_RNDN);
      lc_term += w * log(abs(lead));
    }
    tail_ok = lc_term <= Real(tol);
  }

  rep.worst_margin = worst;
  rep.worst_point = worst_at;
  rep.potential_dominated = worst <= Real(tol) && tail_ok;
  rep.pass = rep.degree_sum_ok && rep.potential_dominated && li_ok;
  return rep;
}

HondaReport honda_bounds(const Real& q, const std::vector<IntPolynomial>& pool,
                         const SmythOptions& opt) {
  long qi = q.to_long();
  if (Real(qi) != q || !is_prime_power(qi))
    throw ParameterError("q must be an integer prime power >= 2");

  HondaReport rep;
  rep.q = q;
  ObjectiveSpec count = ObjectiveSpec::point_count(q);
  Real qq = q;
  ObjectiveSpec neg_count = ObjectiveSpec::custom_fn(
      [qq](const Real& x) { return -log(abs(qq + Real(1) - x)); }, count.domain);
  Interval trunc = count.domain.parts()[0];

  auto dual_with_retry = [&](const ObjectiveSpec& spec) {
    SmythOptions o = opt;
    for (int attempt = 0;; ++attempt) {
      try {
        return optimize_dual(spec, pool, trunc, o);
      } catch (const InfeasibleError&) {
        if (attempt >= 2) throw;
        o.grid_points *= 2;
      }
    }
  };

  rep.lower_cert = optimize_primal(count, pool, opt);
  rep.lower_dual = dual_with_retry(count);
  rep.upper_cert = optimize_primal(neg_count, pool, opt);
  rep.upper_dual = dual_with_retry(neg_count);

  rep.lower_exponent = rep.lower_cert.lambda;
  rep.upper_exponent = -rep.upper_cert.lambda;
  rep.gap_lower = rep.lower_dual.value - rep.lower_cert.lambda;
  rep.gap_upper = rep.upper_dual.value - rep.upper_cert.lambda;
  rep.serre_constant = q + Real(2) * sqrt(q) - Real::parse("0.8984");
  return rep;
}

}  // namespace potpoly
