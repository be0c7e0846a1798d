#include "potpoly/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "potpoly/errors.hpp"
#include "potpoly/lattice.hpp"
#include "potpoly/norm.hpp"

namespace potpoly {

namespace {

constexpr mpfr_prec_t kRemezPrec = 768;
constexpr mpfr_prec_t kForgePrec = 1024;

Real at_prec(const Real& x, mpfr_prec_t prec) {
  Real r{Real::AtPrecision{prec}};
  mpfr_set(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

// Scoped floor on the global working precision.  High-degree node products
// and their root finding need more headroom than the default gives.
struct PrecisionGuard {
  mpfr_prec_t saved;
  explicit PrecisionGuard(mpfr_prec_t want) : saved(Real::working_precision()) {
    if (want > saved) Real::set_working_precision(want);
  }
  ~PrecisionGuard() { Real::set_working_precision(saved); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;
};

// Coefficient vectors with every slot pinned to one precision.  The library
// polynomial arithmetic accumulates at the global working precision, which
// would silently truncate the parity bookkeeping done in the adjuster passes.
using Coeffs = std::vector<Real>;

Coeffs zero_coeffs(size_t n, mpfr_prec_t prec) {
  Coeffs c;
  c.reserve(n);
  for (size_t i = 0; i < n; ++i) c.emplace_back(Real::AtPrecision{prec});
  return c;
}

Coeffs lift_coeffs(const RealPolynomial& p, mpfr_prec_t prec) {
  Coeffs c;
  c.reserve(p.coeffs().size());
  for (const Real& x : p.coeffs()) c.push_back(at_prec(x, prec));
  return c;
}

Coeffs mul(const Coeffs& a, const Coeffs& b, mpfr_prec_t prec) {
  Coeffs c = zero_coeffs(a.size() + b.size() - 1, prec);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

void axpy(Coeffs& a, const Real& s, const Coeffs& b, mpfr_prec_t prec) {
  while (a.size() < b.size()) a.emplace_back(Real::AtPrecision{prec});
  for (size_t i = 0; i < b.size(); ++i) a[i] += s * b[i];
}

// acc = s^e * p
Coeffs pow_mul(const Coeffs& s, int e, const Coeffs& p, mpfr_prec_t prec) {
  Coeffs acc = p;
  for (int i = 0; i < e; ++i) acc = mul(acc, s, prec);
  return acc;
}

Real eval(const Coeffs& c, const Real& x) {
  mpfr_prec_t prec = std::max(x.precision(), c.empty() ? x.precision() : c[0].precision());
  Real acc{Real::AtPrecision{prec}};
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Real eval_deriv(const Coeffs& c, const Real& x) {
  mpfr_prec_t prec = std::max(x.precision(), c.empty() ? x.precision() : c[0].precision());
  Real acc{Real::AtPrecision{prec}};
  for (size_t k = c.size(); k-- > 1;) acc = acc * x + Real(static_cast<long>(k)) * c[k];
  return acc;
}

// Gaussian elimination with partial pivoting; alternation systems are small.
std::vector<Real> solve_dense(std::vector<std::vector<Real>> a, std::vector<Real> b) {
  const int n = static_cast<int>(a.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int i = col + 1; i < n; ++i)
      if (abs(a[i][col]) > abs(a[piv][col])) piv = i;
    if (a[piv][col].is_zero())
      throw IterationLimitError("alternation system became singular");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int i = col + 1; i < n; ++i) {
      if (a[i][col].is_zero()) continue;
      Real f = a[i][col] / a[col][col];
      for (int j = col; j < n; ++j) a[i][j] = a[i][j] - f * a[col][j];
      b[i] = b[i] - f * b[col];
    }
  }
  std::vector<Real> x(n, Real(0));
  for (int i = n - 1; i >= 0; --i) {
    Real s = b[i];
    for (int j = i + 1; j < n; ++j) s = s - a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

struct PointValue {
  Real x;
  Real mag;
};

// Golden-section maximum of |f| on [a, b]; endpoints sampled explicitly.
PointValue golden_max(const std::function<Real(const Real&)>& f, Real a, Real b,
                      int iters) {
  PointValue out{a, abs(f(a))};
  Real vb = abs(f(b));
  if (vb > out.mag) out = {b, vb};
  if (!(a < b)) return out;
  Real invphi = (sqrt(Real(5)) - Real(1)) / Real(2);
  Real c1 = b - invphi * (b - a);
  Real c2 = a + invphi * (b - a);
  Real f1 = abs(f(c1));
  Real f2 = abs(f(c2));
  for (int it = 0; it < iters; ++it) {
    if (f1 > f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - invphi * (b - a);
      f1 = abs(f(c1));
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + invphi * (b - a);
      f2 = abs(f(c2));
    }
  }
  if (f1 > out.mag) out = {c1, f1};
  if (f2 > out.mag) out = {c2, f2};
  return out;
}

// Maximum of |f| on [lo, hi]: uniform scan then local golden refinement.
PointValue max_abs_on(const std::function<Real(const Real&)>& f, const Real& lo,
                      const Real& hi, int scan_points, int golden_iters) {
  if (!(lo < hi)) return {lo, abs(f(lo))};
  std::vector<Real> xs;
  xs.reserve(scan_points);
  std::vector<Real> mags;
  mags.reserve(scan_points);
  Real width = hi - lo;
  int best = 0;
  for (int i = 0; i < scan_points; ++i) {
    Real t = lo + width * Real(i) / Real(scan_points - 1);
    xs.push_back(t);
    mags.push_back(abs(f(t)));
    if (mags[i] > mags[best]) best = i;
  }
  Real a = xs[best == 0 ? 0 : best - 1];
  Real b = xs[best + 1 < scan_points ? best + 1 : best];
  PointValue out = golden_max(f, a, b, golden_iters);
  if (mags[best] > out.mag) out = {xs[best], mags[best]};
  return out;
}

// Scan with endpoint-clustered (Chebyshev-angle) nodes, then golden refine.
PointValue angle_scan_max(const std::function<Real(const Real&)>& f, const Real& a,
                          const Real& b, int npts, int golden_iters,
                          mpfr_prec_t prec) {
  Real mid = (a + b) / Real(2);
  Real rad = (b - a) / Real(2);
  Real pi = const_pi(prec);
  std::vector<Real> xs;
  xs.reserve(npts + 1);
  std::vector<Real> mags;
  mags.reserve(npts + 1);
  int best = 0;
  for (int i = 0; i <= npts; ++i) {
    Real x = mid - rad * cos(pi * Real(i) / Real(npts));
    xs.push_back(x);
    mags.push_back(abs(f(x)));
    if (mags[i] > mags[best]) best = i;
  }
  Real u = xs[best == 0 ? 0 : best - 1];
  Real v = xs[best + 1 < static_cast<int>(xs.size()) ? best + 1 : best];
  PointValue out = golden_max(f, u, v, golden_iters);
  if (mags[best] > out.mag) out = {xs[best], mags[best]};
  return out;
}

// Root of f in (u, v) given sign(f(u)) = su and a sign change across the
// bracket: bisection to a tight enclosure, then guarded Newton polish.
Real bracket_root(const std::function<Real(const Real&)>& f,
                  const std::function<Real(const Real&)>& fp, Real u, Real v,
                  int su) {
  for (int it = 0; it < 90; ++it) {
    Real mid = (u + v) / Real(2);
    int sm = f(mid).sign();
    if (sm == 0) return mid;
    if (sm == su)
      u = mid;
    else
      v = mid;
  }
  Real x = (u + v) / Real(2);
  for (int it = 0; it < 8; ++it) {
    Real fx = f(x);
    Real dx = fp(x);
    if (dx.is_zero()) break;
    Real nx = x - fx / dx;
    if (!(nx > u) || !(nx < v)) break;
    x = nx;
  }
  return x;
}

Decimal decimal_of(const Real& x, int digits = 24) {
  return Decimal::parse(x.str(digits));
}

mpq_class rational_of(const Decimal& d) {
  mpz_class num = d.mantissa();
  mpz_class den = 1;
  mpz_class ten = 10;
  long e = d.exponent();
  if (e >= 0) {
    mpz_class p;
    mpz_pow_ui(p.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(e));
    num *= p;
  } else {
    mpz_pow_ui(den.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(-e));
  }
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

mpz_class round_to_mpz(const Real& x) {
  Real r = round(x);
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), r.raw(), MPFR_RNDN);
  return z;
}

// Equilibrium mass per component, cached: the planner and the forge ladder
// re-solve the same set many times.
std::vector<double> component_weights(const IntervalUnion& sigma) {
  const auto& parts = sigma.parts();
  if (parts.size() == 1) return {1.0};
  static std::map<std::string, std::vector<double>> cache;
  std::string key;
  for (const auto& pt : parts) key += pt.lo.str() + "|" + pt.hi.str() + ";";
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  EquilibriumStructure es = equilibrium_structure(sigma);
  std::vector<double> w;
  double total = 0;
  for (const Real& mss : es.component_mass) {
    double v = std::max(mss.to_double(), 0.0);
    w.push_back(v);
    total += v;
  }
  if (total <= 0)
    w.assign(parts.size(), 1.0 / static_cast<double>(parts.size()));
  else
    for (double& v : w) v /= total;
  cache.emplace(key, w);
  return cache[key];
}

// Largest-remainder seat allocation of `total` across weights.
std::vector<int> allocate_counts(const std::vector<double>& w, int total) {
  const int k = static_cast<int>(w.size());
  std::vector<int> c(k, 0);
  std::vector<std::pair<double, int>> rem;
  int assigned = 0;
  for (int i = 0; i < k; ++i) {
    double exact = w[i] * total;
    double fl = std::floor(exact);
    c[i] = static_cast<int>(fl);
    assigned += c[i];
    rem.push_back({exact - fl, i});
  }
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int i = 0; assigned < total; ++i, ++assigned) c[rem[i % k].second] += 1;
  return c;
}

// Local extremum of |f| in every gap between consecutive roots inside each
// component, including both end gaps.  Carries sign and component index.
struct Anchor {
  Real x;
  Real base;
  int comp;
};

std::vector<Anchor> anchors_of(const std::function<Real(const Real&)>& f,
                               const IntervalUnion& sigma,
                               const std::vector<Real>& roots, mpfr_prec_t prec,
                               int scan_pts, int golden_iters) {
  std::vector<Anchor> out;
  const auto& parts = sigma.parts();
  size_t ri = 0;
  for (size_t ci = 0; ci < parts.size(); ++ci) {
    Real a = parts[ci].lo.to_real(prec);
    Real b = parts[ci].hi.to_real(prec);
    std::vector<Real> local;
    while (ri < roots.size() && roots[ri] <= b) {
      if (roots[ri] >= a) local.push_back(roots[ri]);
      ++ri;
    }
    if (local.empty()) continue;
    std::vector<Real> cuts;
    cuts.reserve(local.size() + 2);
    cuts.push_back(a);
    for (const Real& t : local) cuts.push_back(t);
    cuts.push_back(b);
    for (size_t g = 0; g + 1 < cuts.size(); ++g) {
      PointValue pv = max_abs_on(f, cuts[g], cuts[g + 1], scan_pts, golden_iters);
      out.push_back({pv.x, f(pv.x), static_cast<int>(ci)});
    }
  }
  return out;
}

// Worst over level gaps of the best interior value of prod_k |t - k|.
double level_gap_gamma(int d0) {
  if (d0 < 2) return 1.0;
  double worst = 1e300;
  for (int j = 0; j + 1 < d0; ++j) {
    double best = 0;
    for (int i = 0; i <= 40; ++i) {
      double t = j + static_cast<double>(i) / 40.0;
      double p = 1;
      for (int k = 0; k < d0; ++k) p *= std::fabs(t - k);
      best = std::max(best, p);
    }
    worst = std::min(worst, best);
  }
  return worst;
}

}  // namespace

ChebyshevResult chebyshev(const IntervalUnion& sigma, int r) {
  if (!sigma.compact()) throw NotCompactError("chebyshev polynomial needs a compact set");
  if (r < 0) throw ParameterError("chebyshev degree must be nonnegative");
  const mpfr_prec_t prec = kRemezPrec;
  const auto& parts = sigma.parts();
  if (parts.empty()) throw EmptySetError();
  if (r == 0) {
    ChebyshevResult res;
    res.T = RealPolynomial::constant(Real(1));
    res.alternation_points = {sigma.inf().to_real(prec)};
    res.norm0 = Real(1);
    return res;
  }

  // Reference nodes: classical extrema per component, seats by equilibrium mass.
  std::vector<int> seats = allocate_counts(component_weights(sigma), r + 1);
  Real pi = const_pi(prec);
  std::vector<Real> refs;
  refs.reserve(r + 1);
  for (size_t ci = 0; ci < parts.size(); ++ci) {
    int c = seats[ci];
    if (c <= 0) continue;
    Real a = parts[ci].lo.to_real(prec);
    Real b = parts[ci].hi.to_real(prec);
    Real mid = (a + b) / Real(2);
    Real rad = (b - a) / Real(2);
    if (c == 1) {
      refs.push_back(mid);
      continue;
    }
    for (int t = c - 1; t >= 0; --t)
      refs.push_back(mid + rad * cos(pi * Real(t) / Real(c - 1)));
  }
  std::sort(refs.begin(), refs.end(), [](const Real& a, const Real& b) { return a < b; });

  const int cap = 220 + 30 * r;
  const int per_comp = std::max(48, 12 * r);
  Coeffs tc;
  Real level;
  Real best_excess = Real(-1);
  Real best_level = Real(0);
  for (int rounds = 0; rounds < cap; ++rounds) {
    // Solve sum_k c_k x_i^k + (-1)^i h = x_i^r at the current references.
    std::vector<std::vector<Real>> A(r + 1);
    std::vector<Real> rhs(r + 1);
    for (int i = 0; i <= r; ++i) {
      A[i].reserve(r + 1);
      Real p = at_prec(Real(1), prec);
      for (int k = 0; k < r; ++k) {
        A[i].push_back(p);
        p = p * refs[i];
      }
      A[i].push_back(i % 2 == 0 ? Real(1) : Real(-1));
      rhs[i] = p;
    }
    std::vector<Real> sol = solve_dense(std::move(A), std::move(rhs));
    level = sol[r];
    tc = zero_coeffs(r + 1, prec);
    for (int k = 0; k < r; ++k) tc[k] = at_prec(-sol[k], prec);
    tc[r] = at_prec(Real(1), prec);

    auto evalT = [&](const Real& x) { return eval(tc, x); };
    PointValue best_pt{refs[0], Real(-1)};
    for (const auto& part : parts) {
      PointValue pv = angle_scan_max(evalT, part.lo.to_real(prec),
                                     part.hi.to_real(prec), per_comp, 96, prec);
      if (pv.mag > best_pt.mag) best_pt = pv;
    }

    Real alevel = abs(level);
    if (alevel.is_zero()) throw IterationLimitError("alternation level collapsed to zero");
    Real excess = best_pt.mag - alevel;
    if (best_excess.sign() < 0 || excess < best_excess) {
      best_excess = excess;
      best_level = alevel;
    }
    if (best_pt.mag <= alevel * (Real(1) + Real(1e-26))) {
      ChebyshevResult res;
      res.T = RealPolynomial(tc);
      res.alternation_points = refs;
      res.norm0 = alevel;
      return res;
    }

    // One-point exchange; the replacement must keep the sign alternation.
    int sz = evalT(best_pt.x).sign();
    int sh = level.sign();
    auto ref_sign = [&](int i) { return i % 2 == 0 ? sh : -sh; };
    if (best_pt.x < refs.front()) {
      if (sz == ref_sign(0)) {
        refs.front() = best_pt.x;
      } else {
        refs.insert(refs.begin(), best_pt.x);
        refs.pop_back();
      }
    } else if (best_pt.x > refs.back()) {
      if (sz == ref_sign(r)) {
        refs.back() = best_pt.x;
      } else {
        refs.push_back(best_pt.x);
        refs.erase(refs.begin());
      }
    } else {
      int j = 0;
      while (j + 1 < r && !(best_pt.x < refs[j + 1])) ++j;
      if (sz == ref_sign(j))
        refs[j] = best_pt.x;
      else
        refs[j + 1] = best_pt.x;
    }
  }
  std::ostringstream msg;
  msg << "equioscillation exchange stalled after " << cap
      << " rounds; best level " << best_level.str(12) << ", best excess "
      << best_excess.str(12);
  throw IterationLimitError(msg.str());
}

namespace {

// Probe-measured norm constants: c0 bounds ||T_j|| / kappa^j from above over a
// short ladder, c1 bounds kappa^probe / (pruned alternation floor).
struct NormProbes {
  double c0;
  double c1;
};

NormProbes measure_probes(const IntervalUnion& sigma, double kappa, int k0) {
  NormProbes np{1.0, 1.0};
  const int probe_deg = 8 + 3 * k0;
  double kp = 1.0;
  for (int j = 1; j <= probe_deg; ++j) {
    kp *= kappa;
    ChebyshevResult cr = chebyshev(sigma, j);
    np.c0 = std::max(np.c0, cr.norm0.to_double() / kp);
  }
  const int pr = 8;
  ChebyshevResult big = chebyshev(sigma, pr + 3 * k0);
  RealPolynomial ttil = prune(big.T, sigma, pr);
  Coeffs tcoef = lift_coeffs(ttil, kRemezPrec);
  std::vector<Real> troots = real_roots_numeric(ttil);
  auto f = [&](const Real& x) { return eval(tcoef, x); };
  std::vector<Anchor> xs = anchors_of(f, sigma, troots, kRemezPrec, 13, 80);
  double mint = 1e300;
  for (const Anchor& an : xs) mint = std::min(mint, abs(an.base).to_double());
  if (!(mint > 0) || !std::isfinite(mint)) mint = 1e-300;
  np.c1 = std::max(1.0, std::pow(kappa, pr) / mint);
  return np;
}

struct PlanCand {
  int m;
  int d0;
  double dist;
};

// Feasibility of the signed parity pass: the stepped-product floor at the
// window anchors must dominate the summed perturbation of the ladder terms.
// Deliberately conservative; the forge verifies every sign directly, and a
// window that only squeaks past an optimistic gate tends to fail there.
bool parity_floor_ok(int m, int d0, double kappa, const NormProbes& np) {
  int r = m / d0;
  if (r < 2) return false;
  double lnk = std::log(kappa);
  double lnc = r * lnk - std::log(np.c1) - std::log(2.0) + std::log(0.45) -
               std::log(static_cast<double>(std::max(1, d0 - 1)));
  double lhs = d0 * lnc + std::log(level_gap_gamma(d0));
  double rhs = std::log(4.0) + std::log(0.5 * np.c0) + (m - r + 1) * lnk -
               std::log(kappa - 1.0);
  return lhs >= rhs;
}

std::optional<PlanCand> scan_plan(int n, double kappa, const NormProbes& np) {
  double lnk = std::log(kappa);
  double lnn = std::log(static_cast<double>(n));
  double m_pref = std::max(std::sqrt(static_cast<double>(n)) * lnn,
                           2.4 * lnn / lnk + 1.0);
  // The lattice stage scales steeply with n - m; prefer windows leaving at
  // most 48 low-order coefficients when the floor allows it.
  if (static_cast<double>(n) - 48.0 > m_pref) m_pref = static_cast<double>(n) - 48.0;
  std::optional<PlanCand> best;
  for (int d0 : {2, 3, 4}) {
    for (int m = 2 * d0; m < n; m += d0) {
      if (!((m / 2.0) * lnk > lnn + 1e-12)) continue;
      if (!parity_floor_ok(m, d0, kappa, np)) continue;
      double dist = std::fabs(static_cast<double>(m) - m_pref);
      if (!best || dist < best->dist - 1e-9 ||
          (std::fabs(dist - best->dist) <= 1e-9 && d0 < best->d0))
        best = PlanCand{m, d0, dist};
    }
  }
  return best;
}

}  // namespace

AdjusterPlan plan_parameters(const IntervalUnion& sigma, int n) {
  if (!sigma.compact()) throw NotCompactError("parameter planning needs a compact set");
  CapacityResult cap = capacity(sigma);
  const double kappa = cap.capacity.to_double();
  if (!(kappa > 1.0 + 1e-12)) throw ParameterError("construction needs capacity > 1");
  if (n < 6) throw ParameterError("construction needs degree >= 6");
  const int k0 = static_cast<int>(sigma.component_count());
  NormProbes np = measure_probes(sigma, kappa, k0);
  std::optional<PlanCand> best = scan_plan(n, kappa, np);
  if (!best) {
    for (int np2 = n + 1; np2 <= std::min(8 * n + 64, 4096); ++np2) {
      if (scan_plan(np2, kappa, np)) {
        std::ostringstream msg;
        msg << "no feasible window at degree " << n
            << "; smallest workable degree for this set is " << np2;
        throw ParameterError(msg.str());
      }
    }
    throw ParameterError("no feasible window at degree " + std::to_string(n) +
                         " and none found below degree 4096");
  }
  return AdjusterPlan{best->m, best->d0, best->m / best->d0};
}

AdjusterResult forge_adjuster(const RealPolynomial& p, const IntervalUnion& sigma,
                              int n, int m) {
  if (!sigma.compact()) throw NotCompactError("adjuster needs a compact set");
  CapacityResult cap = capacity(sigma);
  const double kappa = cap.capacity.to_double();
  if (!(kappa > 1.0 + 1e-12)) throw ParameterError("adjuster needs capacity > 1");
  if (m < 2 || m >= n) throw ParameterError("adjuster needs 2 <= m < n");
  if (!((m / 2.0) * std::log(kappa) > std::log(static_cast<double>(n))))
    throw ParameterError("adjuster window is empty: kappa^(m/2) must exceed n");
  AdjusterPlan plan = plan_parameters(sigma, n);
  const int d0 = plan.d0;
  if (m % d0 != 0)
    throw ParameterError("m must be divisible by the step count " + std::to_string(d0));
  const int r = m / d0;
  if (r < 2) throw ParameterError("adjuster needs m >= 2 ladder steps");
  if (p.degree() != n - m) throw DegreeError("adjuster expects an input of degree n - m");
  if (!(abs(p.coeff(p.degree()) - Real(1)).to_double() <= 1e-18))
    throw UsageError("adjuster expects a monic input");
  PrecisionGuard guard(512);
  std::vector<Real> proots_raw = real_roots_numeric(p);
  if (static_cast<int>(proots_raw.size()) != n - m)
    throw UsageError("adjuster input must have all roots real");
  for (const Real& rt : proots_raw)
    if (!sigma.contains(rt, Real(1e-24)))
      throw UsageError("adjuster input must have all roots inside the set");

  const mpfr_prec_t WP = kForgePrec;
  const int k0 = static_cast<int>(sigma.component_count());
  const auto& parts = sigma.parts();
  std::vector<Real> proots;
  proots.reserve(proots_raw.size());
  for (const Real& rt : proots_raw) proots.push_back(at_prec(rt, WP));

  const int ladder_top = std::max(m - r, r + 3 * k0);
  std::vector<Coeffs> T(ladder_top + 1);
  for (int j = 0; j <= ladder_top; ++j) T[j] = lift_coeffs(chebyshev(sigma, j).T, WP);

  RealPolynomial ttil_rp = prune(RealPolynomial(T[r + 3 * k0]), sigma, r);
  Coeffs S = lift_coeffs(ttil_rp, WP);
  std::vector<Real> troots;
  for (const Real& x : real_roots_numeric(ttil_rp)) troots.push_back(at_prec(x, WP));

  auto evalS = [&](const Real& x) { return eval(S, x); };
  std::vector<Anchor> xs = anchors_of(evalS, sigma, troots, WP, 17, 110);
  if (static_cast<int>(xs.size()) < r + 1)
    throw ConstructionFailed("lambda-pass", "too few alternation anchors survived pruning");

  Coeffs Pw = lift_coeffs(p, WP);

  // Window parity pass: in (S + lambda T_j)^d0 * P the degree n-r+j
  // coefficient moves with slope exactly d0, so each even target is hit
  // exactly, and step j never disturbs the coefficients fixed above it.
  // Each step has two admissible targets (the even integers on either side
  // of the coefficient).  When neither keeps every alternation sign, the
  // coefficient can only be redrawn by flipping an earlier step to its
  // other target, so the pass backtracks over that binary choice tree.
  struct LamStep {
    int j;
    Coeffs S_before;
    Real lam_up;
    int choice;  // 0 = nearest above, 1 = the even below it
  };
  std::vector<LamStep> lam_stack;
  auto lambda_keeps_signs = [&](const Real& lam, int j, Coeffs& out) -> bool {
    out = S;
    if (!lam.is_zero()) {
      axpy(out, lam, T[j], WP);
      for (const Anchor& an : xs)
        if (eval(out, an.x).sign() != an.base.sign()) return false;
    }
    return true;
  };
  {
    int budget = 40 * r;
    int j = r - 1;
    while (j >= 1) {
      if (--budget < 0)
        throw ConstructionFailed("lambda-pass",
                                 "parity backtracking budget exhausted at degree " +
                                     std::to_string(n - r + j));
      Coeffs A = pow_mul(S, d0, Pw, WP);
      Real c = A[n - r + j];
      Real lam_up = (Real(2) * ceil(c / Real(2)) - c) / Real(d0);
      Coeffs S2;
      if (lambda_keeps_signs(lam_up, j, S2)) {
        lam_stack.push_back({j, S, lam_up, 0});
        S = std::move(S2);
        --j;
        continue;
      }
      if (lambda_keeps_signs(lam_up - Real(2) / Real(d0), j, S2)) {
        lam_stack.push_back({j, S, lam_up, 1});
        S = std::move(S2);
        --j;
        continue;
      }
      bool resumed = false;
      while (!lam_stack.empty()) {
        LamStep st = std::move(lam_stack.back());
        lam_stack.pop_back();
        S = st.S_before;
        if (st.choice == 1) continue;  // both targets of this step exhausted
        Coeffs S3;
        if (lambda_keeps_signs(st.lam_up - Real(2) / Real(d0), st.j, S3)) {
          lam_stack.push_back({st.j, std::move(st.S_before), st.lam_up, 1});
          S = std::move(S3);
          j = st.j - 1;
          resumed = true;
          break;
        }
      }
      if (!resumed)
        throw ConstructionFailed("lambda-pass",
                                 "window parity step lost an alternation sign at degree " +
                                     std::to_string(n - r + j));
    }
  }

  Real minT = Real(-1);
  for (Anchor& an : xs) {
    an.base = eval(S, an.x);
    Real a = abs(an.base);
    if (minT.sign() < 0 || a < minT) minT = a;
  }
  if (!(minT.sign() > 0))
    throw ConstructionFailed("lambda-pass", "alternation values collapsed after parity pass");

  Real km = pow(at_prec(cap.capacity, WP), static_cast<long>(m));
  const double cmuls[] = {0.45, 0.6, 0.3, 0.75, 0.2};
  std::string last_fail = "level ladder never produced a verified window";

  for (double cm : cmuls) {
    Real cstep = Real(cm) * minT / Real(static_cast<long>(std::max(1, d0 - 1)));

    // Stepped product: d0 vertically shifted copies of S; each keeps one root
    // per alternation bracket because every level stays below the anchor floor.
    std::vector<Real> qroots;
    bool ladder_ok = true;
    for (int k = 0; k < d0 && ladder_ok; ++k) {
      Coeffs fk = S;
      fk[0] = fk[0] - Real(static_cast<long>(k)) * cstep;
      int found = 0;
      for (size_t i = 0; i + 1 < xs.size(); ++i) {
        if (xs[i].comp != xs[i + 1].comp) continue;
        Real fu = eval(fk, xs[i].x);
        Real fv = eval(fk, xs[i + 1].x);
        if (fu.sign() == 0 || fv.sign() == 0 || fu.sign() == fv.sign()) {
          ladder_ok = false;
          break;
        }
        auto f = [&](const Real& x) { return eval(fk, x); };
        auto fd = [&](const Real& x) { return eval_deriv(fk, x); };
        qroots.push_back(bracket_root(f, fd, xs[i].x, xs[i + 1].x, fu.sign()));
        ++found;
      }
      if (found != r) ladder_ok = false;
    }
    if (!ladder_ok || static_cast<int>(qroots.size()) != m) {
      last_fail = "level ladder lost a root bracket";
      continue;
    }
    std::sort(qroots.begin(), qroots.end(),
              [](const Real& a, const Real& b) { return a < b; });

    Coeffs Q0{at_prec(Real(1), WP)};
    for (int k = 0; k < d0; ++k) {
      Coeffs fk = S;
      fk[0] = fk[0] - Real(static_cast<long>(k)) * cstep;
      Q0 = mul(Q0, fk, WP);
    }

    auto evalQ0 = [&](const Real& x) { return eval(Q0, x); };
    std::vector<Anchor> ys = anchors_of(evalQ0, sigma, qroots, WP, 17, 110);
    Real minQ0y = Real(-1);
    for (const Anchor& an : ys) {
      Real a = abs(an.base);
      if (minQ0y.sign() < 0 || a < minQ0y) minQ0y = a;
    }
    if (!(minQ0y.sign() > 0)) {
      last_fail = "stepped product vanished at a window anchor";
      continue;
    }

    // Parity pass on the remaining window: B = Q1 * P is updated linearly, so
    // the degree n-m+j coefficient lands exactly on the even lattice.
    Coeffs Q1 = Q0;
    Coeffs B = mul(Q0, Pw, WP);
    bool eps_ok = true;
    for (int j = m - r; j >= 0 && eps_ok; --j) {
      Real c = B[n - m + j];
      Real ep = Real(2) * round(c / Real(2)) - c;
      if (ep.is_zero()) continue;
      auto try_eps = [&](const Real& e) -> bool {
        Coeffs Qt = Q1;
        axpy(Qt, e, T[j], WP);
        for (const Anchor& an : ys)
          if (eval(Qt, an.x).sign() != an.base.sign()) return false;
        Q1 = std::move(Qt);
        Coeffs tp = mul(T[j], Pw, WP);
        axpy(B, e, tp, WP);
        return true;
      };
      // Same two-sided retry as the window pass: the even target on the
      // other side of the coefficient perturbs with the opposite sign.
      if (!try_eps(ep)) {
        Real ep2 = ep + (ep.sign() > 0 ? Real(-2) : Real(2));
        if (!try_eps(ep2)) eps_ok = false;
      }
    }
    Real minQ1y = Real(-1);
    if (eps_ok)
      for (const Anchor& an : ys) {
        Real a = abs(eval(Q1, an.x));
        if (minQ1y.sign() < 0 || a < minQ1y) minQ1y = a;
      }
    if (!eps_ok || !(minQ1y.sign() > 0)) {
      last_fail = "parity perturbation flipped a window anchor";
      continue;
    }

    Real parity_defect = Real(0);
    for (int i = n - m; i <= n - 1; ++i) {
      Real d = abs(B[i] - Real(2) * round(B[i] / Real(2)));
      parity_defect = max(parity_defect, d);
    }
    if (parity_defect.to_double() > 1e-18)
      throw ConstructionFailed("parity", "window coefficients drifted off the even lattice");

    // Even offset: only the degree n-m product coefficient moves, by k*a, so
    // the window parity survives any k.  Pigeonhole over k separates the
    // roots from the input roots and the component boundaries.
    Real num = minQ1y - Real(0.25) * minQ0y;
    if (!(num.sign() > 0)) {
      last_fail = "window anchors too weak after the parity pass";
      continue;
    }
    Real a_exact = Real(2) * max(Real(1), floor(minQ0y / (Real(8L * m) * Real(static_cast<long>(k0 + n)))));
    long kmax = static_cast<long>(std::min(
        static_cast<double>(static_cast<long>(m) * (k0 + n)),
        std::max(0.0, floor(num / a_exact).to_double())));

    std::vector<Real> vbeta;
    for (const Real& rt : proots) vbeta.push_back(eval(Q1, rt));
    for (const auto& part : parts) {
      vbeta.push_back(eval(Q1, part.lo.to_real(WP)));
      vbeta.push_back(eval(Q1, part.hi.to_real(WP)));
    }
    std::vector<std::pair<double, long>> scored;
    scored.reserve(kmax + 1);
    for (long k = 0; k <= kmax; ++k) {
      Real ka = Real(k) * a_exact;
      double s = 1e300;
      for (const Real& v : vbeta) s = std::min(s, abs(v + ka).to_double());
      scored.push_back({s, k});
    }
    std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      return x.second < y.second;
    });

    const int tries = static_cast<int>(std::min<size_t>(24, scored.size()));
    for (int ti = 0; ti < tries; ++ti) {
      const long kshift = scored[ti].second;
      Real off = Real(kshift) * a_exact;
      Coeffs Q = Q1;
      Q[0] = Q[0] + off;

      bool ok = true;
      for (const Anchor& an : ys) {
        if (eval(Q, an.x).sign() != an.base.sign()) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;

      auto fQ = [&](const Real& x) { return eval(Q, x); };
      auto fQd = [&](const Real& x) { return eval_deriv(Q, x); };
      std::vector<Real> roots2;
      for (size_t i = 0; i + 1 < ys.size(); ++i) {
        if (ys[i].comp != ys[i + 1].comp) continue;
        Real fu = eval(Q, ys[i].x);
        roots2.push_back(bracket_root(fQ, fQd, ys[i].x, ys[i + 1].x, fu.sign()));
      }
      if (static_cast<int>(roots2.size()) != m) continue;

      // Margins: distance from each new root to the input roots and to the
      // boundary of its component.
      std::vector<Real> margins;
      margins.reserve(roots2.size());
      bool pos = true;
      for (const Real& rt2 : roots2) {
        Real mg = Real(-1);
        auto it = std::upper_bound(proots.begin(), proots.end(), rt2,
                                   [](const Real& a, const Real& b) { return a < b; });
        if (it != proots.end()) mg = abs(*it - rt2);
        if (it != proots.begin()) {
          Real d2 = abs(rt2 - *std::prev(it));
          if (mg.sign() < 0 || d2 < mg) mg = d2;
        }
        int ci = sigma.component_of(rt2);
        if (ci >= 0) {
          Real d3 = min(rt2 - parts[ci].lo.to_real(WP), parts[ci].hi.to_real(WP) - rt2);
          if (mg.sign() < 0 || d3 < mg) mg = d3;
        }
        if (!(mg.sign() > 0)) {
          pos = false;
          break;
        }
        margins.push_back(mg);
      }
      if (!pos) continue;

      // Envelope check: |Q| / kappa^m against distance to the nearest new
      // root from below, and alone from above; an offset grid must agree
      // within slack 2 or the grids are considered too coarse to certify.
      auto dist_to_roots = [&](const Real& x) -> Real {
        auto it = std::upper_bound(roots2.begin(), roots2.end(), x,
                                   [](const Real& a, const Real& b) { return a < b; });
        Real best(-1);
        if (it != roots2.end()) best = abs(*it - x);
        if (it != roots2.begin()) {
          Real d2 = abs(x - *std::prev(it));
          if (best.sign() < 0 || d2 < best) best = d2;
        }
        return best;
      };
      const int npA = 16 * (m + 4);
      Real pi_w = const_pi(WP);
      auto scan_grid = [&](bool offset_grid, Real& lo_out, Real& hi_out) {
        lo_out = Real(-1);
        hi_out = Real(0);
        for (const auto& part : parts) {
          Real aa = part.lo.to_real(WP);
          Real bb = part.hi.to_real(WP);
          Real mid = (aa + bb) / Real(2);
          Real rad = (bb - aa) / Real(2);
          for (int i = 0; i <= npA; ++i) {
            if (offset_grid && i == npA) continue;
            Real ang = (Real(i) + (offset_grid ? Real(0.5) : Real(0))) * pi_w / Real(npA);
            Real x = mid - rad * cos(ang);
            Real q = abs(eval(Q, x));
            Real rh = q / km;
            if (rh > hi_out) hi_out = rh;
            Real d = dist_to_roots(x);
            if (d.sign() > 0) {
              Real rl = q / (km * d);
              if (lo_out.sign() < 0 || rl < lo_out) lo_out = rl;
            }
          }
        }
      };
      Real loA, hiA, loB, hiB;
      scan_grid(false, loA, hiA);
      scan_grid(true, loB, hiB);
      if (!(loA.sign() > 0) || !(loB.sign() > 0)) continue;
      if (hiB > hiA * Real(2) || loB < loA / Real(2)) continue;

      Coeffs B2 = B;
      axpy(B2, off, Pw, WP);
      Real pd = Real(0);
      for (int i = n - m; i <= n - 1; ++i)
        pd = max(pd, abs(B2[i] - Real(2) * round(B2[i] / Real(2))));
      if (pd.to_double() > 1e-18) continue;

      AdjusterResult res;
      res.Q = RealPolynomial(Q);
      res.roots = roots2;
      res.margins = margins;
      res.norm_window = {min(loA, loB), max(hiA, hiB)};
      res.parity_defect = pd;
      res.shift = kshift;
      return res;
    }
    last_fail = "no offset produced a certified window";
  }
  throw ConstructionFailed("separation", last_fail);
}

namespace {

ConstructionReport construct_attempt(const MixtureMeasure& mu,
                                     const IntervalUnion& sigma, int n, int mc,
                                     int k0) {
  const mpfr_prec_t WP = kForgePrec;
  PrecisionGuard guard(512);
  RealPolynomial pfull = approximating_polynomial(mu, n - mc + 2 * k0);
  RealPolynomial ptil = [&]() -> RealPolynomial {
    try {
      return prune(pfull, sigma, n - mc);
    } catch (const PruneInfeasibleError& e) {
      throw ConstructionFailed("prune", e.what());
    }
  }();
  AdjusterResult adj = forge_adjuster(ptil, sigma, n, mc);

  Coeffs Qc = lift_coeffs(adj.Q, WP);
  Coeffs Pc = lift_coeffs(ptil, WP);
  Coeffs A = mul(Qc, Pc, WP);
  if (static_cast<int>(A.size()) != n + 1 ||
      abs(A[n] - Real(1)).to_double() > 1e-15)
    throw ConstructionFailed("assembly", "adjusted product is not monic of full degree");

  std::vector<mpz_class> co(n + 1, mpz_class(0));
  co[n] = 1;
  Real round_defect = Real(0);
  for (int i = n - mc; i <= n - 1; ++i) {
    mpz_class e = 2 * round_to_mpz(A[i] / Real(2));
    co[i] = e;
    round_defect = max(round_defect, abs(A[i] - real_from_mpz(e, WP)));
  }
  if (round_defect.to_double() > 1e-9)
    throw ConstructionFailed("parity-round",
                             "window coefficients are not close to even integers");

  // Low block: quarter the remaining coefficients, center at one half, move
  // to nearby integers along a squarefree basis, then undo the scaling.  The
  // constant term lands at 2 mod 4.
  Coeffs gl = zero_coeffs(n - mc, WP);
  for (int i = 0; i < n - mc; ++i) gl[i] = A[i] / Real(4);
  gl[0] = gl[0] + Real(1) / Real(2);
  IntPolynomial G = squarefree_small_norm(mu, sigma, n - mc);
  AdjustmentResult ar = adjust_to_integer(RealPolynomial(gl), G);
  for (int i = 0; i < n - mc; ++i) co[i] = 4 * ar.R.coeff(i);
  co[0] -= 2;
  IntPolynomial Pn{co};
  if (!eisenstein_check(Pn, 2))
    throw ConstructionFailed("eisenstein", "assembled polynomial is not eisenstein at 2");

  // Root certification by exact rational sign changes of Pn itself.  The
  // approximate roots of the real product only guide probe placement.
  std::vector<Real> aroots;
  for (const Real& x : adj.roots) aroots.push_back(at_prec(x, WP));
  for (const Real& x : real_roots_numeric(ptil)) aroots.push_back(at_prec(x, WP));
  std::sort(aroots.begin(), aroots.end(),
            [](const Real& a, const Real& b) { return a < b; });
  if (static_cast<int>(aroots.size()) != n)
    throw ConstructionFailed("root-certification", "expected n approximate roots");

  auto evalA = [&](const Real& x) { return eval(A, x); };
  const auto& parts = sigma.parts();
  struct Probe {
    Real x;
    Decimal d;
    int sign;
  };
  auto make_probe = [&](const Real& x) -> Probe {
    Decimal d = decimal_of(x);
    return Probe{x, d, Pn.sign_at(rational_of(d))};
  };

  std::vector<RootInterval> certified;
  std::vector<Real> margins;
  size_t ri = 0;
  int total_changes = 0;
  bool escape_suspected = false;
  for (size_t ci = 0; ci < parts.size(); ++ci) {
    Real lo_c = parts[ci].lo.to_real(WP);
    Real hi_c = parts[ci].hi.to_real(WP);
    std::vector<Real> rs;
    while (ri < aroots.size() && aroots[ri] <= hi_c) {
      if (aroots[ri] >= lo_c) rs.push_back(aroots[ri]);
      ++ri;
    }
    if (rs.empty()) continue;
    const int expect = static_cast<int>(rs.size());

    std::vector<Probe> probes;
    probes.push_back(make_probe((lo_c + rs.front()) / Real(2)));
    for (size_t i = 0; i + 1 < rs.size(); ++i)
      probes.push_back(make_probe(max_abs_on(evalA, rs[i], rs[i + 1], 9, 64).x));
    probes.push_back(make_probe((rs.back() + hi_c) / Real(2)));

    auto count_changes = [&]() {
      int c = 0;
      for (size_t i = 0; i + 1 < probes.size(); ++i)
        if (probes[i].sign != 0 && probes[i].sign == -probes[i + 1].sign) ++c;
      return c;
    };
    int changes = count_changes();
    // Refinement: a drifted root shows up as a same-sign pair; probing the
    // midpoints (and a boundary ladder) recovers the missing alternation.
    Real width = hi_c - lo_c;
    for (int round = 0; changes < expect && round < 6; ++round) {
      std::vector<Probe> extra;
      for (size_t i = 0; i + 1 < probes.size(); ++i)
        if (probes[i].sign == probes[i + 1].sign || probes[i].sign == 0)
          extra.push_back(make_probe((probes[i].x + probes[i + 1].x) / Real(2)));
      Real step = width / Real(1L << (4 + round));
      extra.push_back(make_probe(lo_c + step));
      extra.push_back(make_probe(hi_c - step));
      for (Probe& pr2 : extra) probes.push_back(std::move(pr2));
      std::sort(probes.begin(), probes.end(),
                [](const Probe& a, const Probe& b) { return a.x < b.x; });
      probes.erase(std::unique(probes.begin(), probes.end(),
                               [](const Probe& a, const Probe& b) {
                                 return !(a.x < b.x) && !(b.x < a.x);
                               }),
                   probes.end());
      changes = count_changes();
      if (probes.size() > 4000) break;
    }
    total_changes += changes;
    if (changes < expect) {
      // Look just outside the component: a sign change there means a root left.
      Real step = width / Real(16);
      Probe outl = make_probe(lo_c - step);
      Probe outr = make_probe(hi_c + step);
      if (outl.sign != 0 && outl.sign == -probes.front().sign) escape_suspected = true;
      if (outr.sign != 0 && outr.sign == -probes.back().sign) escape_suspected = true;
    }

    for (size_t i = 0; i + 1 < probes.size(); ++i) {
      if (probes[i].sign == 0 || probes[i].sign != -probes[i + 1].sign) continue;
      RootInterval iv;
      iv.lo = probes[i].d;
      iv.hi = probes[i + 1].d;
      iv.multiplicity = 1;
      iv.real = true;
      iv.approx = Complex{(probes[i].x + probes[i + 1].x) / Real(2), Real(0)};
      certified.push_back(iv);
      Real u = probes[i].d.to_real(WP);
      Real v = probes[i + 1].d.to_real(WP);
      margins.push_back(min(u - lo_c, hi_c - v));
    }
  }

  if (total_changes != n) {
    if (escape_suspected)
      throw RootEscapeError(
          "a root of the assembled polynomial left the target set; retry with a larger degree");
    throw ConstructionFailed("root-certification",
                             "could not certify n sign changes inside the set");
  }

  RootSet rootset;
  rootset.roots = std::move(certified);
  rootset.complex_count = 0;
  rootset.degree = n;

  MixtureMeasure nu = counting_measure(Pn);
  Real cdfd = cdf_distance(nu, mu);
  Real trace = real_from_mpz(-Pn.coeff(n - 1), 0) / Real(static_cast<long>(n));

  ConstructionReport rep;
  rep.P_n = Pn;
  rep.degree = n;
  rep.roots = std::move(rootset);
  rep.membership_margins = std::move(margins);
  rep.cdf_dist = cdfd;
  rep.eisenstein_prime = 2;
  rep.trace_ratio = trace;
  return rep;
}

}  // namespace

ConstructionReport construct(const MixtureMeasure& mu, const IntervalUnion& sigma,
                             int n, const std::vector<IntPolynomial>& pool) {
  if (!sigma.compact()) throw NotCompactError("construction needs a compact set");
  CapacityResult cap = capacity(sigma);
  if (!(cap.capacity.to_double() > 1.0 + 1e-12))
    throw ParameterError("construction needs capacity > 1");
  if (!mu.is_probability()) throw NotProbabilityError("construction needs a probability measure");
  if (!mu.atomless()) throw UsageError("construction needs an atomless measure");
  HolderEstimate he = holder_estimate(mu);
  if (!(he.eta.to_double() > 0))
    throw UsageError("construction needs a measure with a positive regularity exponent");
  if (!sigma.contains(mu.support_min(), Real(1e-18)) ||
      !sigma.contains(mu.support_max(), Real(1e-18)))
    throw UsageError("construction needs the measure supported inside the set");
  for (const IntPolynomial& q : pool) {
    if (q.degree() <= 0 && q.coeff(0) == 0)
      throw UsageError("pool polynomials must be nonzero");
    PotentialValue li = log_integral(q, mu);
    bool neg = li.infinite ? li.infinity_sign < 0 : li.value.to_double() < -1e-9;
    if (neg)
      throw UsageError("pool polynomial has negative logarithmic size against the target measure");
  }

  AdjusterPlan plan = plan_parameters(sigma, n);
  const int k0 = static_cast<int>(sigma.component_count());
  const double lnk = std::log(cap.capacity.to_double());

  // Retry ladder: escalate the window upward first, since a wider window only
  // strengthens the parity floor; one step below covers planner overshoot.
  std::vector<int> mcs{plan.m, plan.m + plan.d0, plan.m - plan.d0};
  for (int step = 2; step <= 5; ++step) mcs.push_back(plan.m + step * plan.d0);

  std::exception_ptr last_error;
  int attempts = 0;
  for (int mc : mcs) {
    if (mc < 2 * plan.d0 || mc >= n) continue;
    if (!((mc / 2.0) * lnk > std::log(static_cast<double>(n)))) continue;
    if (attempts == 6) break;
    ++attempts;
    try {
      return construct_attempt(mu, sigma, n, mc, k0);
    } catch (const ConstructionFailed&) {
      last_error = std::current_exception();
    }
  }
  if (last_error) std::rethrow_exception(last_error);
  throw ConstructionFailed("plan", "no window size was admissible at this degree");
}

}  // namespace potpoly
