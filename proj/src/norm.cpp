#include "potpoly/norm.hpp"

#include <algorithm>
#include <functional>

namespace potpoly {

namespace {

// Maximize f on [lo, hi] by golden section; f must be unimodal there for an
// exact answer, otherwise this still returns a value f attains.
Real golden_max(const std::function<Real(const Real&)>& f, Real lo, Real hi, int iters) {
  Real invphi = (sqrt(Real(5)) - Real(1)) / Real(2);
  Real a = lo, b = hi;
  Real x1 = b - invphi * (b - a);
  Real x2 = a + invphi * (b - a);
  Real f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  return max(f1, f2);
}

}  // namespace

Real n_norm(const RealPolynomial& p, long n, const MixtureMeasure& mu,
            const IntervalUnion& sigma) {
  if (!sigma.compact()) throw NotCompactError("n_norm needs a compact set");
  if (n < 0) throw ParameterError("n_norm needs n >= 0");
  if (p.is_zero()) return Real(0);
  if (n > 0 && !mu.is_probability(Real(1e-9)))
    throw UsageError("n_norm weight measure must be a probability measure");

  auto logf = [&](const Real& x) {
    Real px = abs(p.evaluate(x));
    Real lg = px.is_zero() ? Real(-1e30) : log(px);
    if (n > 0) lg += Real(n) * potential(mu, x).value;
    return lg;
  };

  int m = std::max(96, 8 * std::max(0, p.degree()));
  Real pi = const_pi();
  Real best(-1e30);
  bool any = false;
  for (const auto& part : sigma.parts()) {
    Real a = part.lo.to_real(), b = part.hi.to_real();
    Real c = (a + b) / Real(2), r = (b - a) / Real(2);
    std::vector<Real> xs(m + 1, Real(0)), fs(m + 1, Real(0));
    for (int j = 0; j <= m; ++j) {
      xs[j] = c + r * cos(pi * Real(m - j) / Real(m));
      fs[j] = logf(xs[j]);
    }
    for (int j = 0; j <= m; ++j) {
      bool local = (j == 0 || fs[j] >= fs[j - 1]) && (j == m || fs[j] >= fs[j + 1]);
      if (!local) continue;
      Real lo = xs[std::max(0, j - 1)];
      Real hi = xs[std::min(m, j + 1)];
      Real v = lo == hi ? fs[j] : golden_max(logf, lo, hi, 120);
      v = max(v, fs[j]);
      if (!any || v > best) best = v;
      any = true;
    }
  }
  if (!any) throw EmptySetError();
  return exp(best);
}

Real n_norm(const IntPolynomial& p, long n, const MixtureMeasure& mu,
            const IntervalUnion& sigma) {
  return n_norm(RealPolynomial::from_int(p), n, mu, sigma);
}

RealPolynomial approximating_polynomial(const MixtureMeasure& mu, int n) {
  if (n < 1) throw ParameterError("approximating polynomial needs n >= 1");
  if (!mu.is_probability())
    throw UsageError("approximating polynomial needs a probability measure");
  if (!mu.atomless())
    throw UsageError("approximating polynomial needs an atomless measure");
  std::vector<Real> roots;
  roots.reserve(n);
  for (int i = 1; i <= n; ++i) roots.push_back(quantile(mu, Real(i) / Real(n)));
  return RealPolynomial::from_roots(roots);
}

std::vector<Real> real_roots_numeric(const RealPolynomial& p) {
  if (p.is_zero() || p.degree() < 1) return {};
  mpfr_prec_t prec = p.precision() + 64;
  auto roots = aberth_roots(p.coeffs(), prec);
  std::vector<Real> out;
  Real tol = pow(Real(2), -static_cast<long>(prec / 3));
  for (const auto& z : roots) {
    if (abs(z.im) > tol * (Real(1) + abs(z.re)))
      throw UsageError("polynomial has roots off the real axis");
    out.push_back(z.re);
  }
  std::sort(out.begin(), out.end(), [](const Real& a, const Real& b) { return a < b; });
  return out;
}

RealPolynomial prune(const RealPolynomial& p, const IntervalUnion& sigma, int n) {
  if (n < 1) throw ParameterError("prune needs n >= 1");
  if (!sigma.compact()) throw NotCompactError("prune needs a compact set");
  if (p.is_zero() || p.degree() < 1) throw UsageError("prune needs a nonconstant polynomial");
  if (abs(p.coeff(p.degree()) - Real(1)) > Real(1e-20))
    throw UsageError("prune needs a monic polynomial");

  std::vector<Real> roots = real_roots_numeric(p);
  size_t k0 = sigma.parts().size();
  // Roots inside sigma, grouped by component; each nonempty group loses its
  // least and greatest element.
  std::vector<std::vector<Real>> interior(k0);
  Real slack = pow(Real(2), -static_cast<long>(p.precision() / 4));
  for (size_t k = 0; k < k0; ++k) {
    Real a = sigma.parts()[k].lo.to_real(), b = sigma.parts()[k].hi.to_real();
    std::vector<Real> in_comp;
    for (const auto& x : roots)
      if (x >= a - slack && x <= b + slack) in_comp.push_back(x);
    if (in_comp.size() >= 3)
      interior[k].assign(in_comp.begin() + 1, in_comp.end() - 1);
  }
  long total = 0;
  for (const auto& v : interior) total += static_cast<long>(v.size());
  if (total < n)
    throw PruneInfeasibleError("not enough interior roots to prune to degree n");

  // Proportional allocation (largest remainder), capped per component.
  std::vector<long> take(k0, 0);
  std::vector<Real> frac(k0, Real(0));
  long assigned = 0;
  for (size_t k = 0; k < k0; ++k) {
    Real share = Real(n) * Real(static_cast<long>(interior[k].size())) / Real(total);
    take[k] = static_cast<long>(share.to_double());
    if (take[k] > static_cast<long>(interior[k].size()))
      take[k] = static_cast<long>(interior[k].size());
    frac[k] = share - Real(take[k]);
    assigned += take[k];
  }
  while (assigned < n) {
    size_t pick = k0;
    for (size_t k = 0; k < k0; ++k) {
      if (take[k] >= static_cast<long>(interior[k].size())) continue;
      if (pick == k0 || frac[k] > frac[pick]) pick = k;
    }
    take[pick] += 1;
    frac[pick] = Real(-1);
    ++assigned;
  }

  std::vector<Real> chosen;
  chosen.reserve(n);
  for (size_t k = 0; k < k0; ++k) {
    long avail = static_cast<long>(interior[k].size());
    for (long j = 0; j < take[k]; ++j) {
      long idx = static_cast<long>((static_cast<double>(j) + 0.5) * avail / take[k]);
      if (idx >= avail) idx = avail - 1;
      chosen.push_back(interior[k][idx]);
    }
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const Real& a, const Real& b) { return a < b; });
  return RealPolynomial::from_roots(chosen);
}

}  // namespace potpoly
