#include "potpoly/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>

namespace potpoly {

namespace {

Real dot(const std::vector<Real>& a, const std::vector<Real>& b) {
  Real s(0);
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(std::vector<Real>& y, const Real& k, const std::vector<Real>& x) {
  for (size_t i = 0; i < y.size(); ++i) y[i] += k * x[i];
}

mpz_class nearest_int(const Real& x) {
  Real r;
  mpfr_rint(r.raw(), x.raw(), MPFR_RNDN);
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), r.raw(), MPFR_RNDN);
  return z;
}

// Gram-Schmidt data for a basis of real vectors.
struct Gso {
  std::vector<std::vector<Real>> bstar;
  std::vector<std::vector<Real>> mu;  // lower triangular
  std::vector<Real> B;                // |bstar_i|^2
};

Gso gram_schmidt(const std::vector<std::vector<Real>>& emb) {
  size_t d = emb.size();
  Gso g;
  g.bstar = emb;
  g.mu.assign(d, std::vector<Real>(d, Real(0)));
  g.B.assign(d, Real(0));
  for (size_t i = 0; i < d; ++i) {
    for (size_t j = 0; j < i; ++j) {
      g.mu[i][j] = dot(emb[i], g.bstar[j]) / g.B[j];
      axpy(g.bstar[i], -g.mu[i][j], g.bstar[j]);
    }
    g.B[i] = dot(g.bstar[i], g.bstar[i]);
    if (g.B[i].is_zero())
      throw VerificationError("lattice basis is linearly dependent");
  }
  return g;
}

}  // namespace

void lll_reduce(std::vector<IntPolynomial>& polys, std::vector<std::vector<Real>>& emb,
                double delta) {
  size_t d = emb.size();
  if (d != polys.size()) throw UsageError("basis tracking size mismatch");
  if (d <= 1) return;
  Gso g = gram_schmidt(emb);
  auto& mu = g.mu;
  auto& B = g.B;
  Real dlt(delta);
  Real half(0.5);

  auto red = [&](size_t k, size_t l) {
    if (!(abs(mu[k][l]) > half)) return;
    mpz_class q = nearest_int(mu[k][l]);
    Real rq = real_from_mpz(q);
    polys[k] = polys[k] - q * polys[l];
    axpy(emb[k], -rq, emb[l]);
    for (size_t j = 0; j < l; ++j) mu[k][j] -= rq * mu[l][j];
    mu[k][l] -= rq;
  };

  size_t k = 1;
  long guard = 0, guard_max = 20000L * static_cast<long>(d * d);
  while (k < d) {
    if (++guard > guard_max)
      throw VerificationError("lattice reduction did not converge");
    red(k, k - 1);
    if (B[k] < (dlt - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1]) {
      std::swap(polys[k], polys[k - 1]);
      std::swap(emb[k], emb[k - 1]);
      Real m = mu[k][k - 1];
      Real Bnew = B[k] + m * m * B[k - 1];
      if (Bnew.is_zero()) throw VerificationError("lattice basis is linearly dependent");
      mu[k][k - 1] = m * B[k - 1] / Bnew;
      B[k] = B[k - 1] * B[k] / Bnew;
      B[k - 1] = Bnew;
      for (size_t j = 0; j + 1 < k; ++j) std::swap(mu[k][j], mu[k - 1][j]);
      for (size_t i = k + 1; i < d; ++i) {
        Real t = mu[i][k];
        mu[i][k] = mu[i][k - 1] - m * t;
        mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k];
      }
      if (k > 1) --k;
    } else {
      for (size_t l = k - 1; l-- > 0;) red(k, l);
      ++k;
    }
  }
}

std::vector<mpz_class> babai_nearest(const std::vector<std::vector<Real>>& emb,
                                     const std::vector<Real>& target) {
  size_t d = emb.size();
  Gso g = gram_schmidt(emb);
  std::vector<Real> t = target;
  std::vector<mpz_class> c(d, mpz_class(0));
  for (size_t i = d; i-- > 0;) {
    mpz_class ci = nearest_int(dot(t, g.bstar[i]) / g.B[i]);
    c[i] = ci;
    if (ci != 0) axpy(t, -real_from_mpz(ci), emb[i]);
  }
  return c;
}

// ---------------------------------------------------------------------------
// adjust_to_integer.

AdjustmentResult adjust_to_integer(const RealPolynomial& q, const IntPolynomial& p) {
  if (p.is_zero() || p.degree() < 1)
    throw UsageError("adjustment needs a nonconstant modulus polynomial");
  int n = p.degree();
  if (!q.is_zero() && q.degree() >= n)
    throw DegreeError("adjustment needs deg Q < deg P");
  if (!is_squarefree(p)) throw NotSquarefreeError("adjustment needs squarefree P");

  mpfr_prec_t prec =
      std::max<mpfr_prec_t>(q.is_zero() ? 0 : q.precision(), Real::working_precision()) + 64;
  auto roots = all_roots(p, prec);
  RealPolynomial pd = RealPolynomial::from_int(p.derivative(), prec);
  std::vector<Complex> dpv;
  dpv.reserve(roots.size());
  for (const auto& a : roots) dpv.push_back(pd.evaluate(a));

  Real s2 = sqrt(Real(2));
  // Embedding: value/(P' value) per root; conjugate pairs fold into two real
  // coordinates so the l2 norm matches sum |beta_j|^2 over all roots.
  auto embed = [&](const std::vector<Complex>& vals) {
    std::vector<Real> e;
    for (size_t j = 0; j < roots.size(); ++j) {
      Complex v = vals[j] / dpv[j];
      if (roots[j].im.is_zero())
        e.push_back(v.re);
      else if (roots[j].im.sign() > 0) {
        e.push_back(s2 * v.re);
        e.push_back(s2 * v.im);
      }
    }
    return e;
  };
  auto values_of_real = [&](const RealPolynomial& s) {
    std::vector<Complex> v;
    v.reserve(roots.size());
    for (const auto& a : roots) v.push_back(s.evaluate(a));
    return v;
  };

  // Seed: nearest integer polynomial coefficientwise.
  std::vector<mpz_class> seed(n, mpz_class(0));
  for (int i = 0; i <= (q.is_zero() ? -1 : q.degree()); ++i) seed[i] = nearest_int(q.coeff(i));
  IntPolynomial r = IntPolynomial(seed);
  RealPolynomial rem = q - RealPolynomial::from_int(r, prec);

  if (!rem.is_zero()) {
    // Monomial lattice reduced in the evaluation embedding, then a
    // nearest-plane pass against the remainder.
    std::vector<IntPolynomial> basis;
    std::vector<std::vector<Real>> emb;
    std::vector<Complex> powers(roots.size(), Complex(Real(1)));
    for (int i = 0; i < n; ++i) {
      basis.push_back(IntPolynomial::monomial(mpz_class(1), i));
      emb.push_back(embed(powers));
      for (size_t j = 0; j < roots.size(); ++j) powers[j] = powers[j] * roots[j];
    }
    lll_reduce(basis, emb, 0.99);
    auto c = babai_nearest(emb, embed(values_of_real(rem)));
    for (size_t i = 0; i < c.size(); ++i)
      if (c[i] != 0) r = r + c[i] * basis[i];
  }

  AdjustmentResult out;
  out.R = r;
  RealPolynomial diff = q - RealPolynomial::from_int(r, prec);
  Real l1(0);
  std::vector<Complex> betas;
  betas.reserve(roots.size());
  for (size_t j = 0; j < roots.size(); ++j) {
    Complex b = diff.is_zero() ? Complex(Real(0)) : diff.evaluate(roots[j]) / dpv[j];
    betas.push_back(b);
    l1 += b.abs();
  }
  out.betas = std::move(betas);
  out.beta_l1 = l1;

  // Residual of the Lagrange identity Q - R = sum beta_j P/(z - alpha_j).
  std::vector<Complex> acc(n, Complex(Real(0)));
  for (size_t j = 0; j < roots.size(); ++j) {
    // Synthetic division P/(z - alpha_j), coefficients ascending.
    std::vector<Complex> pj(n, Complex(Real(0)));
    Complex carry(real_from_mpz(p.leading(), prec));
    pj[n - 1] = carry;
    for (int i = n - 1; i >= 1; --i) {
      carry = carry * roots[j] + Complex(real_from_mpz(p.coeff(i), prec));
      pj[i - 1] = carry;
    }
    for (int i = 0; i < n; ++i) acc[i] = acc[i] + out.betas[j] * pj[i];
  }
  Real resid(0);
  for (int i = 0; i < n; ++i) {
    Complex want = Complex(diff.is_zero() || i > diff.degree() ? Real(0) : diff.coeff(i));
    resid = max(resid, (acc[i] - want).abs());
  }
  out.residual = resid;
  return out;
}

// ---------------------------------------------------------------------------
// small_norm_basis.

NormBasis small_norm_basis(const MixtureMeasure& mu, const IntervalUnion& sigma, int n,
                           double delta) {
  if (n < 0) throw ParameterError("basis size needs n >= 0");
  if (!sigma.compact()) throw NotCompactError("norm basis needs a compact set");
  if (!mu.is_probability()) throw UsageError("norm basis needs a probability measure");
  if (!mu.atomless())
    throw UsageError("quantile points of an atomic measure collide");

  int pts = n + 1;
  std::vector<Real> alpha(pts, Real(0)), w(pts, Real(0));
  for (int i = 1; i <= pts; ++i) alpha[i - 1] = quantile(mu, Real(i) / Real(pts));
  for (int i = 0; i + 1 < pts; ++i)
    if (!(alpha[i] < alpha[i + 1]))
      throw UsageError("quantile points of the measure collide");
  for (int i = 0; i < pts; ++i) w[i] = exp(Real(n) * potential(mu, alpha[i]).value);

  std::vector<IntPolynomial> basis;
  std::vector<std::vector<Real>> emb;
  for (int j = 0; j <= n; ++j) {
    basis.push_back(IntPolynomial::monomial(mpz_class(1), j));
    std::vector<Real> e(pts, Real(0));
    for (int i = 0; i < pts; ++i) e[i] = w[i] * pow(alpha[i], static_cast<long>(j));
    emb.push_back(std::move(e));
  }
  lll_reduce(basis, emb, delta);

  NormBasis nb;
  nb.polynomials = std::move(basis);
  nb.product_log = Real(0);
  for (const auto& p : nb.polynomials) {
    Real nm = n_norm(p, n, mu, sigma);
    nb.product_log += log(nm);
    nb.norms.push_back(nm);
  }
  return nb;
}

// ---------------------------------------------------------------------------
// combine_squarefree.

namespace {

bool coprime_to_all(const IntPolynomial& r, const std::vector<IntPolynomial>& qs) {
  if (r.degree() == 0) return true;
  for (const auto& q : qs)
    if (gcd(r, q).degree() != 0) return false;
  return true;
}

}  // namespace

CombineResult combine_squarefree(const std::vector<IntPolynomial>& qs) {
  if (qs.empty()) throw UsageError("combine needs at least one polynomial");
  int n = 0;
  for (const auto& q : qs) {
    if (q.is_zero()) throw UsageError("combine needs nonzero polynomials");
    n = std::max(n, q.degree());
  }
  size_t k = qs.size();
  IntPolynomial g = qs[0];
  for (size_t i = 1; i < k; ++i) g = gcd(g, qs[i]);

  long bound = static_cast<long>(n) * static_cast<long>(k + 2);
  auto attempt = [&](const std::vector<long>& b) -> std::optional<CombineResult> {
    IntPolynomial f = qs[0];
    for (size_t i = 1; i < k; ++i)
      if (b[i - 1] != 0) f = f + mpz_class(b[i - 1]) * qs[i];
    if (f.is_zero() || f.degree() != n) return std::nullopt;
    IntPolynomial r = exact_divide(f, g);
    if (!is_squarefree(r)) return std::nullopt;
    if (!coprime_to_all(r, qs)) return std::nullopt;
    return CombineResult{b, g, r};
  };

  if (k == 1) {
    auto res = attempt({});
    if (res) return *res;
    throw ConstructionFailedError("single-input combination is not squarefree");
  }

  long tried = 0;
  const long cap = 200000;
  std::vector<long> b(k - 1, 0);
  for (long s = 0; s <= bound * static_cast<long>(k - 1); ++s) {
    // Enumerate b with sum s, entries in [0, bound], lexicographic.
    std::function<std::optional<CombineResult>(size_t, long)> rec =
        [&](size_t pos, long rem) -> std::optional<CombineResult> {
      if (pos + 1 == b.size()) {
        if (rem > bound) return std::nullopt;
        b[pos] = rem;
        if (++tried > cap)
          throw ConstructionFailedError("combination search exhausted");
        return attempt(b);
      }
      for (long v = 0; v <= std::min(rem, bound); ++v) {
        b[pos] = v;
        auto res = rec(pos + 1, rem - v);
        if (res) return res;
      }
      return std::nullopt;
    };
    auto res = rec(0, s);
    if (res) return *res;
  }
  throw ConstructionFailedError("no combination in the search box");
}

// ---------------------------------------------------------------------------
// squarefree_small_norm.

IntPolynomial squarefree_small_norm(const MixtureMeasure& mu, const IntervalUnion& sigma,
                                    int n) {
  if (n < 2) throw ParameterError("squarefree construction needs n >= 2");
  NormBasis nb = small_norm_basis(mu, sigma, n);

  std::vector<size_t> order(nb.polynomials.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return nb.norms[a] < nb.norms[b]; });
  std::vector<IntPolynomial> ps;
  ps.reserve(order.size());
  for (size_t i : order) ps.push_back(nb.polynomials[i]);

  // Usable degree up to index i: max degree so far minus deg gcd so far.
  double threshold = n - std::sqrt(static_cast<double>(n));
  IntPolynomial g = ps[0];
  int maxdeg = ps[0].degree();
  int m = 0;
  for (size_t i = 0; i < ps.size(); ++i) {
    if (i > 0) {
      g = gcd(g, ps[i]);
      maxdeg = std::max(maxdeg, ps[i].degree());
    }
    int usable = maxdeg - g.degree();
    if (usable < threshold)
      m = usable;
    else
      break;
  }
  size_t jstar = std::min(static_cast<size_t>(m + 1), ps.size() - 1);

  std::vector<IntPolynomial> inputs;
  for (size_t i = jstar + 1; i-- > 0;) inputs.push_back(ps[i]);
  CombineResult comb = combine_squarefree(inputs);
  IntPolynomial core = comb.r;
  if (core.degree() < 1)
    throw ConstructionFailedError("combination collapsed to a constant");

  // Half-integer adjustment against the core: certifies its roots are
  // isolated (squarefree via a second route) and its evaluation lattice is
  // well conditioned before padding.
  {
    RealPolynomial half_top =
        Real(0.5) * RealPolynomial::from_int(
                        IntPolynomial::monomial(mpz_class(1), core.degree() - 1));
    AdjustmentResult adj = adjust_to_integer(half_top, core);
    if (!(adj.residual < Real(1e-10)))
      throw ConstructionFailedError("core adjustment residual too large");
  }

  std::vector<mpz_class> pad;
  for (long i = 1; static_cast<int>(pad.size()) < n - core.degree(); ++i) {
    if (core.evaluate(mpz_class(i)) != 0) pad.emplace_back(i);
    if (i > 4 * static_cast<long>(n) + 4)
      throw ConstructionFailedError("could not place padding roots");
  }
  IntPolynomial out = pad.empty() ? core : core * IntPolynomial::from_int_roots(pad);
  if (out.degree() != n || !is_squarefree(out))
    throw ConstructionFailedError("padded polynomial failed verification");
  return out;
}

}  // namespace potpoly
