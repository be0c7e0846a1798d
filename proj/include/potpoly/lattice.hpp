#pragma once

#include <vector>

#include "potpoly/interval.hpp"
#include "potpoly/measure.hpp"
#include "potpoly/norm.hpp"
#include "potpoly/polynomial.hpp"

namespace potpoly {

/// Outcome of writing a real polynomial as an integer polynomial plus a
/// small combination of the Lagrange-style basis P_i = P/(z - alpha_i).
struct AdjustmentResult {
  IntPolynomial R;              // degree <= deg P - 1
  std::vector<Complex> betas;   // one per root of P, beta_j = (Q-R)(a_j)/P'(a_j)
  Real beta_l1;                 // sum of |beta_j|
  Real residual;                // max coefficient of Q - sum beta_j P_j - R
};

/// Integer R (deg <= n-1) with Q - R of small evaluation size at P's roots.
/// Coefficient rounding seeds the search; a reduced-lattice nearest-plane
/// pass refines it.  The l1 size of beta is heuristic, not certified.
AdjustmentResult adjust_to_integer(const RealPolynomial& q, const IntPolynomial& p);

/// n+1 linearly independent integer polynomials of degree <= n with a small
/// product of weighted sup norms.
struct NormBasis {
  std::vector<IntPolynomial> polynomials;
  std::vector<Real> norms;  // n-norms w.r.t. the generating (mu, sigma)
  Real product_log;         // sum of log norms
};

/// Reduce the integer polynomial lattice embedded by evaluations at the
/// n+1 quantile points alpha_i = quantile(mu, i/(n+1)), weighted by
/// w_i = e^{n U^mu(alpha_i)}.
NormBasis small_norm_basis(const MixtureMeasure& mu, const IntervalUnion& sigma, int n,
                           double delta = 0.99);

/// Squarefree integer polynomial of degree exactly n with small n-norm:
/// sorts a small-norm basis, tracks usable degrees, combines the prefix
/// into a squarefree cofactor, and pads with fresh linear factors (z - i).
IntPolynomial squarefree_small_norm(const MixtureMeasure& mu, const IntervalUnion& sigma,
                                    int n);

/// Q_1 + b_2 Q_2 + ... + b_k Q_k = q * r with q dividing every input and r
/// squarefree and coprime to every input; b_i searched in [0, n(k+2)] in
/// order of increasing sum.
struct CombineResult {
  std::vector<long> bs;  // k-1 multipliers, for inputs 2..k
  IntPolynomial q;
  IntPolynomial r;
};
CombineResult combine_squarefree(const std::vector<IntPolynomial>& qs);

/// In-place lattice reduction (Lovasz condition with parameter delta) of
/// basis vectors given as real embeddings, with the generating integer
/// polynomials transformed in lockstep.
void lll_reduce(std::vector<IntPolynomial>& polys, std::vector<std::vector<Real>>& emb,
                double delta = 0.99);

/// Nearest-plane coefficients for target against an (ideally reduced) basis.
std::vector<mpz_class> babai_nearest(const std::vector<std::vector<Real>>& emb,
                                     const std::vector<Real>& target);

}  // namespace potpoly
