#pragma once

#include <functional>
#include <vector>

#include "potpoly/measure.hpp"

namespace potpoly {

/// Objective F over a domain Sigma for the semi-infinite program
/// lambda(Sigma, F) = sup { lambda : F(x) >= lambda + sum a_k log|Q_k(x)| on Sigma }.
/// Built-in kinds certify F(x)/log|x| -> +inf on rays symbolically; custom
/// objectives on a ray can only be checked on the sampled range.
struct ObjectiveSpec {
  enum class Kind { Trace, PointCount, Custom };

  Kind kind = Kind::Trace;
  IntervalUnion domain;
  Real q{0};  // PointCount parameter
  std::function<Real(const Real&)> custom;

  static ObjectiveSpec trace(IntervalUnion domain);
  static ObjectiveSpec point_count(const Real& q);
  static ObjectiveSpec custom_fn(std::function<Real(const Real&)> f, IntervalUnion domain);

  Real evaluate(const Real& x) const;
  double evaluate_d(double x) const;
  /// True when the super-logarithmic growth needed on an unbounded domain
  /// is known from the objective's form.
  bool growth_certified() const;
};

struct SmythTerm {
  IntPolynomial Q;
  Real a;  // nonnegative
};

struct SmythCertificate {
  Real lambda{0};
  std::vector<SmythTerm> terms;
  Real min_slack{0};
  Real worst_x{0};
  bool tail_certified = false;
  int rounds = 0;       // exchange iterations used by the optimizer
  int grid_size = 0;    // constraint points at the final solve
};

struct CertifyReport {
  Real min_slack{0};
  Real worst_x{0};
  bool tail_certified = false;
  bool pass = false;
};

struct DualSolution {
  MixtureMeasure measure;  // piecewise-uniform cells on the truncated domain
  Real value{0};           // int F dmu
  std::vector<int> binding_constraints;
  std::vector<Real> log_integrals;  // int log|Q_i| dmu per pool entry
  Real energy{0};
};

struct CraterDiagnostic {
  bool skipped = false;
  Real pool_mean{0};      // int F dmu_P
  Real log_integral{0};   // int log|P| dmu
  std::vector<Real> epsilons;
  std::vector<Real> root_mass;  // measure mass within eps of P's roots
};

struct SmythOptions {
  int grid_points = 512;  // per domain component
  double tol = 1e-9;
  int max_rounds = 80;
};

/// Evaluates the slack F(x) - lambda - sum a_k log|Q_k(x)| over the domain:
/// dense scan, local-minimum refinement, and analytic tail domination on
/// rays for built-in objectives.  Custom objectives on a ray throw
/// TailUncertifiedError unless require_tail is false, in which case the
/// report comes back with tail_certified = false.
CertifyReport certify(const ObjectiveSpec& spec, const SmythCertificate& cert,
                      double tol = 1e-9, bool require_tail = true);

/// Cutting-plane exchange: discretize, maximize lambda over (lambda, a >= 0),
/// insert the most-violated point, repeat; the returned certificate has been
/// re-verified with min_slack >= -tol.
SmythCertificate optimize_primal(const ObjectiveSpec& spec,
                                 const std::vector<IntPolynomial>& pool,
                                 const SmythOptions& opt = {});

/// Finite LP over cell masses on the truncated domain: minimize int F dmu
/// subject to mass 1 and int log|Q_i| dmu >= 0.  Cell coefficients are exact
/// means, so the reported measure satisfies the constraints as stated.
DualSolution optimize_dual(const ObjectiveSpec& spec,
                           const std::vector<IntPolynomial>& pool,
                           const Interval& truncation, const SmythOptions& opt = {});

/// Crater diagnostic: for monic P with real roots in the domain and mean
/// objective below the dual value, reports int log|P| dmu and the dual
/// measure's mass near P's roots.
CraterDiagnostic crater_check(const DualSolution& sol, const ObjectiveSpec& spec,
                              const IntPolynomial& p,
                              const std::vector<double>& epsilons = {1e-2, 3e-2, 1e-1});

}  // namespace potpoly
