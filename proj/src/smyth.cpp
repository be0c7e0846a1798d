#include "potpoly/smyth.hpp"

#include "potpoly/errors.hpp"
#include "potpoly/norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace potpoly {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DRoot {
  double re, im;  // im > 0 for one member of each conjugate pair, 0 for real
};

struct DPoly {
  std::vector<double> coeffs;  // ascending
  double lc = 0;
  int deg = 0;
  double log_l1 = 0;  // log of coefficient l1 norm, for tail domination
  std::vector<DRoot> roots;
  std::vector<double> real_roots;
};

DPoly dpoly_of(const IntPolynomial& p) {
  DPoly d;
  d.deg = p.degree();
  double l1 = 0;
  for (int i = 0; i <= d.deg; ++i) {
    d.coeffs.push_back(mpz_get_d(p.coeff(i).get_mpz_t()));
    l1 += std::fabs(d.coeffs.back());
  }
  d.lc = d.coeffs.back();
  d.log_l1 = std::log(l1);
  for (const auto& z : all_roots(p)) {
    double re = z.re.to_double(), im = z.im.to_double();
    if (std::fabs(im) <= 1e-20 * (1.0 + std::fabs(re))) {
      d.roots.push_back({re, 0.0});
      d.real_roots.push_back(re);
    } else if (im > 0) {
      d.roots.push_back({re, im});
    }
  }
  return d;
}

double dpoly_eval(const DPoly& p, double x) {
  double v = 0;
  for (size_t i = p.coeffs.size(); i-- > 0;) v = v * x + p.coeffs[i];
  return v;
}

// Antiderivative of log|u| du.
double prim_log(double u) { return u == 0 ? 0.0 : u * (std::log(std::fabs(u)) - 1.0); }

// Antiderivative of (1/2) log(u^2 + y^2) du, y > 0.
double prim_log_pair(double u, double y) {
  return 0.5 * u * std::log(u * u + y * y) - u + y * std::atan(u / y);
}

// Exact mean of log|Q| over [lo, hi] from the root factorization.
double cell_mean_log(const DPoly& p, double lo, double hi) {
  double s = (hi - lo) * std::log(std::fabs(p.lc));
  for (const auto& r : p.roots) {
    if (r.im == 0)
      s += prim_log(hi - r.re) - prim_log(lo - r.re);
    else
      s += 2.0 * (prim_log_pair(hi - r.re, r.im) - prim_log_pair(lo - r.re, r.im));
  }
  return s / (hi - lo);
}

// ---------------------------------------------------------------------------
// Dense two-phase revised simplex.  Rows stay tiny (1 + pool size); columns
// number in the thousands, so pricing dominates and Binv is a small matrix.

struct LpSolution {
  enum class Status { Optimal, Infeasible, Unbounded, Stalled };
  Status status = Status::Stalled;
  std::vector<double> x;
  std::vector<double> y;
  double value = 0;
};

class Simplex {
 public:
  Simplex(int m, const std::vector<std::vector<double>>& cols, std::vector<double> b,
          std::vector<double> c)
      : m_(m), cols_(cols), b_(std::move(b)), cost_(std::move(c)) {
    n_ = static_cast<int>(cols_.size());
  }

  LpSolution solve() {
    basis_.resize(m_);
    binv_.assign(m_, std::vector<double>(m_, 0.0));
    xb_ = b_;
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;  // artificials
      binv_[i][i] = 1.0;
    }

    phase1_ = true;
    LpSolution::Status st = iterate();
    if (st != LpSolution::Status::Optimal) return fail(st);
    double art = 0;
    for (int i = 0; i < m_; ++i)
      if (basis_[i] >= n_) art += xb_[i];
    if (art > 1e-7) return fail(LpSolution::Status::Infeasible);
    expel_artificials();

    phase1_ = false;
    st = iterate();
    if (st != LpSolution::Status::Optimal) return fail(st);

    LpSolution out;
    out.status = LpSolution::Status::Optimal;
    out.x.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) out.x[basis_[i]] = xb_[i];
    out.y = dual_row();
    out.value = 0;
    for (int j = 0; j < n_; ++j) out.value += cost_[j] * out.x[j];
    return out;
  }

 private:
  double colv(int j, int i) const {
    if (j < n_) return cols_[j][i];
    return j - n_ == i ? 1.0 : 0.0;
  }

  double costv(int j) const {
    if (phase1_) return j >= n_ ? 1.0 : 0.0;
    return j < n_ ? cost_[j] : 0.0;
  }

  std::vector<double> dual_row() const {
    std::vector<double> y(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      double cb = costv(basis_[i]);
      if (cb == 0) continue;
      for (int k = 0; k < m_; ++k) y[k] += cb * binv_[i][k];
    }
    return y;
  }

  std::vector<double> ftran(int j) const {
    std::vector<double> u(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      double s = 0;
      for (int k = 0; k < m_; ++k) s += binv_[i][k] * colv(j, k);
      u[i] = s;
    }
    return u;
  }

  LpSolution::Status iterate() {
    int degen = 0;
    for (long it = 0; it < 200000; ++it) {
      std::vector<double> y = dual_row();
      int enter = -1;
      double best = -1e-9;
      bool bland = degen > 400;
      int jmax = phase1_ ? n_ : n_;
      for (int j = 0; j < jmax; ++j) {
        double d = costv(j);
        for (int k = 0; k < m_; ++k) d -= y[k] * colv(j, k);
        if (d < best) {
          best = d;
          enter = j;
          if (bland) break;
        }
      }
      if (enter < 0) return LpSolution::Status::Optimal;

      std::vector<double> u = ftran(enter);
      int leave = -1;
      double tmin = kInf;
      for (int i = 0; i < m_; ++i) {
        // Basic artificials at level zero exit on any nonzero pivot so they
        // cannot regrow.
        if (!phase1_ && basis_[i] >= n_ && xb_[i] <= 1e-12 && std::fabs(u[i]) > 1e-9) {
          leave = i;
          tmin = 0;
          break;
        }
        if (u[i] > 1e-11) {
          double t = xb_[i] / u[i];
          if (t < tmin - 1e-15 ||
              (t < tmin + 1e-15 && leave >= 0 && basis_[i] > basis_[leave])) {
            tmin = t;
            leave = i;
          }
        }
      }
      if (leave < 0) return LpSolution::Status::Unbounded;
      if (tmin <= 1e-12)
        ++degen;
      else
        degen = 0;

      double piv = u[leave];
      for (int k = 0; k < m_; ++k) binv_[leave][k] /= piv;
      xb_[leave] = tmin;
      for (int i = 0; i < m_; ++i) {
        if (i == leave || std::fabs(u[i]) < 1e-300) continue;
        double f = u[i];
        for (int k = 0; k < m_; ++k) binv_[i][k] -= f * binv_[leave][k];
        xb_[i] -= f * tmin;
        if (xb_[i] < 0 && xb_[i] > -1e-11) xb_[i] = 0;
      }
      basis_[leave] = enter;
    }
    return LpSolution::Status::Stalled;
  }

  void expel_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      for (int j = 0; j < n_; ++j) {
        bool basic = false;
        for (int k = 0; k < m_; ++k) basic |= (basis_[k] == j);
        if (basic) continue;
        std::vector<double> u = ftran(j);
        if (std::fabs(u[i]) > 1e-9) {
          double piv = u[i];
          for (int k = 0; k < m_; ++k) binv_[i][k] /= piv;
          for (int r = 0; r < m_; ++r) {
            if (r == i) continue;
            double f = u[r] / piv;
            if (std::fabs(f) < 1e-300) continue;
            for (int k = 0; k < m_; ++k) binv_[r][k] -= f * binv_[i][k];
            xb_[r] -= f * xb_[i];
          }
          basis_[i] = j;
          break;
        }
      }
    }
  }

  LpSolution fail(LpSolution::Status st) {
    LpSolution out;
    out.status = st;
    return out;
  }

  int m_, n_;
  const std::vector<std::vector<double>>& cols_;
  std::vector<double> b_, cost_;
  bool phase1_ = true;
  std::vector<int> basis_;
  std::vector<std::vector<double>> binv_;
  std::vector<double> xb_;
};

// ---------------------------------------------------------------------------
// Grids.

void push_root_ladder(std::vector<double>& pts, double r, double lo, double hi,
                      double scale) {
  for (int k = 0; k <= 44; ++k) {
    double d = scale * std::pow(0.5, k);
    if (r + d > lo && r + d < hi) pts.push_back(r + d);
    if (r - d > lo && r - d < hi) pts.push_back(r - d);
  }
}

void sort_unique(std::vector<double>& pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double a, double b) { return std::fabs(a - b) < 1e-13; }),
            pts.end());
}

struct DomainParts {
  std::vector<std::pair<double, double>> parts;  // finite segments to sample
  bool has_ray = false;
  double ray_start = 0;
};

DomainParts domain_parts(const IntervalUnion& dom) {
  DomainParts d;
  for (const auto& p : dom.parts())
    d.parts.emplace_back(p.lo.to_real().to_double(), p.hi.to_real().to_double());
  if (dom.ray()) {
    if (dom.ray()->direction < 0)
      throw UsageError("left rays are not supported as objective domains");
    d.has_ray = true;
    d.ray_start = dom.ray()->start.to_real().to_double();
  }
  return d;
}

std::vector<double> sample_points(const DomainParts& dom, const std::vector<DPoly>& pool,
                                  int per_component, double ray_right) {
  std::vector<double> pts;
  auto fill = [&](double lo, double hi) {
    if (!(hi > lo)) {
      pts.push_back(lo);
      return;
    }
    for (int i = 0; i <= per_component; ++i)
      pts.push_back(lo + (hi - lo) * i / per_component);
    for (const auto& q : pool)
      for (double r : q.real_roots)
        if (r > lo - 0.5 && r < hi + 0.5)
          push_root_ladder(pts, r, lo, hi, (hi - lo) / 16.0);
  };
  for (const auto& [lo, hi] : dom.parts) fill(lo, hi);
  if (dom.has_ray) {
    fill(dom.ray_start, ray_right);
    for (int k = 0; k <= 40; ++k) {
      double x = dom.ray_start + (ray_right - dom.ray_start) * std::pow(0.5, k);
      if (x > dom.ray_start) pts.push_back(x);
    }
  }
  sort_unique(pts);
  return pts;
}

// ---------------------------------------------------------------------------
// Slack machinery shared by certify and the primal exchange loop.

struct DCert {
  double lambda;
  std::vector<DPoly> pool;
  std::vector<double> a;
};

double slack_at(const ObjectiveSpec& spec, const DCert& c, double x) {
  double s = spec.evaluate_d(x) - c.lambda;
  for (size_t i = 0; i < c.pool.size(); ++i) {
    if (c.a[i] == 0) continue;
    double v = std::fabs(dpoly_eval(c.pool[i], x));
    if (v == 0) return kInf;
    s -= c.a[i] * std::log(v);
  }
  return s;
}

double golden_min(const ObjectiveSpec& spec, const DCert& c, double lo, double hi) {
  const double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = slack_at(spec, c, x1), f2 = slack_at(spec, c, x2);
  for (int i = 0; i < 90; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = slack_at(spec, c, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = slack_at(spec, c, x2);
    }
  }
  return f1 < f2 ? x1 : x2;
}

struct SlackScan {
  double min_slack = kInf;
  double worst_x = 0;
};

// Dense scan over precomputed sample points with golden refinement around
// every discrete local minimum.
SlackScan scan_slack(const ObjectiveSpec& spec, const DCert& c,
                     const std::vector<double>& pts) {
  SlackScan out;
  std::vector<double> val(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) val[i] = slack_at(spec, c, pts[i]);
  auto consider = [&](double x, double v) {
    if (v < out.min_slack) {
      out.min_slack = v;
      out.worst_x = x;
    }
  };
  for (size_t i = 0; i < pts.size(); ++i) {
    consider(pts[i], val[i]);
    bool left_ok = i == 0 || val[i] <= val[i - 1];
    bool right_ok = i + 1 == pts.size() || val[i] <= val[i + 1];
    if (left_ok && right_ok && std::isfinite(val[i])) {
      double lo = i == 0 ? pts[i] : pts[i - 1];
      double hi = i + 1 == pts.size() ? pts[i] : pts[i + 1];
      if (hi > lo) {
        double x = golden_min(spec, c, lo, hi);
        consider(x, slack_at(spec, c, x));
      }
    }
  }
  return out;
}

// Analytic tail floor for x >= x0 >= 1: F(x) - lambda - sum a_i (deg_i log x +
// log l1_i), nondecreasing once x >= sum a_i deg_i for the trace objective.
double tail_floor(const ObjectiveSpec& spec, const DCert& c, double x) {
  double s = spec.evaluate_d(x) - c.lambda;
  for (size_t i = 0; i < c.pool.size(); ++i)
    s -= c.a[i] * (c.pool[i].deg * std::log(x) + c.pool[i].log_l1);
  return s;
}

double tail_weight(const DCert& c) {
  double s = 0;
  for (size_t i = 0; i < c.pool.size(); ++i) s += c.a[i] * c.pool[i].deg;
  return s;
}

DCert to_dcert(const SmythCertificate& cert) {
  DCert c;
  c.lambda = cert.lambda.to_double();
  for (const auto& t : cert.terms) {
    if (t.Q.is_zero()) throw UsageError("certificate terms need nonzero polynomials");
    if (t.a.sign() < 0) throw UsageError("certificate weights must be nonnegative");
    c.pool.push_back(dpoly_of(t.Q));
    c.a.push_back(t.a.to_double());
  }
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// ObjectiveSpec.

ObjectiveSpec ObjectiveSpec::trace(IntervalUnion dom) {
  ObjectiveSpec s;
  s.kind = Kind::Trace;
  s.domain = std::move(dom);
  return s;
}

ObjectiveSpec ObjectiveSpec::point_count(const Real& q) {
  if (!(q >= Real(2))) throw ParameterError("point counting needs q >= 2");
  ObjectiveSpec s;
  s.kind = Kind::PointCount;
  s.q = q;
  Real half_width = Real(2) * sqrt(q);
  // Outward decimal rounding keeps certificates valid on the true interval;
  // exact for perfect squares.
  Real scaled = ceil(half_width * pow(Real(10), 24L));
  mpz_class mant;
  mpfr_get_z(mant.get_mpz_t(), scaled.raw(), MPFR_RNDN);
  Decimal w(mant, -24);
  s.domain = IntervalUnion::single(-w, w);
  return s;
}

ObjectiveSpec ObjectiveSpec::custom_fn(std::function<Real(const Real&)> f,
                                       IntervalUnion dom) {
  if (!f) throw UsageError("custom objective needs a function");
  ObjectiveSpec s;
  s.kind = Kind::Custom;
  s.custom = std::move(f);
  s.domain = std::move(dom);
  return s;
}

Real ObjectiveSpec::evaluate(const Real& x) const {
  switch (kind) {
    case Kind::Trace:
      return x;
    case Kind::PointCount:
      return log(abs(q + Real(1) - x));
    case Kind::Custom:
      return custom(x);
  }
  throw UsageError("unset objective");
}

double ObjectiveSpec::evaluate_d(double x) const {
  switch (kind) {
    case Kind::Trace:
      return x;
    case Kind::PointCount:
      return std::log(std::fabs(q.to_double() + 1.0 - x));
    case Kind::Custom:
      return custom(Real(x)).to_double();
  }
  throw UsageError("unset objective");
}

bool ObjectiveSpec::growth_certified() const {
  if (domain.compact()) return true;
  return kind == Kind::Trace;  // x / log x -> +inf
}

// ---------------------------------------------------------------------------
// certify.

CertifyReport certify(const ObjectiveSpec& spec, const SmythCertificate& cert, double tol,
                      bool require_tail) {
  DCert c = to_dcert(cert);
  DomainParts dom = domain_parts(spec.domain);

  CertifyReport out;
  out.tail_certified = spec.domain.compact();

  double ray_right = 0;
  if (dom.has_ray) {
    if (!spec.growth_certified()) {
      if (require_tail)
        throw TailUncertifiedError("cannot dominate the tail of a custom objective");
      ray_right = std::max(dom.ray_start + 16.0, 2.0 * std::fabs(c.lambda) + 16.0);
    } else {
      // Scan up to the point where the analytic floor takes over.
      double s = tail_weight(c);
      ray_right = std::max({dom.ray_start + 2.0, 1.0, 2.0 * s, 2.0 * std::fabs(c.lambda)});
      for (int i = 0; i < 200 && tail_floor(spec, c, ray_right) < -tol; ++i)
        ray_right *= 2;
      out.tail_certified = tail_floor(spec, c, ray_right) >= -tol && ray_right >= s;
    }
  }

  std::vector<double> pts = sample_points(dom, c.pool, 4096, ray_right);
  SlackScan scan = scan_slack(spec, c, pts);
  out.min_slack = Real(scan.min_slack);
  out.worst_x = Real(scan.worst_x);
  out.pass = scan.min_slack >= -tol && (spec.domain.compact() || out.tail_certified);
  return out;
}

// ---------------------------------------------------------------------------
// Shared LP assembly: columns are either sample points or cells.

namespace {

struct LpRun {
  double lambda = 0;
  std::vector<double> a;
  std::vector<double> w;  // per structural column
  double value = 0;
  LpSolution::Status status = LpSolution::Status::Stalled;
};

// Rows: mass, then one >=0 row per pool entry (surplus columns appended).
LpRun solve_measure_lp(const std::vector<double>& fvals,
                       const std::vector<std::vector<double>>& logvals) {
  int npool = static_cast<int>(logvals.size());
  int m = 1 + npool;
  int ncols = static_cast<int>(fvals.size());
  std::vector<std::vector<double>> cols;
  cols.reserve(ncols + npool);
  for (int j = 0; j < ncols; ++j) {
    std::vector<double> col(m, 0.0);
    col[0] = 1.0;
    for (int i = 0; i < npool; ++i) col[1 + i] = logvals[i][j];
    cols.push_back(std::move(col));
  }
  for (int i = 0; i < npool; ++i) {
    std::vector<double> col(m, 0.0);
    col[1 + i] = -1.0;
    cols.push_back(std::move(col));
  }
  std::vector<double> b(m, 0.0);
  b[0] = 1.0;
  std::vector<double> cost(cols.size(), 0.0);
  for (int j = 0; j < ncols; ++j) cost[j] = fvals[j];

  LpSolution sol = Simplex(m, cols, b, cost).solve();
  LpRun run;
  run.status = sol.status;
  if (sol.status != LpSolution::Status::Optimal) return run;
  run.lambda = sol.y[0];
  run.a.assign(npool, 0.0);
  for (int i = 0; i < npool; ++i) run.a[i] = std::max(0.0, sol.y[1 + i]);
  run.w.assign(sol.x.begin(), sol.x.begin() + ncols);
  run.value = sol.value;
  return run;
}

}  // namespace

// ---------------------------------------------------------------------------
// optimize_primal.

SmythCertificate optimize_primal(const ObjectiveSpec& spec,
                                 const std::vector<IntPolynomial>& pool,
                                 const SmythOptions& opt) {
  for (const auto& q : pool)
    if (q.is_zero()) throw UsageError("pool polynomials must be nonzero");
  if (!spec.domain.compact() && !spec.growth_certified())
    throw TailUncertifiedError("primal optimization on a ray needs certified growth");

  DomainParts dom = domain_parts(spec.domain);
  std::vector<DPoly> dpool;
  for (const auto& q : pool) dpool.push_back(dpoly_of(q));

  double ray_right = 16.0;
  if (dom.has_ray)
    ray_right = std::max(dom.ray_start + 16.0, 16.0);

  DCert cur;
  cur.pool = dpool;
  cur.a.assign(dpool.size(), 0.0);
  cur.lambda = 0;

  int rounds = 0;
  std::vector<double> extra;  // exchange points accumulated across restarts
  std::vector<double> pts;

  for (int restart = 0; restart < 10; ++restart) {
    pts = sample_points(dom, dpool, opt.grid_points, dom.has_ray ? ray_right : 0.0);
    pts.insert(pts.end(), extra.begin(), extra.end());
    sort_unique(pts);

    bool converged = false;
    for (int round = 0; round < opt.max_rounds; ++round, ++rounds) {
      std::vector<double> fvals(pts.size());
      std::vector<std::vector<double>> logvals(dpool.size(),
                                               std::vector<double>(pts.size()));
      std::vector<char> keep(pts.size(), 1);
      for (size_t j = 0; j < pts.size(); ++j) {
        fvals[j] = spec.evaluate_d(pts[j]);
        for (size_t i = 0; i < dpool.size(); ++i) {
          double v = std::fabs(dpoly_eval(dpool[i], pts[j]));
          if (v == 0) {
            keep[j] = 0;  // constraint is vacuous at a pool root
            break;
          }
          logvals[i][j] = std::log(v);
        }
      }
      std::vector<double> ff;
      std::vector<std::vector<double>> ll(dpool.size());
      std::vector<double> kept;
      for (size_t j = 0; j < pts.size(); ++j) {
        if (!keep[j]) continue;
        ff.push_back(fvals[j]);
        kept.push_back(pts[j]);
        for (size_t i = 0; i < dpool.size(); ++i) ll[i].push_back(logvals[i][j]);
      }

      LpRun run = solve_measure_lp(ff, ll);
      // An infeasible measure LP means the weights a_k can grow without
      // bound, so lambda has no finite supremum on this domain.
      if (run.status == LpSolution::Status::Infeasible)
        throw UnboundedError("lambda is unbounded: every measure on the domain violates the pool");
      if (run.status != LpSolution::Status::Optimal)
        throw VerificationError("simplex did not converge on the exchange grid");

      cur.lambda = run.lambda;
      cur.a = run.a;

      std::vector<double> search = sample_points(
          dom, dpool, 4 * opt.grid_points, dom.has_ray ? ray_right : 0.0);
      SlackScan scan = scan_slack(spec, cur, search);
      if (scan.min_slack >= -opt.tol) {
        converged = true;
        break;
      }
      pts.push_back(scan.worst_x);
      extra.push_back(scan.worst_x);
      sort_unique(pts);
    }
    if (!converged) throw VerificationError("exchange loop did not converge");

    if (!dom.has_ray) break;
    // The analytic tail floor must take over at the grid's right edge.
    double s = tail_weight(cur);
    if (ray_right >= s && ray_right >= 1.0 && tail_floor(spec, cur, ray_right) >= -opt.tol)
      break;
    ray_right = std::max(2.0 * ray_right, 4.0 * s);
    if (restart == 9) throw VerificationError("tail domination did not stabilize");
  }

  SmythCertificate cert;
  cert.rounds = rounds;
  cert.grid_size = static_cast<int>(pts.size());
  for (size_t i = 0; i < pool.size(); ++i)
    cert.terms.push_back({pool[i], Real(cur.a[i])});

  // Shift lambda down by any residual violation so the emitted certificate
  // re-verifies cleanly.
  SlackScan final_scan =
      scan_slack(spec, cur, sample_points(dom, dpool, 8 * opt.grid_points,
                                          dom.has_ray ? ray_right : 0.0));
  double shift = std::min(0.0, final_scan.min_slack + 0.5 * opt.tol);
  cert.lambda = Real(cur.lambda + shift);

  SmythCertificate probe = cert;
  CertifyReport rep = certify(spec, probe, opt.tol);
  cert.min_slack = rep.min_slack;
  cert.worst_x = rep.worst_x;
  cert.tail_certified = rep.tail_certified;
  return cert;
}

// ---------------------------------------------------------------------------
// optimize_dual.

DualSolution optimize_dual(const ObjectiveSpec& spec, const std::vector<IntPolynomial>& pool,
                           const Interval& truncation, const SmythOptions& opt) {
  for (const auto& q : pool)
    if (q.is_zero()) throw UsageError("pool polynomials must be nonzero");
  double tlo = truncation.lo.to_real().to_double();
  double thi = truncation.hi.to_real().to_double();
  if (!(tlo < thi)) throw UsageError("truncation interval is empty");

  DomainParts dom = domain_parts(spec.domain);
  std::vector<std::pair<double, double>> segs;
  for (const auto& [lo, hi] : dom.parts) {
    double a = std::max(lo, tlo), b = std::min(hi, thi);
    if (a < b) segs.emplace_back(a, b);
  }
  if (dom.has_ray) {
    double a = std::max(dom.ray_start, tlo);
    if (a < thi) segs.emplace_back(a, thi);
  }
  if (segs.empty()) throw UsageError("truncation misses the domain");

  std::vector<DPoly> dpool;
  for (const auto& q : pool) dpool.push_back(dpoly_of(q));

  // Cell breaks per segment: uniform plus geometric refinement at pool roots.
  std::vector<std::vector<double>> breaks;
  for (const auto& [lo, hi] : segs) {
    std::vector<double> bk;
    for (int i = 0; i <= opt.grid_points; ++i)
      bk.push_back(lo + (hi - lo) * i / opt.grid_points);
    for (const auto& q : dpool)
      for (double r : q.real_roots)
        if (r > lo - 0.5 && r < hi + 0.5)
          push_root_ladder(bk, r, lo, hi, (hi - lo) / 16.0);
    sort_unique(bk);
    breaks.push_back(std::move(bk));
  }

  std::vector<double> fvals;
  std::vector<std::vector<double>> logvals(dpool.size());
  std::vector<std::pair<size_t, size_t>> cell_of;  // (segment, cell)
  for (size_t s = 0; s < breaks.size(); ++s) {
    for (size_t j = 0; j + 1 < breaks[s].size(); ++j) {
      double u = breaks[s][j], v = breaks[s][j + 1];
      double mean_f;
      if (spec.kind == ObjectiveSpec::Kind::Trace)
        mean_f = 0.5 * (u + v);
      else if (spec.kind == ObjectiveSpec::Kind::PointCount) {
        double root = spec.q.to_double() + 1.0;
        mean_f = (prim_log(v - root) - prim_log(u - root)) / (v - u);
      } else
        mean_f = spec.evaluate_d(0.5 * (u + v));
      fvals.push_back(mean_f);
      for (size_t i = 0; i < dpool.size(); ++i)
        logvals[i].push_back(cell_mean_log(dpool[i], u, v));
      cell_of.emplace_back(s, j);
    }
  }

  LpRun run = solve_measure_lp(fvals, logvals);
  if (run.status == LpSolution::Status::Infeasible)
    throw InfeasibleError("no grid measure satisfies the pool; refine or widen the truncation");
  if (run.status != LpSolution::Status::Optimal)
    throw VerificationError("simplex did not converge on the dual grid");

  DualSolution out;
  out.value = Real(run.value);
  for (size_t i = 0; i < dpool.size(); ++i) {
    double li = 0;
    for (size_t j = 0; j < fvals.size(); ++j) li += run.w[j] * logvals[i][j];
    out.log_integrals.push_back(Real(li));
    if (li < 1e-7) out.binding_constraints.push_back(static_cast<int>(i));
  }

  for (size_t s = 0; s < breaks.size(); ++s) {
    std::vector<Real> bk;
    for (double x : breaks[s]) bk.push_back(Real(x));
    std::vector<Real> mass(breaks[s].size() - 1, Real(0));
    double total = 0;
    for (size_t j = 0; j < cell_of.size(); ++j)
      if (cell_of[j].first == s && run.w[j] > 0) {
        mass[cell_of[j].second] = Real(run.w[j]);
        total += run.w[j];
      }
    if (total <= 1e-14) continue;
    MixtureMeasure part = MixtureMeasure::grid(bk, mass, Real(total));
    out.measure = out.measure.empty() ? part : out.measure + part;
  }
  out.energy = energy(out.measure);
  return out;
}

// ---------------------------------------------------------------------------
// crater_check.

CraterDiagnostic crater_check(const DualSolution& sol, const ObjectiveSpec& spec,
                              const IntPolynomial& p, const std::vector<double>& epsilons) {
  CraterDiagnostic out;
  for (double e : epsilons) out.epsilons.push_back(Real(e));
  if (p.is_zero() || p.degree() < 1 || p.leading() != 1)
    throw UsageError("crater check needs a monic nonconstant polynomial");

  std::vector<Real> roots;
  try {
    roots = real_roots_numeric(RealPolynomial::from_int(p));
  } catch (const UsageError&) {
    out.skipped = true;  // roots off the axis: outside the proposition's scope
    return out;
  }
  for (const auto& r : roots)
    if (!spec.domain.contains(r, Real(1e-9))) {
      out.skipped = true;
      return out;
    }

  Real mean(0);
  for (const auto& r : roots) mean += spec.evaluate(r);
  mean = mean / Real(static_cast<long>(roots.size()));
  out.pool_mean = mean;
  if (!(mean < sol.value)) {
    out.skipped = true;
    return out;
  }

  out.log_integral = log_integral(p, sol.measure).value;
  for (double e : epsilons) {
    Real m(0);
    for (const auto& r : roots) m += cdf(sol.measure, r + Real(e)) - cdf(sol.measure, r - Real(e));
    out.root_mass.push_back(m);
  }
  return out;
}

}  // namespace potpoly
