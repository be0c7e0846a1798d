#include "potpoly/interval.hpp"

#include <algorithm>

#include "potpoly/quadrature.hpp"

namespace potpoly {

IntervalUnion::IntervalUnion(std::vector<Interval> parts, std::optional<Ray> ray,
                             bool allow_points)
    : ray_(std::move(ray)) {
  if (parts.empty() && !ray_.has_value()) throw EmptySetError();
  for (const auto& p : parts) {
    if (p.lo > p.hi) throw UsageError("interval with lo > hi: [" + p.lo.str() + "," + p.hi.str() + "]");
    if (p.lo == p.hi && !allow_points)
      throw UsageError("degenerate point interval [" + p.lo.str() + "," + p.hi.str() +
                       "] (pass allow_points to accept)");
  }
  std::sort(parts.begin(), parts.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const auto& p : parts) {
    if (!parts_.empty() && p.lo <= parts_.back().hi) {
      if (p.hi > parts_.back().hi) parts_.back().hi = p.hi;
    } else {
      parts_.push_back(p);
    }
  }
  if (ray_.has_value()) {
    // Absorb intervals that overlap the ray.
    if (ray_->direction >= 0) {
      ray_->direction = +1;
      while (!parts_.empty() && parts_.back().hi >= ray_->start) {
        if (parts_.back().lo < ray_->start) ray_->start = parts_.back().lo;
        parts_.pop_back();
      }
    } else {
      ray_->direction = -1;
      while (!parts_.empty() && parts_.front().lo <= ray_->start) {
        if (parts_.front().hi > ray_->start) ray_->start = parts_.front().hi;
        parts_.erase(parts_.begin());
      }
    }
  }
}

IntervalUnion IntervalUnion::single(const Decimal& lo, const Decimal& hi) {
  return IntervalUnion({Interval{lo, hi}});
}

bool IntervalUnion::contains(const Real& x, const Real& slack) const {
  if (ray_.has_value()) {
    Real s = ray_->start.to_real();
    if (ray_->direction > 0 ? x >= s - slack : x <= s + slack) return true;
  }
  return component_of(x) >= 0 ||
         (!(slack == Real(0)) && [&] {
           for (const auto& p : parts_)
             if (x >= p.lo.to_real() - slack && x <= p.hi.to_real() + slack) return true;
           return false;
         }());
}

int IntervalUnion::component_of(const Real& x) const {
  for (size_t i = 0; i < parts_.size(); ++i) {
    if (x >= parts_[i].lo.to_real() && x <= parts_[i].hi.to_real())
      return static_cast<int>(i);
  }
  return -1;
}

Decimal IntervalUnion::inf() const {
  if (ray_.has_value() && ray_->direction < 0)
    throw NotCompactError("set is unbounded below");
  if (parts_.empty()) {
    if (ray_.has_value()) return ray_->start;
    throw EmptySetError();
  }
  Decimal lo = parts_.front().lo;
  if (ray_.has_value() && ray_->direction > 0 && ray_->start < lo) return ray_->start;
  return lo;
}

Decimal IntervalUnion::sup() const {
  if (ray_.has_value() && ray_->direction > 0)
    throw NotCompactError("set is unbounded above");
  if (parts_.empty()) {
    if (ray_.has_value()) return ray_->start;
    throw EmptySetError();
  }
  Decimal hi = parts_.back().hi;
  if (ray_.has_value() && ray_->direction < 0 && ray_->start > hi) return ray_->start;
  return hi;
}

Real IntervalUnion::total_length() const {
  if (!compact()) throw NotCompactError("total_length of an unbounded set");
  Real s(0);
  for (const auto& p : parts_) s += (p.hi - p.lo).to_real();
  return s;
}

bool IntervalUnion::includes(const IntervalUnion& other) const {
  if (other.ray_.has_value()) {
    if (!ray_.has_value() || ray_->direction != other.ray_->direction) return false;
    if (ray_->direction > 0 ? other.ray_->start < ray_->start
                            : other.ray_->start > ray_->start)
      return false;
  }
  for (const auto& p : other.parts_) {
    bool ok = false;
    for (const auto& q : parts_) {
      if (q.lo <= p.lo && p.hi <= q.hi) {
        ok = true;
        break;
      }
    }
    if (!ok && ray_.has_value()) {
      ok = ray_->direction > 0 ? (p.lo >= ray_->start) : (p.hi <= ray_->start);
    }
    if (!ok) return false;
  }
  return true;
}

Complex joukowski_phi(const Real& a, const Real& b, const Complex& z) {
  Complex w = (z * Complex(Real(2)) - Complex(a + b)) / Complex(b - a);
  Complex s = sqrt(w * w - Complex(Real(1)));
  Complex phi = w + s;
  if (phi.abs2() < Real(1)) phi = w - s;
  return phi;
}

Real interval_green(const Real& a, const Real& b, const Complex& z) {
  Real g = log_abs(joukowski_phi(a, b, z));
  return g.sign() > 0 ? g : Real(0);
}

Real interval_green_pole(const Real& a, const Real& b, const Complex& z, const Real& y) {
  Complex pz = joukowski_phi(a, b, z);
  Complex py = joukowski_phi(a, b, Complex(y));
  Complex num = pz * py - Complex(Real(1));
  Complex den = pz - py;
  Real g = log_abs(num) - log_abs(den);
  return g.sign() > 0 ? g : Real(0);
}

Real interval_equilibrium_potential(const Real& a, const Real& b, const Complex& z) {
  return -log((b - a) / Real(4)) - interval_green(a, b, z);
}

namespace {

// Signed node polynomial R(t) = prod (t - z_j) over the gap zeros.
Real gap_poly(const std::vector<Real>& zeros, const Real& t) {
  Real r(1);
  for (const auto& z : zeros) r *= (t - z);
  return r;
}

// 1/sqrt(prod over all endpoints except the two listed indices), absolute
// value; endpoints flattened as [a1,b1,a2,b2,...].
Real weight_rest(const std::vector<Real>& ends, size_t skip1, size_t skip2, const Real& t) {
  Real p(1);
  for (size_t i = 0; i < ends.size(); ++i) {
    if (i == skip1 || i == skip2) continue;
    p *= abs(t - ends[i]);
  }
  return Real(1) / sqrt(p);
}

}  // namespace

EquilibriumStructure equilibrium_structure(const IntervalUnion& sigma, int quad_nodes) {
  if (!sigma.compact()) throw NotCompactError("equilibrium measure of an unbounded set");
  const auto& parts = sigma.parts();
  const size_t K = parts.size();
  std::vector<Real> ends;
  for (const auto& p : parts) {
    ends.push_back(p.lo.to_real());
    ends.push_back(p.hi.to_real());
  }

  EquilibriumStructure out;
  out.gap_zeros.assign(K > 0 ? K - 1 : 0, Real(0));
  Real pi = const_pi();

  // Gap orthogonality: for each gap, \int_gap R(t) W(t) dt = 0.  The map
  // z_j -> integral is strictly monotone with the other zeros fixed, so
  // coordinate bisection (Gauss-Seidel sweeps) converges.
  if (K >= 2) {
    for (size_t j = 0; j + 1 < K; ++j)
      out.gap_zeros[j] = (ends[2 * j + 1] + ends[2 * j + 2]) / Real(2);
    auto gap_integral = [&](size_t j) {
      Real glo = ends[2 * j + 1], ghi = ends[2 * j + 2];
      Real c = (glo + ghi) / Real(2), r = (ghi - glo) / Real(2);
      return chebyshev_angle_integral(
          [&](const Real& th) {
            Real t = c + r * cos(th);
            return gap_poly(out.gap_zeros, t) * weight_rest(ends, 2 * j + 1, 2 * j + 2, t);
          },
          quad_nodes);
    };
    for (int sweep = 0; sweep < 80; ++sweep) {
      Real moved(0);
      for (size_t j = 0; j + 1 < K; ++j) {
        Real lo = ends[2 * j + 1], hi = ends[2 * j + 2];
        // Sign of d(integral)/dz_j is the negative of the sign of
        // prod_{i != j}(t - z_i) on the gap; bisection on the value instead.
        Real old = out.gap_zeros[j];
        for (int it = 0; it < 90; ++it) {
          Real mid = (lo + hi) / Real(2);
          out.gap_zeros[j] = mid;
          Real v = gap_integral(j);
          // Integral decreases in z_j when the cofactor is positive on the gap.
          Real t_probe = (ends[2 * j + 1] + ends[2 * j + 2]) / Real(2);
          Real cof(1);
          for (size_t i = 0; i + 1 < K; ++i)
            if (i != j) cof *= (t_probe - out.gap_zeros[i]);
          bool decreasing = cof.sign() > 0;
          if ((v.sign() > 0) == decreasing)
            lo = mid;
          else
            hi = mid;
        }
        moved = max(moved, abs(out.gap_zeros[j] - old));
      }
      if (K == 2 || moved < Real(1e-40)) break;
    }
  }

  // Component masses.
  out.component_mass.clear();
  Real total(0);
  for (size_t k = 0; k < K; ++k) {
    Real a = ends[2 * k], b = ends[2 * k + 1];
    Real c = (a + b) / Real(2), r = (b - a) / Real(2);
    Real m = chebyshev_angle_integral(
        [&](const Real& th) {
          Real t = c + r * cos(th);
          return abs(gap_poly(out.gap_zeros, t)) * weight_rest(ends, 2 * k, 2 * k + 1, t);
        },
        quad_nodes);
    out.component_mass.push_back(m);
    total += m;
  }
  // The monic gap polynomial gives total mass 1 exactly in the continuum;
  // renormalize the quadrature remainder away.
  for (auto& m : out.component_mass) m /= total;

  // Equilibrium potential level, evaluated at the rightmost endpoint.
  out.robin = equilibrium_union_potential(sigma, out, ends.back());

  // Measured oscillation of U across Sigma.
  Real umin = out.robin, umax = out.robin;
  for (size_t k = 0; k < K; ++k) {
    Real a = ends[2 * k], b = ends[2 * k + 1];
    Real c = (a + b) / Real(2), r = (b - a) / Real(2);
    for (int i = 0; i < 9; ++i) {
      Real th = pi * (Real(i) + Real(0.5)) / Real(9);
      Real x = c + r * cos(th);
      Real u = equilibrium_union_potential(sigma, out, x);
      umin = min(umin, u);
      umax = max(umax, u);
    }
  }
  out.oscillation = umax - umin;
  return out;
}

Real equilibrium_union_potential(const IntervalUnion& sigma,
                                 const EquilibriumStructure& eq, const Real& x) {
  const auto& parts = sigma.parts();
  const size_t K = parts.size();
  std::vector<Real> ends;
  for (const auto& p : parts) {
    ends.push_back(p.lo.to_real());
    ends.push_back(p.hi.to_real());
  }
  Real pi = const_pi();
  Real u(0);
  for (size_t k = 0; k < K; ++k) {
    Real a = ends[2 * k], b = ends[2 * k + 1];
    Real c = (a + b) / Real(2), r = (b - a) / Real(2);
    bool inside = (x >= a && x <= b);
    Real contribution(0);
    if (!inside) {
      auto dens = [&](const Real& th) {
        Real t = c + r * cos(th);
        return abs(gap_poly(eq.gap_zeros, t)) * weight_rest(ends, 2 * k, 2 * k + 1, t) *
               log(abs(x - t));
      };
      contribution = chebyshev_angle_integral(dens, 512);
    } else {
      // Split at the angle of x.  Near that angle, x - t = c + r cos(th_x)
      // - (c + r cos(th)) cancels quadratically and can round to zero, so
      // use x - t = 2r sin((th+th_x)/2) sin((th-th_x)/2) instead; the sine
      // arguments stay linear in th - th_x and tanh-sinh absorbs the log
      // endpoint singularity.
      Real w = (Real(2) * x - a - b) / (b - a);
      if (w > Real(1)) w = Real(1);
      if (w < Real(-1)) w = Real(-1);
      Real thx = acos(w);
      auto dens = [&](const Real& th) {
        Real t = c + r * cos(th);
        Real log_dist = log(Real(2) * r) + log(abs(sin((th + thx) / Real(2)))) +
                        log(abs(sin((th - thx) / Real(2))));
        return abs(gap_poly(eq.gap_zeros, t)) * weight_rest(ends, 2 * k, 2 * k + 1, t) *
               log_dist;
      };
      Real eps(1e-38);
      Real s1(0), s2(0);
      if (thx > eps) s1 = tanh_sinh(dens, Real(0), thx, 11).value;
      if (pi - thx > eps) s2 = tanh_sinh(dens, thx, pi, 11).value;
      contribution = (s1 + s2) / pi;
    }
    // Mass renormalization factor: masses were normalized to sum to 1.
    u -= contribution;
  }
  // Correct for the renormalization of the density (same factor for every
  // component): recompute the raw total mass scale.
  Real raw_total(0);
  for (size_t k = 0; k < K; ++k) {
    Real a = ends[2 * k], b = ends[2 * k + 1];
    Real c = (a + b) / Real(2), r = (b - a) / Real(2);
    raw_total += chebyshev_angle_integral(
        [&](const Real& th) {
          Real t = c + r * cos(th);
          return abs(gap_poly(eq.gap_zeros, t)) * weight_rest(ends, 2 * k, 2 * k + 1, t);
        },
        512);
  }
  return u / raw_total;
}

CapacityResult capacity(const IntervalUnion& sigma) {
  if (!sigma.compact()) throw NotCompactError("capacity of an unbounded set");
  const auto& parts = sigma.parts();
  if (parts.size() == 1) {
    Real cap = (parts[0].hi - parts[0].lo).to_real() / Real(4);
    return CapacityResult{cap, "closed-form", Real(0)};
  }
  EquilibriumStructure eq = equilibrium_structure(sigma);
  Real cap = exp(-eq.robin);
  Real err = abs(eq.oscillation) * cap;  // first-order propagation of the level error
  return CapacityResult{cap, "energy-minimization", err};
}

Real robin_constant(const IntervalUnion& sigma) {
  CapacityResult c = capacity(sigma);
  return -log(c.capacity);
}

}  // namespace potpoly
