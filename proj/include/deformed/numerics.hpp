// SPDX-License-Identifier: Apache-2.0
#pragma once

/// Shared numerical kernels: compensated summation, adaptive Simpson
/// quadrature with geometric grading toward an integrable endpoint
/// singularity, monotone bisection and finite differences.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "deformed/errors.hpp"

namespace deformed::numerics {

/// Kahan-Babuska (Neumaier) accumulator. Unlike plain Kahan it stays exact
/// when a summand is larger in magnitude than the running sum.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double init) : sum_(init) {}

  CompensatedSum& operator+=(double value) noexcept {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  CompensatedSum& operator-=(double value) noexcept { return *this += -value; }

  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

inline double sum_compensated(std::span<const double> values) noexcept {
  CompensatedSum acc;
  for (double v : values) acc += v;
  return acc.value();
}

template <class F>
double central_diff(const F& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Central difference extrapolated once: (4 D(h/2) - D(h)) / 3.
template <class F>
double richardson_diff(const F& f, double x, double h) {
  const double coarse = central_diff(f, x, h);
  const double fine = central_diff(f, x, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

struct QuadratureSpec {
  double abs_tol = 1e-11;
  int max_depth = 40;
  /// Ratio between consecutive panels of the graded mesh near a singular
  /// endpoint.
  double grading_ratio = 0.5;

  void validate() const {
    if (!(abs_tol > 0.0)) throw ParamError("quadrature abs_tol must be > 0");
    if (max_depth < 4) throw ParamError("quadrature max_depth must be >= 4");
    if (!(grading_ratio > 0.0 && grading_ratio < 1.0)) {
      throw ParamError("quadrature grading_ratio must lie in (0,1)");
    }
  }
};

namespace detail {

template <class F>
class AdaptiveSimpson {
 public:
  AdaptiveSimpson(const F& f, int max_depth) : f_(f), max_depth_(max_depth) {}

  double operator()(double a, double b, double tol) const {
    const double fa = f_(a);
    const double fb = f_(b);
    const double m = 0.5 * (a + b);
    const double fm = f_(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return refine(a, fa, m, fm, b, fb, whole, tol, 0);
  }

 private:
  static constexpr int kMinDepth = 2;

  double refine(double a, double fa, double m, double fm, double b, double fb,
                double whole, double tol, int depth) const {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f_(lm);
    const double frm = f_(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    const double roundoff =
        64.0 * std::numeric_limits<double>::epsilon() *
        (std::abs(left) + std::abs(right));
    const bool exhausted = lm <= a || rm >= b || m <= lm || m >= rm;
    if (depth >= kMinDepth &&
        (std::abs(delta) <= 15.0 * tol || std::abs(delta) <= roundoff)) {
      return left + right + delta / 15.0;
    }
    if (exhausted) return left + right + delta / 15.0;
    if (depth >= max_depth_) {
      throw NoConvergence("adaptive Simpson exceeded max_depth on [" +
                              std::to_string(a) + ", " + std::to_string(b) +
                              "]",
                          std::abs(delta) / 15.0);
    }
    return refine(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1) +
           refine(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1);
  }

  const F& f_;
  int max_depth_;
};

}  // namespace detail

/// Integrates f over [a, b].
///
/// With `singular_at_a = s` the integrand may blow up like (x-a)^(-s),
/// s in [0,1), and is never evaluated at a itself. The first
/// min(0.1, b-a) of the interval is then covered by panels
/// [a + Z r^(k+1), a + Z r^k] (r = grading ratio), each integrated by
/// adaptive Simpson; the remaining geometric tail is extrapolated once the
/// panel contributions have decayed below tolerance.
template <class F>
double integrate(const F& f, double a, double b, const QuadratureSpec& spec = {},
                 std::optional<double> singular_at_a = std::nullopt) {
  spec.validate();
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("integration limits must be finite");
  }
  if (a == b) return 0.0;
  detail::AdaptiveSimpson<F> simpson(f, spec.max_depth);
  if (!singular_at_a) {
    if (b < a) return -simpson(b, a, spec.abs_tol);
    return simpson(a, b, spec.abs_tol);
  }
  const double s = *singular_at_a;
  if (!(s >= 0.0 && s < 1.0)) {
    throw ParamError("singularity exponent must lie in [0,1)");
  }
  if (b < a) throw DomainError("graded integration requires a < b");

  const double length = b - a;
  const double zone = std::min(0.1, length);
  CompensatedSum total;
  if (zone < length) total += simpson(a + zone, b, 0.5 * spec.abs_tol);

  const double r = spec.grading_ratio;
  const double decay = std::pow(r, 1.0 - s);
  const double tail_factor = decay / (1.0 - decay);
  double hi = a + zone;
  double scale = zone;
  constexpr int kMaxPanels = 4000;
  for (int k = 0; k < kMaxPanels; ++k) {
    scale *= r;
    const double lo = a + scale;
    if (lo <= a || lo >= hi) {
      // Mesh reached the resolution of a; what remains is below one ulp wide.
      return total.value();
    }
    const double panel_tol = 0.5 * spec.abs_tol / ((k + 1.0) * (k + 2.0));
    const double panel = simpson(lo, hi, panel_tol);
    total += panel;
    const double tail = std::abs(panel) * tail_factor;
    if (k >= 4 && tail < 0.25 * spec.abs_tol) {
      total += panel * tail_factor;
      return total.value();
    }
    hi = lo;
  }
  throw NoConvergence("graded quadrature did not reach tolerance",
                      spec.abs_tol);
}

/// Solves f(x) = target for increasing f. The hint bracket is widened by
/// doubling its width outward, at most 64 times per side.
template <class F>
double bisect_monotone(const F& f, double target, double lo_hint,
                       double hi_hint, double tol) {
  double lo = std::min(lo_hint, hi_hint);
  double hi = std::max(lo_hint, hi_hint);
  if (lo == hi) hi = lo + 1.0;
  double width = hi - lo;
  double flo = f(lo);
  for (int i = 0; i < 64 && flo > target; ++i) {
    hi = lo;
    lo -= width;
    width *= 2.0;
    flo = f(lo);
  }
  double fhi = f(hi);
  width = hi - lo;
  for (int i = 0; i < 64 && fhi < target; ++i) {
    lo = hi;
    flo = fhi;
    hi += width;
    width *= 2.0;
    fhi = f(hi);
  }
  if (std::isnan(flo) || std::isnan(fhi) || flo > target || fhi < target) {
    throw BracketError("target " + std::to_string(target) +
                       " outside the range reached by bracket expansion");
  }
  const double accept = tol * (1.0 + std::abs(target));
  if (std::abs(flo - target) <= accept) return lo;
  if (std::abs(fhi - target) <= accept) return hi;
  double mid = lo;
  for (int i = 0; i < 4096; ++i) {
    mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (std::abs(fm - target) <= accept) return mid;
    if (fm < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

struct Bracket {
  double lo;
  double hi;
};

/// Shrinks [lo, hi] around the crossing of an increasing f with target,
/// keeping f(lo) <= target < f(hi), until hi - lo <= x_tol.
template <class F>
Bracket bisect_bracket(const F& f, double target, double lo, double hi,
                       double x_tol) {
  if (!(lo < hi)) throw BracketError("empty bracket");
  if (f(lo) > target || !(f(hi) > target)) {
    throw BracketError("bracket does not straddle the target");
  }
  while (hi - lo > x_tol) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) <= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

}  // namespace deformed::numerics
