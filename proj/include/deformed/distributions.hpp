// SPDX-License-Identifier: Apache-2.0
#pragma once

/// Finite discrete probability distributions and the seeded generator that
/// feeds the property scans.
///
/// Random streams are SplitMix64 (Steele, Lea & Flood 2014): state advances
/// by 0x9e3779b97f4a7c15 and is finalised with the variant-13 mixer.
/// A uniform double is the top 53 bits of one output times 2^-53. Flat
/// Dirichlet samples are normalised -log(1-u) exponentials, drawn in
/// coordinate order. Together these fix every sampled Pdf bit-for-bit given
/// the seed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "deformed/errors.hpp"
#include "deformed/numerics.hpp"

namespace deformed {

inline constexpr double kDefaultPdfTol = 1e-9;

class Pdf {
 public:
  /// Checks weights without renormalising: every weight >= 0 and
  /// |sum - 1| <= tol.
  static Pdf validate(std::vector<double> weights, double tol = kDefaultPdfTol) {
    if (weights.empty()) throw SumError(0.0);
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (std::isnan(weights[k]) || weights[k] < 0.0) throw NegativeWeight(k);
      if (std::isinf(weights[k])) throw SumError(weights[k]);
    }
    const double total = numerics::sum_compensated(weights);
    if (!(std::abs(total - 1.0) <= tol)) throw SumError(total);
    return Pdf(std::move(weights));
  }

  /// Explicit normalisation of nonnegative weights with positive total.
  static Pdf renormalize(std::vector<double> weights) {
    if (weights.empty()) throw SumError(0.0);
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (std::isnan(weights[k]) || weights[k] < 0.0) throw NegativeWeight(k);
    }
    const double total = numerics::sum_compensated(weights);
    if (!(total > 0.0) || std::isinf(total)) throw SumError(total);
    for (double& w : weights) w /= total;
    return Pdf(std::move(weights));
  }

  static Pdf uniform(std::size_t n) {
    if (n == 0) throw SumError(0.0);
    return Pdf(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  static Pdf point_mass(std::size_t n, std::size_t index) {
    if (index >= n) throw DomainError("point mass index out of range");
    std::vector<double> w(n, 0.0);
    w[index] = 1.0;
    return Pdf(std::move(w));
  }

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t k) const { return w_[k]; }
  std::span<const double> weights() const noexcept { return w_; }
  const std::vector<double>& vector() const noexcept { return w_; }

  friend bool operator==(const Pdf&, const Pdf&) = default;

 private:
  explicit Pdf(std::vector<double> w) : w_(std::move(w)) {}

  std::vector<double> w_;

  friend Pdf sym_diff(const Pdf&, const Pdf&);
  friend Pdf pad(const Pdf&, std::size_t);
  friend Pdf mix(const Pdf&, const Pdf&, double);
  friend class SimplexSampler;
};

inline void require_same_length(const Pdf& p, const Pdf& q) {
  if (p.size() != q.size()) {
    throw LengthMismatch("distributions have different lengths (" +
                         std::to_string(p.size()) + " vs " +
                         std::to_string(q.size()) + "); pad first");
  }
}

/// ||p - q||_1 = sum_k |p_k - q_k|.
inline double tv_norm(const Pdf& p, const Pdf& q) {
  require_same_length(p, q);
  numerics::CompensatedSum acc;
  for (std::size_t k = 0; k < p.size(); ++k) acc += std::abs(p[k] - q[k]);
  return acc.value();
}

/// True when p != q but every nonzero p_k - q_k has the same sign, which
/// only happens when the totals of p and q differ by rounding.
inline bool one_signed_difference(const Pdf& p, const Pdf& q) {
  require_same_length(p, q);
  bool up = false;
  bool down = false;
  for (std::size_t k = 0; k < p.size(); ++k) {
    up = up || p[k] > q[k];
    down = down || q[k] > p[k];
  }
  return up != down;
}

/// (p Delta q)_k = |p_k - q_k| / ||p - q||_1. Every entry is at most 1/2.
/// The excess and deficit parts are scaled to mass 1/2 each, so inputs whose
/// totals differ by rounding still give a difference pdf with that property.
/// Throws UnbalancedDifference when one of the parts is empty.
inline Pdf sym_diff(const Pdf& p, const Pdf& q) {
  require_same_length(p, q);
  numerics::CompensatedSum up;
  numerics::CompensatedSum down;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] > q[k]) up += p[k] - q[k];
    if (q[k] > p[k]) down += q[k] - p[k];
  }
  const double pos = up.value();
  const double neg = down.value();
  if (pos == 0.0 && neg == 0.0) throw IdenticalPdfs();
  if (pos == 0.0 || neg == 0.0) throw UnbalancedDifference();
  std::vector<double> w(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    w[k] = p[k] > q[k] ? 0.5 * ((p[k] - q[k]) / pos) : 0.5 * ((q[k] - p[k]) / neg);
  }
  return Pdf(std::move(w));
}

/// Appends zero weights up to length n.
inline Pdf pad(const Pdf& p, std::size_t n) {
  if (n < p.size()) {
    throw ShrinkError("cannot pad a pdf of length " + std::to_string(p.size()) +
                      " to " + std::to_string(n));
  }
  std::vector<double> w = p.vector();
  w.resize(n, 0.0);
  return Pdf(std::move(w));
}

/// lambda p + (1 - lambda) q.
inline Pdf mix(const Pdf& p, const Pdf& q, double lambda) {
  require_same_length(p, q);
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw DomainError("mixing weight must lie in [0,1]");
  }
  std::vector<double> w(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    w[k] = lambda * p[k] + (1.0 - lambda) * q[k];
  }
  return Pdf(std::move(w));
}

/// SplitMix64 stream. A value type: copies continue independently.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t next() noexcept {
    state_ += kGolden;
    return mix(state_);
  }

  /// Uniform on [0, 1).
  constexpr double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n), n > 0 (multiply-shift, negligible bias).
  std::size_t below(std::size_t n) noexcept {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

  /// Independent stream number `index` derived from `seed`; depends only on
  /// (seed, index), so work can be split across threads in any order.
  static constexpr SplitMix64 split(std::uint64_t seed,
                                    std::uint64_t index) noexcept {
    return SplitMix64(mix(seed ^ (kGolden * (index + 1))));
  }

  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

struct UniformMode {};
struct SparseMode {};
struct NeighborMode {
  Pdf center;
  double eps;
};
using SampleMode = std::variant<UniformMode, SparseMode, NeighborMode>;

/// Draws distributions from a SplitMix64 stream.
///
///  - uniform: flat Dirichlet on the n-simplex.
///  - sparse: each coordinate is kept with probability 1/2 (at least one is
///    kept), the kept ones are flat Dirichlet, the rest are zero.
///  - neighbor(p, eps): p + lambda (t - p) with t flat Dirichlet and lambda
///    chosen so that ||result - p||_1 = eps (or t itself when eps exceeds
///    ||t - p||_1).
class SimplexSampler {
 public:
  explicit SimplexSampler(SplitMix64 rng) : rng_(rng) {}

  Pdf uniform(std::size_t n) {
    if (n == 0) throw SumError(0.0);
    std::vector<double> w(n);
    for (double& x : w) x = -std::log1p(-rng_.uniform());
    return normalised(std::move(w));
  }

  Pdf sparse(std::size_t n) {
    if (n == 0) throw SumError(0.0);
    std::vector<bool> keep(n);
    bool any = false;
    for (std::size_t k = 0; k < n; ++k) {
      keep[k] = rng_.uniform() < 0.5;
      any = any || keep[k];
    }
    if (!any) keep[rng_.below(n)] = true;
    std::vector<double> w(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      if (keep[k]) w[k] = -std::log1p(-rng_.uniform());
    }
    return normalised(std::move(w));
  }

  Pdf neighbor(const Pdf& center, double eps) {
    if (!(eps > 0.0)) throw DomainError("neighbor radius must be > 0");
    const Pdf target = uniform(center.size());
    const double dist = tv_norm(center, target);
    if (dist == 0.0) return center;
    double lambda = std::min(1.0, eps / dist);
    for (int attempt = 0; attempt < 16; ++attempt) {
      Pdf step(std::vector<double>(center.size()));
      std::size_t top = 0;
      for (std::size_t k = 0; k < center.size(); ++k) {
        step.w_[k] = std::max(0.0, center[k] + lambda * (target[k] - center[k]));
        if (step.w_[k] > step.w_[top]) top = k;
      }
      numerics::CompensatedSum moved;
      for (std::size_t k = 0; k < center.size(); ++k) {
        if (k != top) moved += step.w_[k] - center[k];
      }
      step.w_[top] = std::max(0.0, center[top] - moved.value());
      const double got = tv_norm(center, step);
      if (got <= eps) return step;
      const double excess = std::ldexp(got - eps, attempt + 1);
      lambda *= std::max(0.5, (eps - excess) / got);
    }
    throw DomainError("neighbor radius below rounding resolution");
  }

  Pdf sample(std::size_t n, const SampleMode& mode) {
    return std::visit(
        [&](const auto& m) -> Pdf {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, UniformMode>) {
            return uniform(n);
          } else if constexpr (std::is_same_v<M, SparseMode>) {
            return sparse(n);
          } else {
            if (m.center.size() != n) {
              throw LengthMismatch("neighbor center has the wrong length");
            }
            return neighbor(m.center, m.eps);
          }
        },
        mode);
  }

  SplitMix64& rng() noexcept { return rng_; }

 private:
  static Pdf normalised(std::vector<double> w) {
    const double total = numerics::sum_compensated(w);
    if (!(total > 0.0)) {
      // All exponentials underflowed to zero: probability ~2^-53 per entry.
      w.assign(w.size(), 1.0 / static_cast<double>(w.size()));
      return Pdf(std::move(w));
    }
    for (double& x : w) x /= total;
    return Pdf(std::move(w));
  }

  SplitMix64 rng_;
};

/// Deterministic draw from the stream seeded with `seed`.
inline Pdf sample_simplex(std::size_t n, std::uint64_t seed,
                          const SampleMode& mode) {
  SimplexSampler sampler{SplitMix64(seed)};
  return sampler.sample(n, mode);
}

}  // namespace deformed
