// SPDX-License-Identifier: Apache-2.0
#pragma once

/// Distance functions and continuity inequalities for deformed-log
/// entropies, each evaluated as a BoundReport (lhs <= rhs + tol).
///
/// Every check uses tol = rel_tol * (1 + |rhs|), rel_tol = 1e-10 by default.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "deformed/distributions.hpp"
#include "deformed/errors.hpp"
#include "deformed/functionals.hpp"
#include "deformed/log_family.hpp"
#include "deformed/numerics.hpp"

namespace deformed {

enum class BoundId {
  cont1,
  relent_I,
  relent_D,
  improved,
  cont2,
  lesche3,
  lesche4,
  fannes,
  lb,
  condition1_segment,
};

inline constexpr std::array<BoundId, 10> kAllBounds = {
    BoundId::cont1,   BoundId::relent_I, BoundId::relent_D,
    BoundId::improved, BoundId::cont2,   BoundId::lesche3,
    BoundId::lesche4, BoundId::fannes,   BoundId::lb,
    BoundId::condition1_segment};

inline std::string_view to_string(BoundId id) {
  switch (id) {
    case BoundId::cont1: return "cont1";
    case BoundId::relent_I: return "relent_I";
    case BoundId::relent_D: return "relent_D";
    case BoundId::improved: return "improved";
    case BoundId::cont2: return "cont2";
    case BoundId::lesche3: return "lesche3";
    case BoundId::lesche4: return "lesche4";
    case BoundId::fannes: return "fannes";
    case BoundId::lb: return "lb";
    case BoundId::condition1_segment: return "condition1_segment";
  }
  return "unknown";
}

inline std::optional<BoundId> bound_from_string(std::string_view name) {
  for (BoundId id : kAllBounds) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

struct BoundOptions {
  double rel_tol = 1e-10;
};

struct BoundReport {
  BoundId bound_id;
  double lhs;
  double rhs;
  /// lhs / rhs, present only when rhs > 0.
  std::optional<double> ratio;
  bool holds;
  double tol;
  std::string inputs_digest;

  friend bool operator==(const BoundReport&, const BoundReport&) = default;
};

/// FNV-1a over the exact bit patterns of the inputs.
class Digest {
 public:
  Digest& add(std::string_view text) {
    for (unsigned char c : text) byte(c);
    byte(0xff);
    return *this;
  }
  Digest& add(double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    for (int i = 0; i < 8; ++i) byte(static_cast<unsigned char>(bits >> (8 * i)));
    return *this;
  }
  Digest& add(const Pdf& p) {
    add(static_cast<double>(p.size()));
    for (double w : p.weights()) add(w);
    return *this;
  }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(hash_));
    return buf;
  }

 private:
  void byte(unsigned char c) {
    hash_ ^= c;
    hash_ *= 0x100000001b3ULL;
  }
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

inline BoundReport make_report(BoundId id, double lhs, double rhs,
                               const BoundOptions& opts, const Digest& digest) {
  const double tol = opts.rel_tol * (1.0 + std::abs(rhs));
  BoundReport report{id, lhs, rhs, std::nullopt, lhs <= rhs + tol, tol,
                     digest.hex()};
  if (rhs > 0.0) report.ratio = lhs / rhs;
  return report;
}

namespace detail {

inline Digest digest_for(BoundId id, const LogFamily& fam, const Pdf& p,
                         const Pdf& q) {
  Digest d;
  d.add(to_string(id)).add(fam.label()).add(p).add(q);
  return d;
}

inline void require_family(const LogFamily& fam, FamilyKind kind,
                           std::string_view check) {
  if (fam.kind() != kind) {
    throw FamilyError(std::string(check) + " requires the " +
                      std::string(to_string(kind)) + " family, got " +
                      fam.label());
  }
}

/// Small slack on hypotheses such as ||p-q||_1 <= 1 so that rounding in the
/// norm does not reject inputs that satisfy them exactly.
inline constexpr double kHypothesisSlack = 1e-12;

}  // namespace detail

// ---------------------------------------------------------------------------
// Distances

/// d(p,q) = sum_k [F(0) - F(|p_k - q_k|)].
inline double metric_d(const LogFamily& fam, const Pdf& p, const Pdf& q) {
  require_same_length(p, q);
  const double f0 = fam.f_zero();
  numerics::CompensatedSum acc;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double delta = std::abs(p[k] - q[k]);
    if (delta == 0.0) continue;
    acc += f0 - big_f(fam, delta);
  }
  return acc.value();
}

/// min(d(p,q), cap).
inline double metric_d_capped(const LogFamily& fam, const Pdf& p, const Pdf& q,
                              double cap) {
  if (!(cap > 0.0)) throw DomainError("cap must be > 0");
  return std::min(metric_d(fam, p, q), cap);
}

/// h_r(p,q) = sum_k |p_k - q_k| ln(1/r_k).
inline double h_r(const LogFamily& fam, const Pdf& p, const Pdf& q,
                  const Pdf& r) {
  require_same_length(p, q);
  require_same_length(p, r);
  numerics::CompensatedSum acc;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double delta = std::abs(p[k] - q[k]);
    if (delta == 0.0) continue;
    if (r[k] == 0.0) {
      if (!std::isfinite(fam.ln_at_infinity())) {
        throw SupportError("h_r needs r_k > 0 where p_k != q_k for " +
                           fam.label());
      }
      acc += delta * fam.ln_at_infinity();
      continue;
    }
    acc += delta * ln_phi(fam, 1.0 / r[k]);
  }
  return acc.value();
}

/// e_r(p,q) = -sum_k |p_k - q_k| ln(r_k).
inline double e_r(const LogFamily& fam, const Pdf& p, const Pdf& q,
                  const Pdf& r) {
  require_same_length(p, q);
  require_same_length(p, r);
  numerics::CompensatedSum acc;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double delta = std::abs(p[k] - q[k]);
    if (delta == 0.0) continue;
    if (r[k] == 0.0) {
      if (!std::isfinite(fam.ln_at_zero())) {
        throw SupportError("e_r needs r_k > 0 where p_k != q_k for " +
                           fam.label());
      }
      acc -= delta * fam.ln_at_zero();
      continue;
    }
    acc -= delta * ln_phi(fam, r[k]);
  }
  return acc.value();
}

// ---------------------------------------------------------------------------
// Right-hand sides in their family-specific forms

/// Natural-log form of d: ||p-q||_1 - sum |D| ln |D|.
inline double cont1_rhs_shannon_form(const Pdf& p, const Pdf& q) {
  require_same_length(p, q);
  numerics::CompensatedSum acc;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double delta = std::abs(p[k] - q[k]);
    if (delta == 0.0) continue;
    acc += delta;
    acc -= delta * std::log(delta);
  }
  return acc.value();
}

/// Tsallis form of d: (1 + 1/kappa)||p-q||_1 - (1/kappa) sum |D|^(1+kappa).
inline double cont1_rhs_tsallis_form(double kappa, const Pdf& p, const Pdf& q) {
  require_same_length(p, q);
  numerics::CompensatedSum norm;
  numerics::CompensatedSum powers;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double delta = std::abs(p[k] - q[k]);
    if (delta == 0.0) continue;
    norm += delta;
    powers += std::pow(delta, 1.0 + kappa);
  }
  return (1.0 + 1.0 / kappa) * norm.value() - powers.value() / kappa;
}

/// [(F(0) - F(t))/F(0)] [F(0) + I(p Delta q)], t = ||p-q||_1 <= 1.
inline double improved_rhs(const LogFamily& fam, const Pdf& p, const Pdf& q) {
  const double tv = tv_norm(p, q);
  if (tv == 0.0) throw IdenticalPdfs();
  if (tv > 1.0 + detail::kHypothesisSlack) {
    throw RangeError("improved bound requires ||p-q||_1 <= 1");
  }
  const double f0 = fam.f_zero();
  const double shrink = (f0 - big_f(fam, std::min(tv, 1.0))) / f0;
  return shrink * (f0 + entropy(fam, sym_diff(p, q)));
}

/// -F(0) - ln(1/2), lower bound on I(p Delta q).
inline double sym_diff_entropy_lb(const LogFamily& fam) {
  return -fam.f_zero() - ln_phi(fam, 0.5);
}

/// F(0) - 2 F(1/2) = omega(2): minimum of I over pdfs with entries <= 1/2.
inline double condition1_min_entropy(const LogFamily& fam) {
  return fam.f_zero() - 2.0 * big_f(fam, 0.5);
}

/// ||p-q||_1 [F(0) + omega(N / ||p-q||_1)].
inline double cont2_rhs(const LogFamily& fam, const Pdf& p, const Pdf& q) {
  const double tv = tv_norm(p, q);
  if (tv == 0.0) throw IdenticalPdfs();
  const double n = static_cast<double>(p.size());
  return tv * (fam.f_zero() + omega_phi(fam, n / tv));
}

/// N F(0) - N F(||p-q||_1 / N), the integral form of cont2_rhs.
inline double cont2_rhs_integral_form(const LogFamily& fam, const Pdf& p,
                                      const Pdf& q) {
  const double tv = tv_norm(p, q);
  const double n = static_cast<double>(p.size());
  return n * (fam.f_zero() - big_f(fam, tv / n));
}

/// (1 + 1/kappa) t + [I^max(N) - 1/kappa] t^(1+kappa).
inline double lesche3_rhs(double kappa, double imax, double tv) {
  return (1.0 + 1.0 / kappa) * tv +
         (imax - 1.0 / kappa) * std::pow(tv, 1.0 + kappa);
}

/// (1 + I^max(N)) t - t ln t.
inline double lesche4_rhs(double imax, double tv) {
  return tv == 0.0 ? 0.0 : (1.0 + imax) * tv - tv * std::log(tv);
}

/// I^max(N) t - t ln t, valid for t <= 1/3.
inline double fannes_rhs(double imax, double tv) {
  return tv == 0.0 ? 0.0 : imax * tv - tv * std::log(tv);
}

// ---------------------------------------------------------------------------
// Checks

/// |I(p) - I(q)| <= d(p,q).
inline BoundReport check_cont1(const LogFamily& fam, const Pdf& p, const Pdf& q,
                               const BoundOptions& opts = {}) {
  const double lhs = std::abs(entropy(fam, p) - entropy(fam, q));
  return make_report(BoundId::cont1, lhs, metric_d(fam, p, q), opts,
                     detail::digest_for(BoundId::cont1, fam, p, q));
}

inline BoundReport check_relent_i(const LogFamily& fam, const Pdf& p,
                                  const Pdf& q, const Pdf& r,
                                  const BoundOptions& opts = {}) {
  const double lhs = std::abs(rel_entropy(fam, p, r) - rel_entropy(fam, q, r));
  const double rhs = metric_d(fam, p, q) + h_r(fam, p, q, r);
  auto digest = detail::digest_for(BoundId::relent_I, fam, p, q);
  digest.add(r);
  return make_report(BoundId::relent_I, lhs, rhs, opts, digest);
}

inline BoundReport check_relent_d(const LogFamily& fam, const Pdf& p,
                                  const Pdf& q, const Pdf& r,
                                  const BoundOptions& opts = {}) {
  const double lhs = std::abs(divergence(fam, p, r) - divergence(fam, q, r));
  const double rhs = metric_d(fam, p, q) + e_r(fam, p, q, r);
  auto digest = detail::digest_for(BoundId::relent_D, fam, p, q);
  digest.add(r);
  return make_report(BoundId::relent_D, lhs, rhs, opts, digest);
}

/// |I(p||r) - I(q||r)| <= d + h_r and |D(p||r) - D(q||r)| <= d + e_r.
inline std::pair<BoundReport, BoundReport> check_relent(
    const LogFamily& fam, const Pdf& p, const Pdf& q, const Pdf& r,
    const BoundOptions& opts = {}) {
  return {check_relent_i(fam, p, q, r, opts), check_relent_d(fam, p, q, r, opts)};
}

/// |I(p) - I(q)| <= improved_rhs, for 0 < ||p-q||_1 <= 1.
inline BoundReport check_improved(const LogFamily& fam, const Pdf& p,
                                  const Pdf& q, const BoundOptions& opts = {}) {
  const double rhs = improved_rhs(fam, p, q);
  const double lhs = std::abs(entropy(fam, p) - entropy(fam, q));
  return make_report(BoundId::improved, lhs, rhs, opts,
                     detail::digest_for(BoundId::improved, fam, p, q));
}

/// -F(0) - ln(1/2) <= I(p Delta q).
inline BoundReport check_lb(const LogFamily& fam, const Pdf& p, const Pdf& q,
                            const BoundOptions& opts = {}) {
  const double rhs = entropy(fam, sym_diff(p, q));
  return make_report(BoundId::lb, sym_diff_entropy_lb(fam), rhs, opts,
                     detail::digest_for(BoundId::lb, fam, p, q));
}

/// |I(p) - I(q)| <= ||p-q||_1 [F(0) + omega(N/||p-q||_1)].
inline BoundReport check_cont2(const LogFamily& fam, const Pdf& p, const Pdf& q,
                               const BoundOptions& opts = {}) {
  const double rhs = cont2_rhs(fam, p, q);
  const double lhs = std::abs(entropy(fam, p) - entropy(fam, q));
  return make_report(BoundId::cont2, lhs, rhs, opts,
                     detail::digest_for(BoundId::cont2, fam, p, q));
}

/// Tsallis-only Lesche-type bound with I^max(N) = omega(N).
inline BoundReport check_lesche3(const LogFamily& fam, const Pdf& p,
                                 const Pdf& q, const BoundOptions& opts = {}) {
  detail::require_family(fam, FamilyKind::tsallis, "lesche3");
  const double tv = tv_norm(p, q);
  const double rhs = lesche3_rhs(*fam.kappa(), entropy_max(fam, p.size()), tv);
  const double lhs = std::abs(entropy(fam, p) - entropy(fam, q));
  return make_report(BoundId::lesche3, lhs, rhs, opts,
                     detail::digest_for(BoundId::lesche3, fam, p, q));
}

inline BoundReport check_lesche4(const LogFamily& fam, const Pdf& p,
                                 const Pdf& q, const BoundOptions& opts = {}) {
  detail::require_family(fam, FamilyKind::shannon, "lesche4");
  const double tv = tv_norm(p, q);
  const double rhs = lesche4_rhs(entropy_max(fam, p.size()), tv);
  const double lhs = std::abs(entropy(fam, p) - entropy(fam, q));
  return make_report(BoundId::lesche4, lhs, rhs, opts,
                     detail::digest_for(BoundId::lesche4, fam, p, q));
}

inline BoundReport check_fannes(const LogFamily& fam, const Pdf& p,
                                const Pdf& q, const BoundOptions& opts = {}) {
  detail::require_family(fam, FamilyKind::shannon, "fannes");
  const double tv = tv_norm(p, q);
  if (tv > 1.0 / 3.0 + detail::kHypothesisSlack) {
    throw RangeError("fannes bound requires ||p-q||_1 <= 1/3");
  }
  const double rhs = fannes_rhs(entropy_max(fam, p.size()), tv);
  const double lhs = std::abs(entropy(fam, p) - entropy(fam, q));
  return make_report(BoundId::fannes, lhs, rhs, opts,
                     detail::digest_for(BoundId::fannes, fam, p, q));
}

/// Largest delta in (0,1] with
///   [(F(0) - F(delta))/F(0)] (F(0) + I_min)/I_min <= epsilon,
/// I_min = F(0) - 2F(1/2). Any p != q with ||p-q||_1 <= delta then satisfies
/// |I(p) - I(q)| <= epsilon I(p Delta q).
inline double condition1_delta(const LogFamily& fam, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
  const double f0 = fam.f_zero();
  const double imin = condition1_min_entropy(fam);
  if (!(f0 > 0.0) || !(imin > 0.0)) {
    throw InfeasibleEpsilon("condition 1 needs F(0) > 0 and I_min > 0 for " +
                            fam.label());
  }
  const double factor = (f0 + imin) / imin;
  auto gauge = [&](double delta) {
    return (f0 - big_f(fam, delta)) / f0 * factor;
  };
  if (gauge(1.0) <= epsilon) return 1.0;
  const auto bracket = numerics::bisect_bracket(gauge, epsilon, 0.0, 1.0, 1e-15);
  if (!(bracket.lo > 0.0)) {
    throw InfeasibleEpsilon("no positive delta satisfies epsilon = " +
                            std::to_string(epsilon));
  }
  return bracket.lo;
}

/// |I(lambda p + (1-lambda) q) - I(mu p + (1-mu) q)| <= epsilon I(p Delta q)
/// under |lambda - mu| ||p-q||_1 <= condition1_delta(epsilon).
inline BoundReport check_condition1_segment(const LogFamily& fam, const Pdf& p,
                                            const Pdf& q, double lambda,
                                            double mu, double epsilon,
                                            const BoundOptions& opts = {}) {
  if (!(lambda >= 0.0 && lambda <= 1.0 && mu >= 0.0 && mu <= 1.0)) {
    throw RangeError("lambda and mu must lie in [0,1]");
  }
  const Pdf diff = sym_diff(p, q);
  const double tv = tv_norm(p, q);
  const double delta = condition1_delta(fam, epsilon);
  if (std::abs(lambda - mu) * tv > delta * (1.0 + detail::kHypothesisSlack)) {
    throw RangeError("|lambda - mu| ||p-q||_1 exceeds condition1_delta(epsilon)");
  }
  const double lhs = std::abs(entropy(fam, mix(p, q, lambda)) -
                              entropy(fam, mix(p, q, mu)));
  const double rhs = epsilon * entropy(fam, diff);
  auto digest = detail::digest_for(BoundId::condition1_segment, fam, p, q);
  digest.add(lambda).add(mu).add(epsilon);
  return make_report(BoundId::condition1_segment, lhs, rhs, opts, digest);
}

}  // namespace deformed
