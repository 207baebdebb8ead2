// SPDX-License-Identifier: Apache-2.0
#pragma once

/// Entropy I(p), relative entropy I(p||q) (an f-divergence) and the
/// Bregman-type divergence D(p||q), for any deformed logarithm.
///
/// Each functional has two evaluation routes that must agree; the
/// `closed_form` namespace holds the Shannon/Tsallis/Kaniadakis expressions
/// used as independent oracles.

#include <cmath>
#include <cstddef>
#include <optional>

#include "deformed/distributions.hpp"
#include "deformed/errors.hpp"
#include "deformed/log_family.hpp"
#include "deformed/numerics.hpp"

namespace deformed {

enum class Method { closed_form, generic };

struct FunctionalValue {
  double value;
  Method method;
};

/// f(x) = F(x) - (1 - x) F(0). Convex with f(0) = f(1) = 0.
inline double bregman_f(const LogFamily& fam, double x) {
  return big_f(fam, x) - (1.0 - x) * fam.f_zero();
}

/// f'(x) = ln(x) + F(0).
inline double bregman_f_prime(const LogFamily& fam, double x) {
  return ln_phi(fam, x) + fam.f_zero();
}

/// I(p) = sum_k [(1 - p_k) F(0) - F(p_k)]. Zero weights contribute 0.
inline double entropy(const LogFamily& fam, const Pdf& p) {
  const double f0 = fam.f_zero();
  numerics::CompensatedSum acc;
  for (double pk : p.weights()) {
    if (pk == 0.0) continue;
    acc += (1.0 - pk) * f0 - big_f(fam, pk);
  }
  return acc.value();
}

/// I(p) = sum_k p_k omega(1/p_k), the defining form.
inline double entropy_deduced(const LogFamily& fam, const Pdf& p) {
  numerics::CompensatedSum acc;
  for (double pk : p.weights()) {
    if (pk == 0.0) continue;
    acc += pk * omega_phi(fam, 1.0 / pk);
  }
  return acc.value();
}

namespace closed_form {

inline double shannon_entropy(const Pdf& p) {
  numerics::CompensatedSum acc;
  for (double pk : p.weights()) {
    if (pk > 0.0) acc -= pk * std::log(pk);
  }
  return acc.value();
}

/// (1/kappa)(1 - sum p^(1+kappa)).
inline double tsallis_entropy(double kappa, const Pdf& p) {
  numerics::CompensatedSum acc(1.0);
  for (double pk : p.weights()) {
    if (pk > 0.0) acc -= std::pow(pk, 1.0 + kappa);
  }
  return acc.value() / kappa;
}

inline double kaniadakis_entropy(double kappa, const Pdf& p) {
  numerics::CompensatedSum up(1.0);
  numerics::CompensatedSum down(-1.0);
  for (double pk : p.weights()) {
    if (pk <= 0.0) continue;
    up -= std::pow(pk, 1.0 + kappa);
    down += std::pow(pk, 1.0 - kappa);
  }
  return up.value() / (2.0 * kappa * (1.0 + kappa)) +
         down.value() / (2.0 * kappa * (1.0 - kappa));
}

/// Kullback-Leibler divergence sum p ln(p/q).
inline double kullback_leibler(const Pdf& p, const Pdf& q) {
  require_same_length(p, q);
  numerics::CompensatedSum acc;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == 0.0) continue;
    if (q[k] == 0.0) throw SupportError("KL divergence with q_k = 0 < p_k");
    acc += p[k] * std::log(p[k] / q[k]);
  }
  return acc.value();
}

/// (1/kappa) sum p ((p/q)^kappa - 1).
inline double tsallis_rel_entropy(double kappa, const Pdf& p, const Pdf& q) {
  require_same_length(p, q);
  numerics::CompensatedSum acc;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == 0.0) continue;
    acc += p[k] * std::expm1(kappa * std::log(p[k] / q[k]));
  }
  return acc.value() / kappa;
}

/// (1/kappa) sum p (p^kappa - q^kappa) - sum (p - q) q^kappa.
inline double tsallis_divergence(double kappa, const Pdf& p, const Pdf& q) {
  require_same_length(p, q);
  numerics::CompensatedSum first;
  numerics::CompensatedSum second;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double qk = std::pow(q[k], kappa);
    first += p[k] * (std::pow(p[k], kappa) - qk);
    second += (p[k] - q[k]) * qk;
  }
  return first.value() / kappa - second.value();
}

}  // namespace closed_form

/// Entropy evaluated by the requested route. The closed form exists for
/// shannon, tsallis and kaniadakis only.
inline FunctionalValue entropy_via(const LogFamily& fam, const Pdf& p,
                                   Method method) {
  if (method == Method::generic) return {entropy(fam, p), method};
  switch (fam.kind()) {
    case FamilyKind::shannon:
      return {closed_form::shannon_entropy(p), method};
    case FamilyKind::tsallis:
      return {closed_form::tsallis_entropy(*fam.kappa(), p), method};
    case FamilyKind::kaniadakis:
      return {closed_form::kaniadakis_entropy(*fam.kappa(), p), method};
    default:
      throw FamilyError("no closed-form entropy for " + fam.label());
  }
}

/// I^max(N) = omega(N), attained by the uniform distribution.
inline double entropy_max(const LogFamily& fam, std::size_t n) {
  if (n == 0) throw DomainError("entropy_max requires n >= 1");
  return omega_phi(fam, static_cast<double>(n));
}

/// I(p||q) = -sum_k p_k omega(q_k / p_k).
///
/// Terms with p_k = 0 vanish. A term with q_k = 0 < p_k equals
/// -p_k omega(0+) and is accepted only when that limit is finite.
inline double rel_entropy(const LogFamily& fam, const Pdf& p, const Pdf& q) {
  require_same_length(p, q);
  numerics::CompensatedSum acc;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == 0.0) continue;
    if (q[k] == 0.0) {
      if (!fam.omega_at_zero_finite()) {
        throw SupportError("relative entropy needs q_k > 0 where p_k > 0 for " +
                           fam.label());
      }
      acc -= p[k] * fam.omega_at_zero();
      continue;
    }
    acc -= p[k] * omega_phi(fam, q[k] / p[k]);
  }
  return acc.value();
}

/// I(p||q) = sum_k integral_{q_k}^{p_k} ln(x/q_k) dx = sum_k q_k F(p_k/q_k).
inline double rel_entropy_integral(const LogFamily& fam, const Pdf& p,
                                   const Pdf& q) {
  require_same_length(p, q);
  numerics::CompensatedSum acc;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (q[k] == 0.0) {
      if (p[k] == 0.0) continue;
      if (!fam.omega_at_zero_finite()) {
        throw SupportError("relative entropy needs q_k > 0 where p_k > 0 for " +
                           fam.label());
      }
      acc += p[k] * fam.ln_at_infinity();
      continue;
    }
    acc += q[k] * big_f(fam, p[k] / q[k]);
  }
  return acc.value();
}

namespace detail {

inline double ln_at(const LogFamily& fam, double q) {
  if (q > 0.0) return ln_phi(fam, q);
  if (!std::isfinite(fam.ln_at_zero())) {
    throw SupportError("divergence needs ln(0+) finite when q_k = 0 != p_k for " +
                       fam.label());
  }
  return fam.ln_at_zero();
}

}  // namespace detail

/// D(p||q) = sum_k [F(p_k) - F(q_k) - (p_k - q_k) ln(q_k)].
///
/// Terms with p_k = q_k vanish. q_k = 0 < p_k needs a finite ln(0+).
inline double divergence(const LogFamily& fam, const Pdf& p, const Pdf& q) {
  require_same_length(p, q);
  numerics::CompensatedSum acc;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == q[k]) continue;
    const double lq = detail::ln_at(fam, q[k]);
    acc += big_f(fam, p[k]) - big_f(fam, q[k]) - (p[k] - q[k]) * lq;
  }
  return acc.value();
}

/// D(p||q) = I(q) - I(p) - sum_k (p_k - q_k) ln(q_k).
inline double divergence_identity(const LogFamily& fam, const Pdf& p,
                                  const Pdf& q) {
  require_same_length(p, q);
  numerics::CompensatedSum acc(entropy(fam, q));
  acc -= entropy(fam, p);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == q[k]) continue;
    acc -= (p[k] - q[k]) * detail::ln_at(fam, q[k]);
  }
  return acc.value();
}

}  // namespace deformed
