// SPDX-License-Identifier: Apache-2.0
#pragma once

/// Deformed logarithms ln_phi and the functions derived from them:
///
///   F_phi(x)     = integral of ln_phi from 1 to x        (big_f)
///   omega_phi(x) = (x - 1) F_phi(0) - x F_phi(1/x)        (deduced logarithm)
///   exp_phi      = inverse of ln_phi, clamped to 0 / +inf outside its range
///
/// Six built-in families have closed forms. Custom families supply ln_phi
/// as a callable; F_phi is then computed by graded quadrature.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "deformed/errors.hpp"
#include "deformed/numerics.hpp"

namespace deformed {

enum class FamilyKind {
  shannon,
  tsallis,
  kaniadakis,
  kappa_maxwell,
  sqrt_log,
  piecewise_linear,
  custom,
};

inline std::string_view to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::shannon: return "shannon";
    case FamilyKind::tsallis: return "tsallis";
    case FamilyKind::kaniadakis: return "kaniadakis";
    case FamilyKind::kappa_maxwell: return "kappa_maxwell";
    case FamilyKind::sqrt_log: return "sqrt_log";
    case FamilyKind::piecewise_linear: return "piecewise_linear";
    case FamilyKind::custom: return "custom";
  }
  return "unknown";
}

/// User-supplied deformed logarithm.
struct CustomLog {
  std::function<double(double)> ln;
  /// Optional exact derivative 1/phi(x); finite differences are used if empty.
  std::function<double(double)> derivative;
  /// s in [0,1) with |ln(x)| = O(x^-s) near 0; drives the quadrature grading.
  double singularity_exponent = 0.0;
  /// lim ln(x) as x -> 0+ and as x -> +inf (may be infinite).
  double lower_limit = -std::numeric_limits<double>::infinity();
  double upper_limit = std::numeric_limits<double>::infinity();
  std::string name = "custom";
  numerics::QuadratureSpec quadrature{};
};

class LogFamily;
double ln_phi(const LogFamily& fam, double x);

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct CustomData {
  CustomLog spec;
  double f_zero = 0.0;
};

inline void require_kappa_open_unit(double kappa, std::string_view family) {
  if (!std::isfinite(kappa) || kappa <= -1.0 || kappa >= 1.0) {
    throw ParamError(std::string(family) + ": kappa must lie in (-1, 1)");
  }
  if (kappa == 0.0) {
    throw ParamError(std::string(family) +
                     ": kappa = 0 is not accepted; use the shannon family");
  }
}

}  // namespace detail

/// A deformed logarithm ln_phi together with its cached constants.
/// Immutable and cheap to copy; safe to share between threads.
class LogFamily {
 public:
  static LogFamily shannon() {
    LogFamily f(FamilyKind::shannon);
    f.f_zero_ = 1.0;
    f.ln_zero_ = -detail::kInf;
    f.ln_inf_ = detail::kInf;
    return f;
  }

  static LogFamily tsallis(double kappa) {
    detail::require_kappa_open_unit(kappa, "tsallis");
    LogFamily f(FamilyKind::tsallis);
    f.kappa_ = kappa;
    f.f_zero_ = 1.0;
    const double limit = -(1.0 + 1.0 / kappa);
    f.ln_zero_ = kappa > 0.0 ? limit : -detail::kInf;
    f.ln_inf_ = kappa > 0.0 ? detail::kInf : limit;
    return f;
  }

  static LogFamily kaniadakis(double kappa) {
    detail::require_kappa_open_unit(kappa, "kaniadakis");
    LogFamily f(FamilyKind::kaniadakis);
    f.kappa_ = kappa;
    f.f_zero_ = 1.0 / (1.0 - kappa * kappa);
    f.ln_zero_ = -detail::kInf;
    f.ln_inf_ = detail::kInf;
    return f;
  }

  static LogFamily kappa_maxwell(double kappa) {
    if (!std::isfinite(kappa) || kappa <= 0.0) {
      throw ParamError("kappa_maxwell: kappa must be > 0");
    }
    LogFamily f(FamilyKind::kappa_maxwell);
    f.kappa_ = kappa;
    f.f_zero_ = 1.0;
    f.ln_zero_ = -detail::kInf;
    f.ln_inf_ = kappa;
    return f;
  }

  static LogFamily sqrt_log() {
    LogFamily f(FamilyKind::sqrt_log);
    f.f_zero_ = 1.0 / 3.0;
    f.ln_zero_ = -1.0;
    f.ln_inf_ = detail::kInf;
    return f;
  }

  /// ln(a^n) = n for integer n, linear in between. Requires a > 1.
  static LogFamily piecewise_linear(double base) {
    if (!std::isfinite(base) || base <= 1.0) {
      throw ParamError("piecewise_linear: base must be > 1");
    }
    LogFamily f(FamilyKind::piecewise_linear);
    f.base_ = base;
    f.f_zero_ = (base + 1.0) / (2.0 * (base - 1.0));
    f.ln_zero_ = -detail::kInf;
    f.ln_inf_ = detail::kInf;
    return f;
  }

  /// Validates the callable on a log-spaced grid over [1e-6, 1e6]:
  /// ln(1) = 0 within 1e-12, strictly increasing, concave, F(0) finite.
  static LogFamily custom(CustomLog spec);

  FamilyKind kind() const noexcept { return kind_; }
  std::optional<double> kappa() const noexcept { return kappa_; }
  std::optional<double> base() const noexcept { return base_; }

  /// F_phi(0) = -integral of ln_phi over [0,1].
  double f_zero() const noexcept { return f_zero_; }
  /// lim ln_phi(x) as x -> 0+.
  double ln_at_zero() const noexcept { return ln_zero_; }
  /// lim ln_phi(x) as x -> +inf.
  double ln_at_infinity() const noexcept { return ln_inf_; }
  /// lim omega_phi(x) as x -> 0+, equal to -F(0) - ln_phi(+inf).
  double omega_at_zero() const noexcept { return -f_zero_ - ln_inf_; }
  bool omega_at_zero_finite() const noexcept { return std::isfinite(ln_inf_); }

  const CustomLog* custom_spec() const noexcept {
    return custom_ ? &custom_->spec : nullptr;
  }

  /// Human-readable label such as "tsallis(kappa=0.5)".
  /// Parameters use the shortest decimal form that round-trips.
  std::string label() const {
    if (kind_ == FamilyKind::custom) return custom_->spec.name;
    auto shortest = [](double v) {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      return std::string(buf, res.ptr);
    };
    std::string out(to_string(kind_));
    if (kappa_) out += "(kappa=" + shortest(*kappa_) + ")";
    if (base_) out += "(base=" + shortest(*base_) + ")";
    return out;
  }

  friend bool operator==(const LogFamily& a, const LogFamily& b) noexcept {
    return a.kind_ == b.kind_ && a.kappa_ == b.kappa_ && a.base_ == b.base_ &&
           a.custom_ == b.custom_;
  }

 private:
  explicit LogFamily(FamilyKind kind) : kind_(kind) {}

  FamilyKind kind_;
  std::optional<double> kappa_;
  std::optional<double> base_;
  double f_zero_ = 0.0;
  double ln_zero_ = -detail::kInf;
  double ln_inf_ = detail::kInf;
  std::shared_ptr<const detail::CustomData> custom_;

  friend double custom_big_f(const LogFamily& fam, double x);
};

namespace detail {

/// Index n of the segment [a^n, a^(n+1)) containing x.
inline int knot_index(double a, double x) {
  int n = static_cast<int>(std::floor(std::log(x) / std::log(a)));
  while (std::pow(a, n) > x) --n;
  while (std::pow(a, n + 1) <= x) ++n;
  return n;
}

inline double custom_integral_from_zero(const CustomLog& spec, double x) {
  try {
    return numerics::integrate(spec.ln, 0.0, x, spec.quadrature,
                               spec.singularity_exponent);
  } catch (const NoConvergence& e) {
    throw QuadratureError(std::string("custom family '") + spec.name +
                          "': " + e.what());
  }
}

inline double custom_integral(const CustomLog& spec, double a, double b) {
  try {
    return numerics::integrate(spec.ln, a, b, spec.quadrature);
  } catch (const NoConvergence& e) {
    throw QuadratureError(std::string("custom family '") + spec.name +
                          "': " + e.what());
  }
}

}  // namespace detail

inline double custom_big_f(const LogFamily& fam, double x) {
  const CustomLog& spec = fam.custom_->spec;
  if (x == 1.0) return 0.0;
  if (x == 0.0) return fam.f_zero_;
  // Below the grading zone, integrate from the singular endpoint.
  if (x < 0.1) return fam.f_zero_ + detail::custom_integral_from_zero(spec, x);
  return detail::custom_integral(spec, 1.0, x);
}

inline LogFamily LogFamily::custom(CustomLog spec) {
  if (!spec.ln) throw ParamError("custom family requires a logarithm callable");
  const double s = spec.singularity_exponent;
  if (!(s >= 0.0 && s < 1.0)) {
    throw ParamError("custom family: singularity exponent must lie in [0,1)");
  }
  spec.quadrature.validate();
  if (!(std::abs(spec.ln(1.0)) <= 1e-12)) {
    throw ParamError("custom family: ln(1) must vanish");
  }
  constexpr int kGrid = 241;
  double prev_x = 0.0;
  double prev_y = 0.0;
  double prev_slope = detail::kInf;
  for (int i = 0; i < kGrid; ++i) {
    const double x = std::pow(10.0, -6.0 + 12.0 * i / (kGrid - 1));
    const double y = spec.ln(x);
    if (!std::isfinite(y)) {
      throw ParamError("custom family: ln is not finite on (0, inf)");
    }
    if (i > 0) {
      if (!(y > prev_y)) {
        throw ParamError("custom family: ln is not strictly increasing");
      }
      const double slope = (y - prev_y) / (x - prev_x);
      if (slope > prev_slope * (1.0 + 1e-9) + 1e-12) {
        throw ParamError("custom family: ln is not concave");
      }
      prev_slope = slope;
    }
    prev_x = x;
    prev_y = y;
  }
  LogFamily f(FamilyKind::custom);
  f.ln_zero_ = spec.lower_limit;
  f.ln_inf_ = spec.upper_limit;
  auto data = std::make_shared<detail::CustomData>();
  data->spec = std::move(spec);
  data->f_zero = -detail::custom_integral_from_zero(data->spec, 1.0);
  if (!std::isfinite(data->f_zero)) {
    throw ParamError("custom family: F(0) is not finite");
  }
  f.f_zero_ = data->f_zero;
  f.custom_ = std::move(data);
  return f;
}

/// ln_phi(x) for x > 0.
inline double ln_phi(const LogFamily& fam, double x) {
  if (!(x > 0.0)) throw DomainError("ln_phi requires x > 0");
  if (std::isinf(x)) return fam.ln_at_infinity();
  const double lx = std::log(x);
  switch (fam.kind()) {
    case FamilyKind::shannon:
      return lx;
    case FamilyKind::tsallis: {
      const double k = *fam.kappa();
      return (1.0 + k) * std::expm1(k * lx) / k;
    }
    case FamilyKind::kaniadakis: {
      const double k = *fam.kappa();
      return std::sinh(k * lx) / k;
    }
    case FamilyKind::kappa_maxwell: {
      const double k = *fam.kappa();
      return -k * std::expm1(-lx / (1.0 + k));
    }
    case FamilyKind::sqrt_log:
      return std::sqrt(x) - 1.0;
    case FamilyKind::piecewise_linear: {
      const double a = *fam.base();
      const int n = detail::knot_index(a, x);
      const double knot = std::pow(a, n);
      return n + (x - knot) / (knot * (a - 1.0));
    }
    case FamilyKind::custom:
      return fam.custom_spec()->ln(x);
  }
  return std::nan("");
}

/// Inverse of ln_phi; 0 below the range of ln_phi and +inf above it.
inline double exp_phi(const LogFamily& fam, double y) {
  if (std::isnan(y)) return y;
  if (y <= fam.ln_at_zero()) return 0.0;
  if (y >= fam.ln_at_infinity()) return detail::kInf;
  switch (fam.kind()) {
    case FamilyKind::shannon:
      return std::exp(y);
    case FamilyKind::tsallis: {
      const double k = *fam.kappa();
      const double shifted = y * k / (1.0 + k);
      if (shifted <= -1.0) return k > 0.0 ? 0.0 : detail::kInf;
      return std::exp(std::log1p(shifted) / k);
    }
    case FamilyKind::kaniadakis: {
      const double k = *fam.kappa();
      return std::exp(std::asinh(k * y) / k);
    }
    case FamilyKind::kappa_maxwell: {
      const double k = *fam.kappa();
      return std::exp(-(1.0 + k) * std::log1p(-y / k));
    }
    case FamilyKind::sqrt_log:
      return (1.0 + y) * (1.0 + y);
    case FamilyKind::piecewise_linear: {
      const double a = *fam.base();
      if (std::isinf(y)) return y > 0 ? detail::kInf : 0.0;
      const double n = std::floor(y);
      return std::pow(a, n) * (1.0 + (y - n) * (a - 1.0));
    }
    case FamilyKind::custom: {
      const auto& ln = fam.custom_spec()->ln;
      // Bisect on u = log x so that expansion covers the whole double range.
      auto in_log = [&](double u) {
        const double x = std::exp(u);
        if (x <= 0.0) return -detail::kInf;
        if (std::isinf(x)) return detail::kInf;
        return ln(x);
      };
      try {
        const double u = numerics::bisect_monotone(in_log, y, -1.0, 1.0, 1e-14);
        return std::exp(u);
      } catch (const BracketError&) {
        return in_log(0.0) > y ? 0.0 : detail::kInf;
      }
    }
  }
  return std::nan("");
}

/// F_phi(x) = integral of ln_phi from 1 to x, for x >= 0.
inline double big_f(const LogFamily& fam, double x) {
  if (!(x >= 0.0)) throw DomainError("big_f requires x >= 0");
  if (x == 0.0) return fam.f_zero();
  if (x == 1.0) return 0.0;
  const double lx = std::log(x);
  switch (fam.kind()) {
    case FamilyKind::shannon:
      return x * lx - x + 1.0;
    case FamilyKind::tsallis: {
      // (x^(1+k) - 1)/k - (1 + 1/k)(x - 1), rearranged to avoid cancellation.
      const double k = *fam.kappa();
      return x * std::expm1(k * lx) / k - (x - 1.0);
    }
    case FamilyKind::kaniadakis: {
      const double k = *fam.kappa();
      const double up = std::expm1((1.0 + k) * lx) / (1.0 + k);
      const double down = std::expm1((1.0 - k) * lx) / (1.0 - k);
      return (up - down) / (2.0 * k);
    }
    case FamilyKind::kappa_maxwell: {
      const double k = *fam.kappa();
      return k * (x - 1.0) - (1.0 + k) * std::expm1(k / (1.0 + k) * lx);
    }
    case FamilyKind::sqrt_log:
      return 2.0 / 3.0 * x * std::sqrt(x) - x + 1.0 / 3.0;
    case FamilyKind::piecewise_linear: {
      const double a = *fam.base();
      const double f0 = fam.f_zero();
      const int n = detail::knot_index(a, x);
      const double knot = std::pow(a, n);
      const double t = (x - knot) / (knot * (a - 1.0));
      // integral over [0, a^n] is a^n (n - F(0)) by self-similarity.
      return f0 + knot * (n - f0) + (x - knot) * (n + 0.5 * t);
    }
    case FamilyKind::custom:
      return custom_big_f(fam, x);
  }
  return std::nan("");
}

/// Deduced logarithm (x - 1) F(0) - x F(1/x). Built-in families use
/// closed forms that stay accurate for large x.
inline double omega_phi(const LogFamily& fam, double x) {
  if (!(x > 0.0)) throw DomainError("omega_phi requires x > 0");
  if (x == 1.0) return 0.0;
  const double lx = std::log(x);
  switch (fam.kind()) {
    case FamilyKind::shannon:
      return lx;
    case FamilyKind::tsallis: {
      const double k = *fam.kappa();
      return -std::expm1(-k * lx) / k;
    }
    case FamilyKind::kaniadakis: {
      const double k = *fam.kappa();
      return (std::expm1(k * lx) / (1.0 - k) - std::expm1(-k * lx) / (1.0 + k)) /
             (2.0 * k);
    }
    case FamilyKind::kappa_maxwell: {
      const double k = *fam.kappa();
      return (1.0 + k) * std::expm1(lx / (1.0 + k));
    }
    case FamilyKind::sqrt_log:
      return 2.0 / 3.0 * (1.0 - 1.0 / std::sqrt(x));
    case FamilyKind::piecewise_linear: {
      // x (F(0) - F(y)) - F(0) with F(0) - F(y) = -integral of ln_phi over [0, y].
      const double a = *fam.base();
      const double f0 = fam.f_zero();
      const double y = 1.0 / x;
      const int n = detail::knot_index(a, y);
      const double knot = std::pow(a, n);
      const double t = (y - knot) / (knot * (a - 1.0));
      const double head = -(knot * (n - f0) + (y - knot) * (n + 0.5 * t));
      return x * head - f0;
    }
    case FamilyKind::custom:
      break;
  }
  return (x - 1.0) * fam.f_zero() - x * big_f(fam, 1.0 / x);
}

/// ln_phi'(x) = 1/phi(x).
inline double ln_phi_prime(const LogFamily& fam, double x) {
  if (!(x > 0.0) || std::isinf(x)) {
    throw DomainError("ln_phi_prime requires finite x > 0");
  }
  const double lx = std::log(x);
  switch (fam.kind()) {
    case FamilyKind::shannon:
      return 1.0 / x;
    case FamilyKind::tsallis: {
      const double k = *fam.kappa();
      return (1.0 + k) * std::exp((k - 1.0) * lx);
    }
    case FamilyKind::kaniadakis: {
      const double k = *fam.kappa();
      return std::cosh(k * lx) / x;
    }
    case FamilyKind::kappa_maxwell: {
      const double k = *fam.kappa();
      return k / (1.0 + k) * std::exp(-(2.0 + k) / (1.0 + k) * lx);
    }
    case FamilyKind::sqrt_log:
      return 0.5 / std::sqrt(x);
    case FamilyKind::piecewise_linear: {
      const double a = *fam.base();
      const int n = detail::knot_index(a, x);
      const double knot = std::pow(a, n);
      if (x == knot) {
        throw NonDifferentiableError(
            "piecewise_linear logarithm has a kink at x = a^n");
      }
      return 1.0 / (knot * (a - 1.0));
    }
    case FamilyKind::custom: {
      const CustomLog& spec = *fam.custom_spec();
      if (spec.derivative) return spec.derivative(x);
      return numerics::richardson_diff(spec.ln, x, 1e-3 * x);
    }
  }
  return std::nan("");
}

/// Kappa distribution A [1 + beta v^2 / (2 kappa v0^2)]^(-1-kappa).
inline double kappa_maxwell_density(const LogFamily& fam, double amplitude,
                                    double beta, double v, double v0) {
  if (fam.kind() != FamilyKind::kappa_maxwell) {
    throw FamilyError("kappa_maxwell_density requires the kappa_maxwell family");
  }
  if (!(amplitude > 0.0) || !(beta > 0.0) || !(v0 > 0.0)) {
    throw ParamError("amplitude, beta and v0 must be positive");
  }
  const double k = *fam.kappa();
  const double u = beta * v * v / (v0 * v0);
  return amplitude * std::exp(-(1.0 + k) * std::log1p(u / (2.0 * k)));
}

}  // namespace deformed
