// SPDX-License-Identifier: Apache-2.0
#pragma once

/// Generalised Fisher metrics over parametric families of distributions.
///
///   g1_ij = ln'(1)  sum_k p_k  d_i log p_k  d_j log p_k   (from I(p||q))
///   g2_ij =         sum_k ln'(p_k)  d_i p_k  d_j p_k       (from D(p||q))
///
/// Model derivatives are central differences extrapolated once.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "deformed/distributions.hpp"
#include "deformed/errors.hpp"
#include "deformed/functionals.hpp"
#include "deformed/log_family.hpp"
#include "deformed/numerics.hpp"

namespace deformed {

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  /// v^T M v.
  double quadratic(std::span<const double> v) const {
    numerics::CompensatedSum acc;
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) acc += v[i] * (*this)(i, j) * v[j];
    }
    return acc.value();
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

struct ParametricModel {
  std::size_t dim_theta = 1;
  std::size_t dim_p = 1;
  std::function<Pdf(std::span<const double>)> eval;
  double fd_step = 1e-5;
  std::string name = "model";
};

/// dim_p x dim_theta matrix of dp_k/dtheta_i.
inline Matrix jacobian(const ParametricModel& model,
                       std::span<const double> theta) {
  if (theta.size() != model.dim_theta) {
    throw LengthMismatch("theta has " + std::to_string(theta.size()) +
                         " components, model expects " +
                         std::to_string(model.dim_theta));
  }
  Matrix jac(model.dim_p, model.dim_theta);
  std::vector<double> shifted(theta.begin(), theta.end());
  for (std::size_t i = 0; i < model.dim_theta; ++i) {
    for (std::size_t k = 0; k < model.dim_p; ++k) {
      auto coordinate = [&](double t) {
        shifted[i] = t;
        const double v = model.eval(shifted)[k];
        shifted[i] = theta[i];
        return v;
      };
      jac(k, i) = numerics::richardson_diff(coordinate, theta[i], model.fd_step);
    }
    double mass = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < model.dim_p; ++k) {
      mass += jac(k, i);
      scale += std::abs(jac(k, i));
    }
    if (std::abs(mass) > 1e-8 * (1.0 + scale)) {
      throw DomainError(model.name + ": derivatives do not conserve mass");
    }
  }
  return jac;
}

namespace detail {

inline Pdf strictly_positive_eval(const ParametricModel& model,
                                  std::span<const double> theta) {
  if (theta.size() != model.dim_theta) {
    throw LengthMismatch("theta has " + std::to_string(theta.size()) +
                         " components, model expects " +
                         std::to_string(model.dim_theta));
  }
  Pdf p = model.eval(theta);
  if (p.size() != model.dim_p) {
    throw LengthMismatch(model.name + ": eval returned the wrong length");
  }
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!(p[k] > 0.0)) {
      throw ZeroProbability(model.name + ": p_" + std::to_string(k) +
                            " vanishes at theta");
    }
  }
  return p;
}

}  // namespace detail

/// Classical Fisher matrix sum_k d_i p_k d_j p_k / p_k.
inline Matrix classical_fisher(const ParametricModel& model,
                               std::span<const double> theta) {
  const Pdf p = detail::strictly_positive_eval(model, theta);
  const Matrix jac = jacobian(model, theta);
  Matrix g(model.dim_theta, model.dim_theta);
  for (std::size_t i = 0; i < model.dim_theta; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      numerics::CompensatedSum acc;
      for (std::size_t k = 0; k < model.dim_p; ++k) {
        acc += jac(k, i) * jac(k, j) / p[k];
      }
      g(i, j) = g(j, i) = acc.value();
    }
  }
  return g;
}

/// Metric induced by I(p||q): ln'(1) times the classical Fisher matrix.
/// Refused when ln is not differentiable at 1 (piecewise_linear).
inline Matrix fisher_g1(const LogFamily& fam, const ParametricModel& model,
                        std::span<const double> theta) {
  const double prefactor = ln_phi_prime(fam, 1.0);
  Matrix g = classical_fisher(model, theta);
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) g(i, j) *= prefactor;
  }
  return g;
}

/// Metric induced by D(p||q): sum_k ln'(p_k) d_i p_k d_j p_k.
inline Matrix fisher_g2(const LogFamily& fam, const ParametricModel& model,
                        std::span<const double> theta) {
  const Pdf p = detail::strictly_positive_eval(model, theta);
  const Matrix jac = jacobian(model, theta);
  std::vector<double> weight(model.dim_p);
  for (std::size_t k = 0; k < model.dim_p; ++k) {
    weight[k] = ln_phi_prime(fam, p[k]);
  }
  Matrix g(model.dim_theta, model.dim_theta);
  for (std::size_t i = 0; i < model.dim_theta; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      numerics::CompensatedSum acc;
      for (std::size_t k = 0; k < model.dim_p; ++k) {
        acc += weight[k] * jac(k, i) * jac(k, j);
      }
      g(i, j) = g(j, i) = acc.value();
    }
  }
  return g;
}

/// Second-order agreement between the divergences and their metrics at a
/// displacement dtheta.
struct ExpansionReport {
  double rel_entropy_forward;   // I(p+dp || p)
  double rel_entropy_backward;  // I(p || p+dp)
  double divergence_forward;    // D(p+dp || p)
  double quad_g1;               // dtheta^T g1 dtheta
  double quad_g2;               // dtheta^T g2 dtheta
  double r1;                    // |2 I(p+dp||p) - quad_g1|
  double r2;                    // |2 D(p+dp||p) - quad_g2|
  double symmetry;              // |I(p+dp||p) - I(p||p+dp)|
};

inline ExpansionReport expansion_check(const LogFamily& fam,
                                       const ParametricModel& model,
                                       std::span<const double> theta,
                                       std::span<const double> dtheta) {
  if (dtheta.size() != theta.size()) {
    throw LengthMismatch("dtheta and theta differ in length");
  }
  const Pdf p = detail::strictly_positive_eval(model, theta);
  std::vector<double> moved(theta.begin(), theta.end());
  for (std::size_t i = 0; i < moved.size(); ++i) moved[i] += dtheta[i];
  Pdf p_moved = p;
  try {
    p_moved = detail::strictly_positive_eval(model, moved);
  } catch (const Error& e) {
    throw StepTooLarge(std::string("displaced parameters leave the model: ") +
                       e.what());
  }
  const Matrix g1 = fisher_g1(fam, model, theta);
  const Matrix g2 = fisher_g2(fam, model, theta);
  ExpansionReport rep{};
  rep.rel_entropy_forward = rel_entropy(fam, p_moved, p);
  rep.rel_entropy_backward = rel_entropy(fam, p, p_moved);
  rep.divergence_forward = divergence(fam, p_moved, p);
  rep.quad_g1 = g1.quadratic(dtheta);
  rep.quad_g2 = g2.quadratic(dtheta);
  rep.r1 = std::abs(2.0 * rep.rel_entropy_forward - rep.quad_g1);
  rep.r2 = std::abs(2.0 * rep.divergence_forward - rep.quad_g2);
  rep.symmetry = std::abs(rep.rel_entropy_forward - rep.rel_entropy_backward);
  return rep;
}

struct LadderReport {
  std::vector<double> scales;
  std::vector<ExpansionReport> steps;
  /// log2(r(h) / r(h/2)) between consecutive rungs, per residual.
  std::vector<double> order_r1;
  std::vector<double> order_r2;
  double min_order = 0.0;
};

/// Runs expansion_check at dtheta = scale * direction for each scale.
inline LadderReport expansion_ladder(const LogFamily& fam,
                                     const ParametricModel& model,
                                     std::span<const double> theta,
                                     std::span<const double> direction,
                                     std::vector<double> scales = {1e-2, 5e-3,
                                                                   2.5e-3}) {
  LadderReport out;
  out.scales = scales;
  std::vector<double> step(direction.size());
  for (double s : scales) {
    for (std::size_t i = 0; i < step.size(); ++i) step[i] = s * direction[i];
    out.steps.push_back(expansion_check(fam, model, theta, step));
  }
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < out.steps.size(); ++i) {
    const double shrink = std::log2(out.scales[i - 1] / out.scales[i]);
    const double o1 =
        std::log2(out.steps[i - 1].r1 / out.steps[i].r1) / shrink;
    const double o2 =
        std::log2(out.steps[i - 1].r2 / out.steps[i].r2) / shrink;
    out.order_r1.push_back(o1);
    out.order_r2.push_back(o2);
    lowest = std::min({lowest, o1, o2});
  }
  out.min_order = lowest;
  return out;
}

namespace models {

/// p(theta) = (theta, 1 - theta), theta in (0,1).
inline ParametricModel bernoulli() {
  ParametricModel m;
  m.dim_theta = 1;
  m.dim_p = 2;
  m.name = "bernoulli";
  m.eval = [](std::span<const double> t) {
    if (!(t[0] > 0.0 && t[0] < 1.0)) throw DomainError("bernoulli: theta in (0,1)");
    return Pdf::validate({t[0], 1.0 - t[0]});
  };
  return m;
}

/// Softmax over n states with logits (theta_1, ..., theta_{n-1}, 0).
inline ParametricModel softmax(std::size_t n) {
  if (n < 2) throw ParamError("softmax needs at least two states");
  ParametricModel m;
  m.dim_theta = n - 1;
  m.dim_p = n;
  m.name = "softmax";
  m.eval = [n](std::span<const double> t) {
    double top = 0.0;
    for (double v : t) top = std::max(top, v);
    std::vector<double> w(n);
    for (std::size_t k = 0; k + 1 < n; ++k) w[k] = std::exp(t[k] - top);
    w[n - 1] = std::exp(-top);
    return Pdf::renormalize(std::move(w));
  };
  return m;
}

/// p_k = w Bin(k; m, t) + (1 - w) Bin(k; m, 1/2), theta = (w, t), k = 0..m.
inline ParametricModel binomial_mixture(int trials = 4) {
  if (trials < 1) throw ParamError("binomial_mixture needs trials >= 1");
  ParametricModel m;
  m.dim_theta = 2;
  m.dim_p = static_cast<std::size_t>(trials) + 1;
  m.name = "binomial_mixture";
  m.eval = [trials](std::span<const double> t) {
    const double w = t[0];
    const double s = t[1];
    if (!(w >= 0.0 && w <= 1.0) || !(s > 0.0 && s < 1.0)) {
      throw DomainError("binomial_mixture: w in [0,1], t in (0,1)");
    }
    std::vector<double> p(static_cast<std::size_t>(trials) + 1);
    double choose = 1.0;
    for (int k = 0; k <= trials; ++k) {
      if (k > 0) choose = choose * (trials - k + 1) / k;
      const double b = choose * std::pow(s, k) * std::pow(1.0 - s, trials - k);
      const double half = choose * std::pow(0.5, trials);
      p[static_cast<std::size_t>(k)] = w * b + (1.0 - w) * half;
    }
    return Pdf::validate(std::move(p));
  };
  return m;
}

}  // namespace models

}  // namespace deformed
