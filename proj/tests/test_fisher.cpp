// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "support.hpp"

namespace {

using namespace deformed;
using deformed::testing::all_families;

std::vector<LogFamily> smooth_families() {
  std::vector<LogFamily> out;
  for (const LogFamily& f : all_families()) {
    if (f.kind() != FamilyKind::piecewise_linear) out.push_back(f);
  }
  return out;
}

double min_eigenvalue(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(e).eigenvalues().minCoeff();
}

TEST(Bernoulli, Examples) {
  const ParametricModel m = models::bernoulli();
  const std::vector<double> theta = {0.5};
  EXPECT_NEAR(fisher_g1(LogFamily::shannon(), m, theta)(0, 0), 4.0, 1e-8);
  EXPECT_NEAR(fisher_g1(LogFamily::tsallis(0.5), m, theta)(0, 0), 6.0, 1e-8);
  EXPECT_NEAR(fisher_g2(LogFamily::shannon(), m, theta)(0, 0), 4.0, 1e-8);
}

TEST(Bernoulli, ClassicalOracle) {
  const ParametricModel m = models::bernoulli();
  for (double t : {0.1, 0.35, 0.8}) {
    const std::vector<double> theta = {t};
    EXPECT_NEAR(classical_fisher(m, theta)(0, 0), 1.0 / (t * (1.0 - t)),
                1e-6 / (t * (1.0 - t)));
    for (const LogFamily& fam : smooth_families()) {
      const double g2 = ln_phi_prime(fam, t) + ln_phi_prime(fam, 1.0 - t);
      EXPECT_NEAR(fisher_g2(fam, m, theta)(0, 0), g2, 1e-6 * g2) << fam.label();
    }
  }
}

TEST(Softmax, ClassicalOracle) {
  const ParametricModel m = models::softmax(4);
  const std::vector<double> theta = {0.3, -0.7, 1.1};
  const Pdf p = m.eval(theta);
  const Matrix g = classical_fisher(m, theta);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const double exact = (i == j ? p[i] : 0.0) - p[i] * p[j];
      EXPECT_NEAR(g(i, j), exact, 1e-8);
    }
  }
}

TEST(BinomialMixture, ClassicalOracle) {
  const ParametricModel m = models::binomial_mixture(4);
  const std::vector<double> theta = {0.6, 0.3};
  const Pdf p = m.eval(theta);
  auto bin = [](int k, double s) {
    const double c[] = {1, 4, 6, 4, 1};
    return c[k] * std::pow(s, k) * std::pow(1.0 - s, 4 - k);
  };
  auto dbin = [](int k, double s) {
    const double c[] = {1, 4, 6, 4, 1};
    double d = 0.0;
    if (k > 0) d += k * std::pow(s, k - 1) * std::pow(1.0 - s, 4 - k);
    if (k < 4) d -= (4 - k) * std::pow(s, k) * std::pow(1.0 - s, 3 - k);
    return c[k] * d;
  };
  double exact[2][2] = {{0, 0}, {0, 0}};
  for (int k = 0; k <= 4; ++k) {
    const double dw = bin(k, 0.3) - bin(k, 0.5);
    const double dt = 0.6 * dbin(k, 0.3);
    const double d[2] = {dw, dt};
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) exact[i][j] += d[i] * d[j] / p[static_cast<std::size_t>(k)];
    }
  }
  const Matrix g = classical_fisher(m, theta);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_NEAR(g(i, j), exact[i][j], 1e-7 * (1.0 + std::abs(exact[i][j])));
    }
  }
}

TEST(Metrics, SymmetricAndPsd) {
  const std::vector<std::pair<ParametricModel, std::vector<double>>> cases = {
      {models::bernoulli(), {0.3}},
      {models::softmax(3), {0.4, -0.2}},
      {models::softmax(5), {0.1, 0.5, -1.0, 0.3}},
      {models::binomial_mixture(), {0.4, 0.7}}};
  for (const LogFamily& fam : smooth_families()) {
    for (const auto& [model, theta] : cases) {
      for (const Matrix& g : {fisher_g1(fam, model, theta), fisher_g2(fam, model, theta)}) {
        for (std::size_t i = 0; i < g.rows(); ++i) {
          for (std::size_t j = 0; j < g.cols(); ++j) {
            EXPECT_NEAR(g(i, j), g(j, i), 1e-12);
          }
        }
        EXPECT_GE(min_eigenvalue(g), -1e-9) << fam.label() << " " << model.name;
      }
    }
  }
}

TEST(Metrics, G1IsPrefactorTimesClassical) {
  const ParametricModel m = models::softmax(4);
  const std::vector<double> theta = {0.2, 0.1, -0.4};
  const Matrix c = classical_fisher(m, theta);
  for (const LogFamily& fam : smooth_families()) {
    const Matrix g = fisher_g1(fam, m, theta);
    const double pre = ln_phi_prime(fam, 1.0);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_NEAR(g(i, j), pre * c(i, j), 1e-5 * std::abs(pre * c(i, j)) + 1e-14);
      }
    }
  }
}

TEST(Metrics, ShannonG1EqualsG2) {
  const ParametricModel m = models::binomial_mixture();
  const std::vector<double> theta = {0.3, 0.6};
  const Matrix g1 = fisher_g1(LogFamily::shannon(), m, theta);
  const Matrix g2 = fisher_g2(LogFamily::shannon(), m, theta);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_NEAR(g1(i, j), g2(i, j), 1e-6 * std::abs(g1(i, j)));
    }
  }
}

TEST(Metrics, PiecewiseRefusesG1) {
  EXPECT_THROW(fisher_g1(LogFamily::piecewise_linear(2.0), models::bernoulli(),
                         std::vector<double>{0.3}),
               NonDifferentiableError);
}

TEST(Metrics, Reparametrisation) {
  ParametricModel logistic;
  logistic.dim_theta = 1;
  logistic.dim_p = 2;
  logistic.name = "logistic";
  logistic.eval = [](std::span<const double> s) {
    const double t = 1.0 / (1.0 + std::exp(-s[0]));
    return Pdf::validate({t, 1.0 - t});
  };
  const double s = 0.4;
  const double t = 1.0 / (1.0 + std::exp(-s));
  const double h_prime = t * (1.0 - t);
  for (const LogFamily& fam : smooth_families()) {
    const double g_s = fisher_g2(fam, logistic, std::vector<double>{s})(0, 0);
    const double g_t = fisher_g2(fam, models::bernoulli(), std::vector<double>{t})(0, 0);
    EXPECT_NEAR(g_s, g_t * h_prime * h_prime, 1e-4 * g_s) << fam.label();
  }
}

TEST(Expansion, ZeroStep) {
  const auto r = expansion_check(LogFamily::tsallis(0.5), models::bernoulli(),
                                 std::vector<double>{0.5}, std::vector<double>{0.0});
  EXPECT_EQ(r.r1, 0.0);
  EXPECT_EQ(r.r2, 0.0);
}

TEST(Expansion, ShannonSmallStep) {
  const auto r = expansion_check(LogFamily::shannon(), models::bernoulli(),
                                 std::vector<double>{0.5}, std::vector<double>{1e-3});
  EXPECT_LE(r.r1, 1e-9);
  EXPECT_LE(r.r2, 1e-9);
  EXPECT_LE(r.symmetry, 1e-9);
}

TEST(Expansion, StepLeavingModel) {
  EXPECT_THROW(expansion_check(LogFamily::shannon(), models::bernoulli(),
                               std::vector<double>{0.5}, std::vector<double>{0.6}),
               StepTooLarge);
  EXPECT_THROW(fisher_g2(LogFamily::shannon(), models::binomial_mixture(),
                         std::vector<double>{0.5}),
               LengthMismatch);
}

TEST(Expansion, LadderOrder) {
  const std::vector<double> dir = {1.0};
  for (const LogFamily& fam : smooth_families()) {
    for (double t : {0.5, 0.3}) {
      const LadderReport l = expansion_ladder(fam, models::bernoulli(),
                                              std::vector<double>{t}, dir);
      EXPECT_GE(l.min_order, 2.8) << fam.label() << " theta=" << t;
    }
  }
}

}  // namespace
