// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "fisherspike/clt.hpp"
#include "fisherspike/error.hpp"
#include "fisherspike/stats.hpp"
#include "oracles.hpp"

namespace fisherspike {
namespace {

constexpr Ratios kRatios{0.2, 0.5};
const SpectralModel kUnit = SpectralModel::unit(0.2, 0.5);

struct OracleBundle {
  double psi, m, m2, m3, mu, mu2;
};

OracleBundle oracle_bundle(double alpha) {
  OracleBundle o{};
  o.psi = oracle::psi_unit(alpha, kRatios.c1, kRatios.c2);
  o.m = oracle::m_at_psi_unit(alpha, kRatios.c1, kRatios.c2);
  o.m2 = oracle::m2_at_psi_unit(alpha, kRatios.c1, kRatios.c2);
  o.m3 = o.psi * o.m2 + o.m;
  const double y1 = kRatios.c1;
  o.mu = -(1.0 - y1) / o.psi + y1 * o.m;
  o.mu2 = (1.0 - y1) / (o.psi * o.psi) + y1 * o.m2;
  return o;
}

CltLaw gaussian_law(double alpha, Regime regime = Regime::kAssumptionD) {
  const auto phase = classify(alpha, kUnit, kRatios);
  const auto bundle = stieltjes(phase.psi_n, kUnit);
  const auto g = MomentProfile::for_distribution(SampleDistribution::kGaussian);
  return limit_law(phase, bundle, g, g, regime, kRatios, 1, 196);
}

TEST(Transforms, ClosedFormAtPsi) {
  for (double alpha : {0.01, 0.1, 0.2, 5.0, 20.0, 300.0}) {
    const auto o = oracle_bundle(alpha);
    const auto b = stieltjes(o.psi, kUnit);
    EXPECT_NEAR(b.m(), o.m, 1e-10 * std::abs(o.m)) << alpha;
    EXPECT_NEAR(b.m2(), o.m2, 1e-7 * o.m2) << alpha;
  }
}

TEST(Transforms, DefiningEquationResidual) {
  for (double alpha : {20.0, 0.2, 0.1}) {
    const double psi = psi_n(alpha, kUnit, kRatios);
    const auto b = stieltjes(psi, kUnit);
    const double r = psi + kRatios.c2 * psi * psi * b.m() + psi * b.m_under() * alpha;
    EXPECT_LT(std::abs(r), 1e-6 * psi) << alpha;
  }
}

TEST(Coefficients, MatchOracleTransforms) {
  for (double alpha : {0.1, 0.2, 20.0}) {
    const auto o = oracle_bundle(alpha);
    const auto b = stieltjes(o.psi, kUnit);
    const double c1 = kRatios.c1, c2 = kRatios.c2;
    const double kappa = 1 + c2 * o.psi * o.psi * o.m2 + 2 * c2 * o.psi * o.m + alpha * o.psi * o.mu2 +
                         alpha * o.mu;
    const double theta = c2 + c2 * c2 * o.psi * o.psi * o.m2 + 2 * c2 * c2 * o.psi * o.m +
                         c1 * alpha * alpha * o.mu2 + 2 * c1 * c2 * alpha * o.m3;
    EXPECT_NEAR(kappa_s(alpha, o.psi, b, c2), kappa, 1e-6 * std::abs(kappa)) << alpha;
    EXPECT_NEAR(theta_k(alpha, o.psi, b, kRatios), theta, 1e-6 * std::abs(theta)) << alpha;
    const auto nu = nu_coefficients(alpha, o.psi, b, kRatios);
    const double f = o.psi * (1 + c1 * o.m);
    EXPECT_NEAR(nu.nu1, c1 * alpha * alpha / (f * f), 1e-9 * nu.nu1);
    EXPECT_NEAR(nu.nu2, c2 * std::pow(1 + c2 * o.psi * o.m, 2), 1e-9 * nu.nu2);
  }
}

TEST(Coefficients, MismatchedBundleThrows) {
  const auto b = stieltjes(50.0, kUnit);
  try {
    kappa_s(20.0, 42.0, b, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMismatch);
  }
}

TEST(LimitLaw, AssumptionDStructure) {
  const auto law = gaussian_law(0.1);
  EXPECT_DOUBLE_EQ(law.var_diag, 2.0 * law.theta);
  EXPECT_DOUBLE_EQ(law.var_off, law.theta);
  EXPECT_EQ(law.scale_dim, 196u);
  EXPECT_DOUBLE_EQ(law.sigma2(), law.var_diag / (law.kappa * law.kappa));
}

TEST(LimitLaw, GaussianRegimesCoincide) {
  for (double alpha : {0.1, 0.2, 20.0}) {
    const auto a = gaussian_law(alpha, Regime::kAssumptionD);
    const auto d = gaussian_law(alpha, Regime::kDiagonalBlock);
    EXPECT_EQ(a.var_diag, d.var_diag);
    EXPECT_EQ(a.sigma2(), d.sigma2());
  }
}

TEST(LimitLaw, RademacherDiagonalBlockShift) {
  const auto phase = classify(0.2, kUnit, kRatios);
  const auto b = stieltjes(phase.psi_n, kUnit);
  const auto r = MomentProfile::for_distribution(SampleDistribution::kRademacher);
  EXPECT_DOUBLE_EQ(r.beta, -2.0);
  const auto law = limit_law(phase, b, r, r, Regime::kDiagonalBlock, kRatios, 2, 196);
  EXPECT_NEAR(law.var_diag, 2 * law.theta - 2 * (law.nu1 + law.nu2), 1e-14);
  // Delocalized eigenvectors (sum u^4 -> 0) remove the shift.
  const auto flat = MomentProfile::for_distribution(SampleDistribution::kRademacher, {0.0, 0.0});
  EXPECT_EQ(flat.beta, 0.0);
}

TEST(LimitLaw, SigmaMonotoneInDiagonalVariance) {
  auto law = gaussian_law(20.0);
  double prev = 0.0;
  for (double v : {0.1, 0.5, 1.0, 3.0}) {
    law.var_diag = v;
    EXPECT_GT(law.sigma2(), prev);
    prev = law.sigma2();
  }
}

TEST(LimitLaw, Errors) {
  const auto phase = classify(1.2, kUnit, kRatios);
  const auto g = MomentProfile::for_distribution(SampleDistribution::kGaussian);
  const auto b = stieltjes(20.0, kUnit);
  try {
    limit_law(phase, b, g, g, Regime::kAssumptionD, kRatios, 1, 199);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedModel);
  }
  const auto distant = classify(20.0, kUnit, kRatios);
  const auto bd = stieltjes(distant.psi_n, kUnit);
  const auto heavy = MomentProfile::for_distribution(SampleDistribution::kHeavyTail4);
  EXPECT_TRUE(std::isinf(heavy.beta));
  EXPECT_THROW(limit_law(distant, bd, heavy, g, Regime::kDiagonalBlock, kRatios, 1, 199), Error);
  EXPECT_NO_THROW(limit_law(distant, bd, heavy, g, Regime::kAssumptionD, kRatios, 1, 199));
}

TEST(Regime, ParseRoundTrip) {
  for (auto r : {Regime::kAssumptionD, Regime::kDiagonalBlock}) EXPECT_EQ(parse_regime(to_string(r)), r);
  EXPECT_THROW(parse_regime("goe"), Error);
}

TEST(SampleLimit, SingleSpikeVariance) {
  const auto law = gaussian_law(0.1);
  const auto draws = sample_limit(law, 100000, 17);
  std::vector<double> xs;
  for (const auto& v : draws) xs.push_back(v[0]);
  EXPECT_NEAR(variance(xs), law.sigma2(), 0.02 * law.sigma2());
}

TEST(SampleLimit, TwoByTwoTraceIsNormalWithVarianceFour) {
  CltLaw law;
  law.var_diag = 2.0;
  law.var_off = 1.0;
  law.kappa = 1.0;
  law.multiplicity = 2;
  const auto draws = sample_limit(law, 100000, 5);
  std::vector<double> tr;
  for (const auto& v : draws) {
    ASSERT_GE(v[0], v[1]);
    tr.push_back(v[0] + v[1]);
  }
  EXPECT_NEAR(variance(tr), 4.0, 0.08);
  EXPECT_GT(ks_one_sample(tr, [](double x) { return normal_cdf(x, 2.0); }).p_value, 0.001);
}

TEST(SampleLimit, ReflectionSymmetry) {
  // W and -W share a law, so (l1, l2) and (-l2, -l1) do too.
  CltLaw law;
  law.var_diag = 2.0;
  law.var_off = 1.0;
  law.kappa = 1.3;
  law.multiplicity = 2;
  const auto draws = sample_limit(law, 40000, 8);
  std::vector<double> top, bottom;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    (i % 2 ? top : bottom).push_back(i % 2 ? draws[i][0] : -draws[i][1]);
  }
  EXPECT_GT(ks_two_sample(top, bottom).p_value, 0.001);
}

TEST(SampleLimit, DeterministicPerSeed) {
  const auto law = gaussian_law(0.2);
  auto two = law;
  two.multiplicity = 2;
  const auto a = sample_limit(two, 50, 1);
  const auto b = sample_limit(two, 50, 1);
  const auto c = sample_limit(two, 50, 2);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  EXPECT_NE(a[0], c[0]);
  EXPECT_THROW(sample_limit(two, 0, 1), Error);
}

}  // namespace
}  // namespace fisherspike
