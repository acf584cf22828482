// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "fisherspike/error.hpp"
#include "fisherspike/simulate.hpp"
#include "fisherspike/theory.hpp"

namespace fisherspike {
namespace {

ModelConfig reference_config() {
  ModelConfig c;
  c.spikes = SpikeSpec({{20.0, 1}, {0.2, 2}, {0.1, 1}});
  return c;
}

ModelConfig small_config() {
  ModelConfig c;
  c.p = 20;
  c.n1 = 100;
  c.n2 = 60;
  c.spikes = SpikeSpec({{20.0, 1}});
  c.reps = 200;
  c.seed = 77;
  return c;
}

TEST(BuildSigma, CaseOneSpectrum) {
  auto c = reference_config();
  c.p = 6;
  c.n1 = 30;
  c.n2 = 15;
  const auto s = build_sigma(c);
  Eigen::VectorXd want(6);
  want << 20, 1, 1, 0.2, 0.2, 0.1;
  EXPECT_EQ(s.eigenvalues, want);
  EXPECT_TRUE(s.sigma1.isDiagonal());
  EXPECT_TRUE((s.sigma1_root * s.sigma1_root).isApprox(s.sigma1, 1e-14));
}

TEST(BuildSigma, CaseTwoSharesSpectrum) {
  auto c = reference_config();
  c.p = 40;
  c.sigma_case = SigmaCase::kCase2;
  const auto s = build_sigma(c);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.sigma1);
  Eigen::VectorXd ev = eig.eigenvalues().reverse();
  EXPECT_TRUE(ev.isApprox(population_spectrum(c), 1e-12));
  const Eigen::MatrixXd id = s.eigenvectors.transpose() * s.eigenvectors;
  EXPECT_TRUE(id.isIdentity(1e-12));
  EXPECT_TRUE((s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose())
                  .isApprox(s.sigma1, 1e-12));
  EXPECT_FALSE(s.sigma1.isDiagonal(1e-3));
  EXPECT_TRUE((s.sigma1_root * s.sigma1_root).isApprox(s.sigma1, 1e-12));
}

TEST(BuildSigma, ZeroRhoIsPermutedCaseOne) {
  auto c = reference_config();
  c.p = 12;
  c.sigma_case = SigmaCase::kCase2;
  c.rho = 0.0;
  const auto s = build_sigma(c);
  EXPECT_TRUE(s.sigma1.isDiagonal(1e-14));
  std::vector<double> diag(s.sigma1.diagonal().begin(), s.sigma1.diagonal().end());
  std::sort(diag.rbegin(), diag.rend());
  for (std::size_t i = 0; i < diag.size(); ++i) EXPECT_NEAR(diag[i], s.eigenvalues[i], 1e-14);
}

TEST(ModelConfig, Validation) {
  auto c = reference_config();
  c.sigma_case = SigmaCase::kCase2;
  c.rho = 1.0;
  EXPECT_THROW(c.validate(), Error);
  c = reference_config();
  c.n2 = 200;
  EXPECT_THROW(c.validate(), Error);
  c = reference_config();
  c.p = 4;
  EXPECT_THROW(c.validate(), Error);
  c = reference_config();
  c.reps = 0;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_NO_THROW(reference_config().validate());
  EXPECT_EQ(parse_sigma_case("II"), SigmaCase::kCase2);
  EXPECT_EQ(parse_ratio_convention(to_string(RatioConvention::kPMinusMOverN)),
            RatioConvention::kPMinusMOverN);
}

TEST(ModelConfig, RatioConventions) {
  auto c = reference_config();
  EXPECT_DOUBLE_EQ(c.ratios().c1, 0.2);
  EXPECT_DOUBLE_EQ(c.ratios().c2, 0.5);
  c.ratio_convention = RatioConvention::kPMinusMOverN;
  EXPECT_DOUBLE_EQ(c.ratios().c1, 0.196);
  EXPECT_DOUBLE_EQ(c.ratios().c2, 0.49);
}

TEST(FisherEigs, IdenticalSamplesGiveOnes) {
  Engine e(1);
  const Eigen::MatrixXd x = draw_matrix(SampleDistribution::kGaussian, 10, 40, e);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(10, 10);
  const auto ev = fisher_eigs(id, id, x, x);
  EXPECT_TRUE((ev.array() - 1.0).abs().maxCoeff() < 1e-10);
}

TEST(FisherEigs, MatchesNonsymmetricSolve) {
  Engine e(2);
  const Eigen::MatrixXd x = draw_matrix(SampleDistribution::kGaussian, 3, 12, e);
  const Eigen::MatrixXd y = draw_matrix(SampleDistribution::kGaussian, 3, 9, e);
  Eigen::MatrixXd s1(3, 3);
  s1 << 4, 1, 0.5, 1, 2, 0.3, 0.5, 0.3, 1;
  Eigen::MatrixXd s2(3, 3);
  s2 << 1, 0.2, 0, 0.2, 1.5, 0.1, 0, 0.1, 0.8;
  const auto ev = fisher_eigs(s1, s2, x, y);
  // Direct: R1 (X X^T/n1) R1 times the inverse of R2 (Y Y^T/n2) R2.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e1(s1), e2(s2);
  const Eigen::MatrixXd r1 = e1.operatorSqrt();
  const Eigen::MatrixXd r2 = e2.operatorSqrt();
  const Eigen::MatrixXd a = r1 * (x * x.transpose() / 12.0) * r1;
  const Eigen::MatrixXd b = r2 * (y * y.transpose() / 9.0) * r2;
  Eigen::EigenSolver<Eigen::MatrixXd> direct(a * b.inverse());
  std::vector<double> want;
  for (int i = 0; i < 3; ++i) {
    EXPECT_LT(std::abs(direct.eigenvalues()[i].imag()), 1e-10);
    want.push_back(direct.eigenvalues()[i].real());
  }
  std::sort(want.rbegin(), want.rend());
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(ev[i], want[i], 1e-8 * std::abs(want[i]));
}

TEST(FisherEigs, SingularDenominator) {
  Engine e(3);
  const Eigen::MatrixXd x = draw_matrix(SampleDistribution::kGaussian, 5, 10, e);
  const Eigen::MatrixXd y = draw_matrix(SampleDistribution::kGaussian, 5, 3, e);
  try {
    fisher_eigs_rooted(Eigen::MatrixXd(), Eigen::MatrixXd(), x, y);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kSingular);
  }
}

TEST(FisherEigs, ReferenceSizeExtremes) {
  const auto c = reference_config();
  const auto sigma = build_sigma(c);
  const auto rep = draw_replication(c, 0);
  const auto ev = fisher_eigs_rooted(sigma.sigma1_root, Eigen::MatrixXd(), rep.x, rep.y);
  ASSERT_EQ(ev.size(), 200);
  EXPECT_TRUE(std::is_sorted(ev.begin(), ev.end(), std::greater<>()));
  EXPECT_NEAR(ev[0], 42.667, 0.4 * 42.667);
  EXPECT_NEAR(ev[199], 0.0737, 0.4 * 0.0737);
}

TEST(Replication, DeterministicAndIndependent) {
  const auto c = small_config();
  const auto a = draw_replication(c, 3);
  const auto b = draw_replication(c, 3);
  const auto d = draw_replication(c, 4);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_NE(a.x, d.x);
  EXPECT_EQ(a.x.rows(), 20);
  EXPECT_EQ(a.x.cols(), 100);
  EXPECT_EQ(a.y.cols(), 60);
}

TEST(RunMc, SingleReplicationFlagsVariance) {
  auto c = small_config();
  c.reps = 1;
  const auto t = compute_theory(c);
  const auto r = run_mc(c, t.laws());
  ASSERT_EQ(r.groups.size(), 1u);
  EXPECT_EQ(r.groups[0].gamma.size(), 1u);
  EXPECT_FALSE(r.groups[0].variance_defined);
  EXPECT_TRUE(std::isnan(r.groups[0].covariance(0, 0)));
}

TEST(RunMc, ThreadCountDoesNotChangeResults) {
  const auto c = small_config();
  const auto laws = compute_theory(c).laws();
  RunOptions one;
  one.threads = 1;
  RunOptions many;
  many.threads = 4;
  const auto a = run_mc(c, laws, one);
  const auto b = run_mc(c, laws, many);
  ASSERT_EQ(a.groups[0].gamma.size(), b.groups[0].gamma.size());
  for (std::size_t i = 0; i < a.groups[0].gamma.size(); ++i) {
    EXPECT_EQ(a.groups[0].gamma[i], b.groups[0].gamma[i]);
  }
  EXPECT_EQ(a.groups[0].covariance, b.groups[0].covariance);
  EXPECT_EQ(a.groups[0].ks[0].statistic, b.groups[0].ks[0].statistic);
}

TEST(RunMc, GammaShapes) {
  auto c = reference_config();
  c.reps = 20;
  const auto laws = compute_theory(c).laws();
  const auto r = run_mc(c, laws);
  ASSERT_EQ(r.groups.size(), 3u);
  EXPECT_EQ(r.groups[1].gamma[0].size(), 2);
  EXPECT_EQ(r.groups[1].offset, 197u);
  EXPECT_EQ(r.rep_index.size(), 20u);
  EXPECT_GE(r.bulk_containment_fraction, 0.99);
  for (const auto& g : r.groups) EXPECT_GE(g.positioning_fraction, 0.99);
}

TEST(RunMc, FailureThreshold) {
  const auto c = small_config();
  const auto laws = compute_theory(c).laws();
  const auto base = run_mc(c, laws);
  auto two = base;
  two.failed_reps = {1, 2};
  two.failure_messages = {"x", "y"};
  EXPECT_NO_THROW(finalize_report(c, two));
  auto three = base;
  three.failed_reps = {1, 2, 3};
  three.failure_messages = {"x", "y", "z"};
  try {
    finalize_report(c, three);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kHarness);
  }
}

TEST(RunMc, BinomialSmallSpikeVariance) {
  auto c = reference_config();
  c.dist_x = c.dist_y = SampleDistribution::kRademacher;
  c.regime = Regime::kDiagonalBlock;
  const auto laws = compute_theory(c).laws();
  const auto r = run_mc(c, laws);
  const double v = r.groups[2].covariance(0, 0);
  EXPECT_NEAR(v, 0.180, 0.15 * 0.180);
  EXPECT_NEAR(laws[2].sigma2(), 0.180, 0.03 * 0.180);
}

TEST(ExtractGamma, ScalingAndPositions) {
  const auto c = reference_config();
  const auto laws = compute_theory(c).laws();
  Eigen::VectorXd eigs = Eigen::VectorXd::LinSpaced(200, 5.0, 0.5);
  eigs[0] = laws[0].psi_n * 1.1;
  eigs[199] = laws[2].psi_n * 0.9;
  const auto s = extract_gamma(eigs, c, laws);
  EXPECT_NEAR(s.gamma[0][0], std::sqrt(196.0) * 0.1, 1e-12);
  EXPECT_NEAR(s.gamma[2][0], -std::sqrt(196.0) * 0.1, 1e-12);
  EXPECT_EQ(s.gamma[1].size(), 2);
  EXPECT_THROW(extract_gamma(eigs.head(10), c, laws), Error);
}

}  // namespace
}  // namespace fisherspike
