// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "fisherspike/error.hpp"
#include "fisherspike/lsd.hpp"
#include "oracles.hpp"

namespace fisherspike {
namespace {

struct RatioCase {
  double y1;
  double y2;
};

class WachterTest : public ::testing::TestWithParam<RatioCase> {};

TEST_P(WachterTest, SupportMatchesOracle) {
  const auto [y1, y2] = GetParam();
  const auto s = wachter_support(SpectralModel::unit(y1, y2));
  const auto e = oracle::fisher_edges(y1, y2);
  EXPECT_NEAR(s.lower, e.a, 1e-14);
  EXPECT_NEAR(s.upper, e.b, 1e-13);
  EXPECT_LT(s.lower, s.upper);
}

TEST_P(WachterTest, DensityMassAndEdges) {
  const auto [y1, y2] = GetParam();
  const auto model = SpectralModel::unit(y1, y2);
  const auto s = wachter_support(model);
  const double mass = oracle::integrate_density([](double) { return 1.0; }, y1, y2);
  EXPECT_NEAR(mass, std::min(1.0, 1.0 / y1), 1e-9);
  EXPECT_EQ(wachter_density(s.lower, model), 0.0);
  EXPECT_EQ(wachter_density(s.upper, model), 0.0);
  EXPECT_EQ(wachter_density(s.upper * 1.01, model), 0.0);
  // Square-root vanishing at both edges.
  const double w = s.width();
  EXPECT_LT(wachter_density(s.lower + 1e-10 * w, model), 1e-3);
  EXPECT_LT(wachter_density(s.upper - 1e-10 * w, model), 1e-3);
  for (int i = 1; i < 20; ++i) {
    const double x = s.lower + w * i / 20.0;
    EXPECT_NEAR(wachter_density(x, model), oracle::fisher_density(x, y1, y2), 1e-14);
    EXPECT_GT(wachter_density(x, model), 0.0);
  }
  EXPECT_THROW(wachter_density(0.0, model), Error);
}

TEST_P(WachterTest, TransformsMatchDirectQuadrature) {
  const auto [y1, y2] = GetParam();
  const auto model = SpectralModel::unit(y1, y2);
  const auto s = wachter_support(model);
  for (double lambda : {s.upper * 1.05, s.upper + 3.0, 40.0 * s.upper, 0.5 * s.lower}) {
    if (lambda <= 0.0) continue;
    const auto b = stieltjes(lambda, model);
    const auto o = oracle::fisher_transforms(lambda, y1, y2);
    EXPECT_NEAR(b.m(), o.m, 1e-9 * std::abs(o.m)) << lambda;
    EXPECT_NEAR(b.m2(), o.m2, 1e-8 * o.m2) << lambda;
    EXPECT_NEAR(b.m3(), o.m3, 1e-8 * std::abs(o.m3) + 1e-12) << lambda;
  }
}

TEST_P(WachterTest, AlgebraicIdentitiesAndDerivative) {
  const auto [y1, y2] = GetParam();
  const auto model = SpectralModel::unit(y1, y2);
  const auto s = wachter_support(model);
  std::vector<double> lambdas;
  for (int i = 0; i < 10; ++i) lambdas.push_back(s.upper * (1.02 + 0.4 * i));
  for (int i = 0; i < 10; ++i) lambdas.push_back(s.lower * (0.05 + 0.09 * i));
  for (double lambda : lambdas) {
    const auto b = stieltjes(lambda, model);
    const double scale = std::abs(lambda * b.m2()) + std::abs(b.m());
    EXPECT_NEAR(b.m3(), lambda * b.m2() + b.m(), 1e-10 * scale);
    EXPECT_NEAR(b.m_under(), -(1.0 - y1) / lambda + y1 * b.m(), 1e-10 * std::abs(b.m_under()) + 1e-14);
    EXPECT_NEAR(b.m_under2(), (1.0 - y1) / (lambda * lambda) + y1 * b.m2(), 1e-10 * b.m_under2());
    const double h = 1e-5 * std::min({lambda, std::abs(lambda - s.upper), std::abs(lambda - s.lower)});
    const double dm = (stieltjes(lambda + h, model).m() - stieltjes(lambda - h, model).m()) / (2 * h);
    EXPECT_NEAR(dm, b.m2(), 1e-6 * b.m2()) << lambda;
  }
}

TEST_P(WachterTest, SignAndMonotonicity) {
  const auto [y1, y2] = GetParam();
  const auto model = SpectralModel::unit(y1, y2);
  const auto s = wachter_support(model);
  double prev = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 30; ++i) {
    const double lambda = s.upper * (1.01 + 0.3 * i);
    const auto b = stieltjes(lambda, model);
    EXPECT_LT(b.m(), 0.0);
    EXPECT_GT(b.m(), prev);  // m increases toward 0 from below
    EXPECT_GT(b.m2(), 0.0);
    prev = b.m();
  }
  const auto far = stieltjes(1e6, model);
  EXPECT_NEAR(-1e6 * far.m(), 1.0, 1e-4);
}

INSTANTIATE_TEST_SUITE_P(Ratios, WachterTest,
                         ::testing::Values(RatioCase{0.2, 0.5}, RatioCase{0.5, 0.3},
                                           RatioCase{1.8, 0.4}, RatioCase{0.05, 0.9}));

TEST(Wachter, MeanMatchesSimulatedTrace) {
  // The LSD mean is 1 / (1 - y2); compare with tr(F)/p from simulation.
  const auto model = SpectralModel::unit(0.2, 0.5);
  MonteCarloBackendOptions opt;
  opt.dimension = 1000;
  opt.replicates = 4;
  const auto spec = simulate_base_spectrum(model, opt);
  double sum = 0.0;
  for (double v : spec.eigenvalues) sum += v;
  const double mean = sum / static_cast<double>(spec.eigenvalues.size());
  const double lsd_mean = oracle::integrate_density([](double x) { return x; }, 0.2, 0.5);
  EXPECT_NEAR(lsd_mean, 1.0 / (1.0 - 0.5), 1e-10);
  EXPECT_NEAR(mean, lsd_mean, 0.01 * lsd_mean);
}

TEST(Wachter, InsideBulkIsRejected) {
  const auto model = SpectralModel::unit(0.2, 0.4);
  const auto s = wachter_support(model);
  try {
    stieltjes(0.5 * (s.lower + s.upper), model);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSpikeInsideBulk);
  }
  EXPECT_THROW(stieltjes(s.upper, model), Error);
  EXPECT_THROW(stieltjes(s.upper + 0.5 * s.margin(), model), Error);
  EXPECT_NO_THROW(stieltjes(s.upper + 2.0 * s.margin(), model));
}

TEST(Wachter, NullAtomForLargeY1) {
  const auto model = SpectralModel::unit(2.0, 0.3);
  try {
    stieltjes(0.0, model);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSpikeInsideBulk);
  }
}

TEST(SpectralModel, Validation) {
  EXPECT_THROW(SpectralModel({{1.0, 0.5}}, 0.2, 0.4), Error);
  EXPECT_THROW(SpectralModel({{-1.0, 1.0}}, 0.2, 0.4), Error);
  EXPECT_THROW(SpectralModel::unit(0.0, 0.4), Error);
  EXPECT_THROW(SpectralModel::unit(0.2, 1.0), Error);
  EXPECT_TRUE(SpectralModel::unit(0.2, 0.4).is_unit_atom());
  EXPECT_FALSE(SpectralModel({{1.0, 0.5}, {2.0, 0.5}}, 0.2, 0.4).is_unit_atom());
}

TEST(SpectralModel, QuadratureNeedsUnitBase) {
  const SpectralModel two({{1.0, 0.5}, {3.0, 0.5}}, 0.2, 0.4);
  try {
    stieltjes(30.0, two);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedModel);
  }
  EXPECT_THROW(wachter_support(two), Error);
}

TEST(SpectralModel, LargestRemainderAllocation) {
  const SpectralModel m({{1.0, 0.5}, {2.0, 0.3}, {4.0, 0.2}}, 0.2, 0.4);
  const auto v = allocate_base_spectrum(m, 7);
  ASSERT_EQ(v.size(), 7u);
  EXPECT_EQ(std::count(v.begin(), v.end(), 1.0), 4);  // 3.5 -> 4
  EXPECT_EQ(std::count(v.begin(), v.end(), 2.0), 2);  // 2.1
  EXPECT_EQ(std::count(v.begin(), v.end(), 4.0), 1);  // 1.4
  EXPECT_TRUE(std::is_sorted(v.begin(), v.end()));
}

TEST(Bundle, RejectsInconsistentTransforms) {
  EXPECT_THROW(StieltjesBundle(5.0, -0.2, -1.0, 0.0, 0.2), Error);
  EXPECT_THROW(StieltjesBundle(5.0, -0.2, 0.05, 0.5, 0.2), Error);
  EXPECT_NO_THROW(StieltjesBundle(5.0, -0.2, 0.05, 5.0 * 0.05 - 0.2, 0.2));
}

TEST(MonteCarloBackend, AgreesWithQuadrature) {
  const auto model = SpectralModel::unit(0.5, 0.5);
  MonteCarloBackendOptions opt;
  opt.dimension = 400;
  opt.replicates = 5;
  const std::vector<double> lambdas{40.0, 0.01};
  const auto mc = stieltjes(lambdas, model, StieltjesBackend::kMonteCarlo, opt);
  const auto q = stieltjes(lambdas, model, StieltjesBackend::kQuadrature);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    EXPECT_NEAR(mc[i].m(), q[i].m(), 0.02 * std::abs(q[i].m()));
    EXPECT_NEAR(mc[i].m2(), q[i].m2(), 0.02 * q[i].m2());
  }
}

TEST(MonteCarloBackend, NonUnitBaseRejectsObservedRange) {
  const SpectralModel two({{1.0, 0.5}, {3.0, 0.5}}, 0.2, 0.4);
  MonteCarloBackendOptions opt;
  opt.dimension = 200;
  opt.replicates = 2;
  const auto spec = simulate_base_spectrum(two, opt);
  EXPECT_THROW(stieltjes_from_spectrum(0.5 * (spec.min_eigenvalue + spec.max_eigenvalue), spec, 0.2),
               Error);
  const auto b = stieltjes_from_spectrum(2.0 * spec.max_eigenvalue, spec, 0.2);
  EXPECT_LT(b.m(), 0.0);
}

TEST(MonteCarloBackend, DeterministicForSeed) {
  const auto model = SpectralModel::unit(0.5, 0.5);
  MonteCarloBackendOptions opt;
  opt.dimension = 100;
  opt.replicates = 3;
  opt.threads = 3;
  const auto a = simulate_base_spectrum(model, opt);
  opt.threads = 1;
  const auto b = simulate_base_spectrum(model, opt);
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
  opt.replicates = 1;
  EXPECT_THROW(simulate_base_spectrum(model, opt), Error);
}

}  // namespace
}  // namespace fisherspike
