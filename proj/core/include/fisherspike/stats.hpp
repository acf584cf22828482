// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fisherspike {

double normal_cdf(double x, double sd = 1.0);
double normal_quantile(double p, double sd = 1.0);

double mean(std::span<const double> xs);
/// Unbiased sample variance; NaN for fewer than two values.
double variance(std::span<const double> xs);
double covariance(std::span<const double> xs, std::span<const double> ys);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  /// Effective sample size used for the p-value.
  double effective_n = 0.0;
};

/// Asymptotic Kolmogorov tail probability P(sqrt(n) D > .) with the
/// Stephens small-sample correction.
double kolmogorov_p_value(double statistic, double effective_n);

/// One-sample KS statistic against a continuous CDF.
KsResult ks_one_sample(std::span<const double> xs, const std::function<double(double)>& cdf);

KsResult ks_two_sample(std::span<const double> xs, std::span<const double> ys);

struct VarianceRatio {
  double ratio = 1.0;
  /// Two-sided p-value of the F test for equal variances.
  double p_value = 1.0;
  /// Ratios outside [lower, upper] are rejected at the requested level.
  double lower = 0.0;
  double upper = 0.0;
};

VarianceRatio variance_ratio_test(std::span<const double> xs, std::span<const double> ys,
                                  double level);

}  // namespace fisherspike
