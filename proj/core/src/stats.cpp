// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fisherspike/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>

#include "fisherspike/error.hpp"

namespace fisherspike {

double normal_cdf(double x, double sd) {
  return boost::math::cdf(boost::math::normal_distribution<double>(0.0, sd), x);
}

double normal_quantile(double p, double sd) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::kDomain, "quantile level must lie in (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, sd), p);
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) { return covariance(xs, xs); }

double covariance(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::kInvalidArgument, "covariance needs equal lengths");
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mx = mean(xs);
  const double my = mean(ys);
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (xs[i] - mx) * (ys[i] - my);
  return s / static_cast<double>(xs.size() - 1);
}

double kolmogorov_p_value(double statistic, double effective_n) {
  if (!(effective_n > 0.0)) throw Error(ErrorCode::kInvalidArgument, "KS needs a positive sample size");
  const double rn = std::sqrt(effective_n);
  const double lambda = (rn + 0.12 + 0.11 / rn) * statistic;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_one_sample(std::span<const double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) throw Error(ErrorCode::kInvalidArgument, "KS test on an empty sample");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, kolmogorov_p_value(d, n), n};
}

KsResult ks_two_sample(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) throw Error(ErrorCode::kInvalidArgument, "KS test on an empty sample");
  std::vector<double> a(xs.begin(), xs.end());
  std::vector<double> b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  return {d, kolmogorov_p_value(d, ne), ne};
}

VarianceRatio variance_ratio_test(std::span<const double> xs, std::span<const double> ys,
                                  double level) {
  if (xs.size() < 2 || ys.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "variance ratio needs two values per sample");
  }
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::kDomain, "level must lie in (0,1)");
  const double vx = variance(xs);
  const double vy = variance(ys);
  if (!(vy > 0.0)) throw Error(ErrorCode::kDegenerate, "second sample has zero variance");
  const boost::math::fisher_f_distribution<double> f(static_cast<double>(xs.size() - 1),
                                                     static_cast<double>(ys.size() - 1));
  VarianceRatio out;
  out.ratio = vx / vy;
  const double lower_tail = boost::math::cdf(f, out.ratio);
  out.p_value = std::min(1.0, 2.0 * std::min(lower_tail, 1.0 - lower_tail));
  out.lower = boost::math::quantile(f, 0.5 * level);
  out.upper = boost::math::quantile(f, 1.0 - 0.5 * level);
  return out;
}

}  // namespace fisherspike
