// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fisherspike/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fisherspike/error.hpp"

namespace fisherspike {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(~index));
}

double open_uniform(Engine& engine) noexcept {
  // (k + 0.5) / 2^53 never hits 0 or 1.
  const auto k = engine() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

std::string_view to_string(SampleDistribution dist) noexcept {
  switch (dist) {
    case SampleDistribution::kGaussian: return "gaussian";
    case SampleDistribution::kRademacher: return "rademacher";
    case SampleDistribution::kHeavyTail4: return "heavyTail4";
  }
  return "unknown";
}

SampleDistribution parse_distribution(std::string_view name) {
  if (name == "gaussian" || name == "normal") return SampleDistribution::kGaussian;
  if (name == "rademacher" || name == "binomial") return SampleDistribution::kRademacher;
  if (name == "heavyTail4" || name == "heavytail4") return SampleDistribution::kHeavyTail4;
  throw Error(ErrorCode::kConfig, "unknown distribution '" + std::string(name) + "'");
}

namespace heavy_tail4 {
namespace {

constexpr double kE = std::numbers::e;
// P(|Y| <= e) under the flat part.
const double kFlatMass = 1.0 - std::exp(-4.0);

// E_1(x) = -Ei(-x).
double expint_e1(double x) { return -std::expint(-x); }

// Integral of 2 t P(|Y| > t) over [0, u] for the unscaled law.
double second_moment_integral(double u) {
  if (u <= kE) return u * u - 2.0 * kFlatMass * u * u * u / (3.0 * kE);
  return kE * kE * (1.0 - 2.0 * kFlatMass / 3.0) +
         2.0 * (expint_e1(2.0) - expint_e1(2.0 * std::log(u)));
}

double raw_survival(double t) {
  if (t <= 0.0) return 1.0;
  if (t <= kE) return 1.0 - kFlatMass * t / kE;
  return std::pow(t, -4.0) / std::log(t);
}

}  // namespace

double raw_variance() { return second_moment_integral(std::numeric_limits<double>::infinity()); }

double scale() {
  static const double s = std::sqrt(raw_variance());
  return s;
}

double survival(double t) { return raw_survival(t * scale()); }

double truncated_second_moment(double t) {
  if (!(t > 0.0)) return 0.0;
  if (std::isinf(t)) return 1.0;
  const double u = t * scale();
  return (second_moment_integral(u) - u * u * raw_survival(u)) / (scale() * scale());
}

double abs_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw Error(ErrorCode::kDomain, "quantile level must lie in (0,1)");
  if (u <= kFlatMass) return kE * u / kFlatMass / scale();
  // Solve 4 s + log s = -log(1 - u) for s = log t >= 1.
  const double target = -std::log1p(-u);
  double s = std::max(1.0, target / 4.0);
  for (int it = 0; it < 60; ++it) {
    const double f = 4.0 * s + std::log(s) - target;
    const double step = f / (4.0 + 1.0 / s);
    s -= step;
    if (s < 1.0) s = 1.0;
    if (std::abs(step) < 1e-15 * s) break;
  }
  return std::exp(s) / scale();
}

double sample(Engine& engine) {
  const double magnitude = abs_quantile(open_uniform(engine));
  return (engine() >> 63) ? magnitude : -magnitude;
}

}  // namespace heavy_tail4

double truncated_second_moment(SampleDistribution dist, double t) {
  switch (dist) {
    case SampleDistribution::kGaussian: {
      if (std::isinf(t)) return 1.0;
      const double phi = std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
      return std::erf(t / std::numbers::sqrt2) - 2.0 * t * phi;
    }
    case SampleDistribution::kRademacher:
      return t > 1.0 ? 1.0 : 0.0;
    case SampleDistribution::kHeavyTail4:
      return heavy_tail4::truncated_second_moment(t);
  }
  return 0.0;
}

double fourth_moment(SampleDistribution dist) noexcept {
  switch (dist) {
    case SampleDistribution::kGaussian: return 3.0;
    case SampleDistribution::kRademacher: return 1.0;
    case SampleDistribution::kHeavyTail4: return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

double draw(SampleDistribution dist, Engine& engine) {
  switch (dist) {
    case SampleDistribution::kGaussian: {
      // Box-Muller keeps the stream layout independent of the standard
      // library's normal_distribution.
      const double u1 = open_uniform(engine);
      const double u2 = open_uniform(engine);
      return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    case SampleDistribution::kRademacher:
      return (engine() >> 63) ? 1.0 : -1.0;
    case SampleDistribution::kHeavyTail4:
      return heavy_tail4::sample(engine);
  }
  return 0.0;
}

Eigen::MatrixXd draw_matrix(SampleDistribution dist, Eigen::Index rows, Eigen::Index cols,
                            Engine& engine) {
  Eigen::MatrixXd out(rows, cols);
  double* data = out.data();
  const Eigen::Index size = rows * cols;
  if (dist == SampleDistribution::kGaussian) {
    // Both Box-Muller outputs are used.
    Eigen::Index i = 0;
    for (; i + 1 < size; i += 2) {
      const double r = std::sqrt(-2.0 * std::log(open_uniform(engine)));
      const double a = 2.0 * std::numbers::pi * open_uniform(engine);
      data[i] = r * std::cos(a);
      data[i + 1] = r * std::sin(a);
    }
    if (i < size) data[i] = draw(dist, engine);
    return out;
  }
  for (Eigen::Index i = 0; i < size; ++i) data[i] = draw(dist, engine);
  return out;
}

}  // namespace fisherspike
