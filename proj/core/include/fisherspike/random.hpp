// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace fisherspike {

using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Counter-based child seed: a pure function of (seed, index), so stream r
/// is the same whichever thread or order it is generated in.
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Uniform double in (0, 1), built from the top 53 bits of the engine.
double open_uniform(Engine& engine) noexcept;

enum class SampleDistribution { kGaussian, kRademacher, kHeavyTail4 };

std::string_view to_string(SampleDistribution dist) noexcept;
/// Accepts gaussian | rademacher | binomial | heavyTail4. Throws kConfig.
SampleDistribution parse_distribution(std::string_view name);

/// Symmetric law with P(|Y| > t) = t^-4 / log t for t >= e and a flat
/// density below e, rescaled to unit variance. Finite variance, infinite
/// fourth moment, t^4 P(|X| > t) -> 0.
namespace heavy_tail4 {

/// Variance of the unscaled law Y.
double raw_variance();
/// Scale s with X = Y / s.
double scale();
/// P(|X| > t) for the standardized law.
double survival(double t);
/// E[X^2 1{|X| < t}] for the standardized law.
double truncated_second_moment(double t);
/// Inverse of the |X| distribution function (standardized).
double abs_quantile(double u);
double sample(Engine& engine);

}  // namespace heavy_tail4

/// E[X^2 1{|X| < t}] of the standardized law (mean is zero after
/// truncation for all three symmetric kinds).
double truncated_second_moment(SampleDistribution dist, double t);

/// Known fourth moment E X^4; +infinity for kHeavyTail4.
double fourth_moment(SampleDistribution dist) noexcept;

double draw(SampleDistribution dist, Engine& engine);

/// rows x cols matrix of i.i.d. standardized entries, filled column-major.
Eigen::MatrixXd draw_matrix(SampleDistribution dist, Eigen::Index rows,
                            Eigen::Index cols, Engine& engine);

}  // namespace fisherspike
