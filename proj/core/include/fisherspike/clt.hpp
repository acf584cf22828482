// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fisherspike/lsd.hpp"
#include "fisherspike/phase.hpp"
#include "fisherspike/random.hpp"

namespace fisherspike {

/// Fourth-moment information of one sample (X or Y) seen through the spiked
/// eigenvectors.
struct MomentProfile {
  /// E|x|^4; +infinity when it does not exist.
  double fourth_moment = 3.0;
  /// Fourth-moment correction entering the diagonal variance. Computed as
  /// sum_t u_ts^4 * (E|x|^4 - 3), so it vanishes for Gaussian data and for
  /// delocalized eigenvectors, and equals E|x|^4 - 3 for coordinate vectors.
  double beta = 0.0;
  /// sum_t u_ts^4 for each spiked eigenvector, when supplied.
  std::vector<double> column_fourth_power_sums;

  /// Profile for coordinate-aligned spiked eigenvectors (sum u^4 = 1).
  static MomentProfile for_distribution(SampleDistribution dist);
  /// Profile from explicit per-eigenvector sums of fourth powers; beta uses
  /// their average. An infinite fourth moment leaves beta infinite unless
  /// all sums are zero.
  static MomentProfile for_distribution(SampleDistribution dist,
                                        std::vector<double> column_fourth_power_sums);
};

/// Which variance structure the diagonal of the limiting block follows.
enum class Regime {
  /// Delocalized spiked eigenvectors: GOE structure, var_diag = 2 theta.
  kAssumptionD,
  /// Spiked eigenvectors supported on a coordinate block:
  /// var_diag = 2 theta + beta_x nu1 + beta_y nu2.
  kDiagonalBlock,
};

std::string_view to_string(Regime regime) noexcept;
/// Accepts assumptionD | diagonalBlock. Throws kConfig.
Regime parse_regime(std::string_view name);

struct CltLaw {
  double alpha = 0.0;
  double psi_n = 0.0;
  double kappa = 0.0;
  double theta = 0.0;
  double nu1 = 0.0;
  double nu2 = 0.0;
  double beta_x = 0.0;
  double beta_y = 0.0;
  double var_diag = 0.0;
  double var_off = 0.0;
  std::size_t multiplicity = 1;
  /// p - M, the dimension used to scale the fluctuations.
  std::size_t scale_dim = 0;
  Regime regime = Regime::kAssumptionD;

  /// Limiting variance var_diag / kappa^2 of a single-spike statistic.
  double sigma2() const noexcept { return var_diag / (kappa * kappa); }
};

/// kappa = 1 + c2 psi^2 m2 + 2 c2 psi m + alpha psi m_under2 + alpha m_under.
/// Throws kMismatch when the bundle was not evaluated at psi.
double kappa_s(double alpha, double psi, const StieltjesBundle& bundle, double c2);

/// theta = c2 + c2^2 psi^2 m2 + 2 c2^2 psi m + c1 alpha^2 m_under2
///         + 2 c1 c2 alpha m3.
double theta_k(double alpha, double psi, const StieltjesBundle& bundle, Ratios ratios);

struct NuCoefficients {
  double nu1;
  double nu2;
};

/// nu1 = c1 alpha^2 / (psi (1 + c1 m))^2, nu2 = c2 (1 + c2 psi m)^2.
/// Throws kDegenerate when 1 + c1 m vanishes.
NuCoefficients nu_coefficients(double alpha, double psi, const StieltjesBundle& bundle,
                               Ratios ratios);

/// Assembles the limit law of one distant spike group. Throws
/// kUnsupportedModel for non-distant spikes and for the diagonal-block regime
/// with an infinite beta.
CltLaw limit_law(const PhaseResult& phase, const StieltjesBundle& bundle,
                 const MomentProfile& profile_x, const MomentProfile& profile_y, Regime regime,
                 Ratios ratios, std::size_t multiplicity, std::size_t scale_dim);

/// `count` draws of the sorted (descending) eigenvalues of -W / kappa, where
/// W is a symmetric m x m Gaussian matrix with variances var_diag on the
/// diagonal and var_off above it. Deterministic in `seed`.
std::vector<Eigen::VectorXd> sample_limit(const CltLaw& law, std::size_t count,
                                          std::uint64_t seed);

}  // namespace fisherspike
