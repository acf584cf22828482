// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fisherspike/clt.hpp"
#include "fisherspike/simulate.hpp"
#include "fisherspike/stats.hpp"

namespace fisherspike {

/// Spiked / non-spiked split of the singular value decomposition of T_p with
/// Sigma1 Sigma2^{-1} = T_p T_p^T.
struct SvdParts {
  Eigen::MatrixXd u1;  // p x M
  Eigen::MatrixXd u2;  // p x (p - M)
  Eigen::MatrixXd v1;  // p x M
  Eigen::MatrixXd v2;  // p x (p - M)
  Eigen::VectorXd d1;  // M
  Eigen::VectorXd d2;  // p - M

  /// Splits the population eigenbasis at the rank positions of the spike
  /// groups. Spiked columns keep group order, so group k occupies rows
  /// [block_offset(k), block_offset(k) + m_k) of Omega.
  static SvdParts from_sigma(const SigmaParts& sigma, const ModelConfig& config);

  /// Throws kGeometry unless [u1 u2] and [v1 v2] are orthogonal to 1e-10
  /// and all singular value squares are positive.
  void validate() const;
};

/// Row of the first entry of group k in Omega.
std::size_t block_offset(const SpikeSpec& spec, std::size_t k);

struct OmegaSample {
  double lambda = 0.0;
  /// Symmetrized sum of the five terms.
  Eigen::MatrixXd omega;
  std::array<Eigen::MatrixXd, 5> terms;
  /// Frobenius norm of the antisymmetric part of the unsymmetrized sum.
  double asymmetry = 0.0;
};

/// Evaluates the five-term decomposition at lambda for standardized samples
/// x (p x n1) and y (p x n2). The n1 x n1 resolvent is reduced to the
/// (p - M) x (p - M) one through push-through identities. Throws kResolvent
/// when lambda - F~ has condition number beyond 1e12.
OmegaSample compute_omega(double lambda, const SvdParts& parts, const Eigen::MatrixXd& x,
                          const Eigen::MatrixXd& y);

struct OmegaProbeOptions {
  /// Spike group whose psi_n is used as lambda, unless `lambda` is set.
  std::size_t group = 0;
  std::optional<double> lambda;
  /// Overrides config.reps.
  std::optional<std::size_t> reps;
  unsigned threads = 0;
};

struct OmegaCollection {
  double lambda = 0.0;
  std::size_t dimension = 0;
  std::vector<std::size_t> rep_index;
  std::vector<std::size_t> failed_reps;
  std::vector<std::string> failure_messages;
  std::vector<Eigen::MatrixXd> omegas;
  /// Term-wise empirical means over replications.
  std::array<Eigen::MatrixXd, 5> term_means;
  double max_asymmetry = 0.0;
  /// gamma[i][g] are the statistics of laws[g] in replication rep_index[i].
  std::vector<std::vector<Eigen::VectorXd>> gamma;
};

/// Draws replications exactly like run_mc and evaluates Omega (and, for the
/// supplied laws, the gamma statistics) on the same samples.
OmegaCollection collect_omega(const ModelConfig& config, std::span<const CltLaw> laws,
                              const OmegaProbeOptions& options);

struct EntrySummary {
  std::size_t row = 0;
  std::size_t col = 0;
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
};

/// Upper-triangular entries (row <= col) of the collected matrices.
std::vector<EntrySummary> summarize_entries(const OmegaCollection& collection);
std::vector<double> entry_values(const OmegaCollection& collection, std::size_t row,
                                 std::size_t col);

struct EntryComparison {
  std::size_t row = 0;
  std::size_t col = 0;
  KsResult ks;
  VarianceRatio variance_ratio;
  bool rejected = false;
};

struct GammaComparison {
  double alpha = 0.0;
  std::size_t index = 0;
  KsResult ks;
  VarianceRatio variance_ratio;
  bool rejected = false;
};

struct UniversalityReport {
  double lambda = 0.0;
  std::size_t reps = 0;
  double level = 0.01;
  /// level / (M (M + 1) / 2).
  double corrected_level = 0.01;
  std::vector<EntryComparison> entries;
  std::vector<GammaComparison> gammas;
  OmegaCollection a;
  OmegaCollection b;
  /// True when no Omega entry is rejected at the corrected level.
  bool pass = false;
};

/// Throws kGeometry unless the configs agree on dimensions, spikes, base
/// spectrum and covariance geometry.
void require_same_geometry(const ModelConfig& a, const ModelConfig& b);

UniversalityReport universality_test(const ModelConfig& a, const ModelConfig& b,
                                     std::span<const CltLaw> laws,
                                     const OmegaProbeOptions& options, double level = 0.01);

}  // namespace fisherspike
