// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fisherspike/clt.hpp"
#include "fisherspike/lsd.hpp"
#include "fisherspike/phase.hpp"
#include "fisherspike/random.hpp"
#include "fisherspike/stats.hpp"

namespace fisherspike {

enum class SigmaCase {
  /// Sigma1 diagonal.
  kCase1,
  /// Sigma1 = U0 Lambda U0^T with U0 the eigenvectors of the Toeplitz matrix
  /// rho^|i-j|.
  kCase2,
};

std::string_view to_string(SigmaCase c) noexcept;
/// Accepts case1 | case2 (also I / II). Throws kConfig.
SigmaCase parse_sigma_case(std::string_view name);

/// How the dimension ratios fed to psi_n, the LSD and the CLT coefficients
/// are formed.
enum class RatioConvention {
  kPOverN,
  kPMinusMOverN,
};

std::string_view to_string(RatioConvention c) noexcept;
RatioConvention parse_ratio_convention(std::string_view name);

/// Truncation level eta_n sqrt(n) with eta_n = scale * n^-exponent.
struct TruncationPolicy {
  double eta_exponent = 0.125;
  double eta_scale = 1.0;

  double threshold(std::size_t n) const;
  /// Throws kConfig unless 0 < exponent < 1/2 and scale > 0.
  void validate() const;
};

struct ModelConfig {
  std::size_t p = 200;
  std::size_t n1 = 1000;
  std::size_t n2 = 400;
  SigmaCase sigma_case = SigmaCase::kCase1;
  double rho = 0.5;
  SpikeSpec spikes;
  /// Base (non-spiked) spectrum; a single atom at 1 unless configured.
  std::vector<Atom> base_atoms{{1.0, 1.0}};
  SampleDistribution dist_x = SampleDistribution::kGaussian;
  SampleDistribution dist_y = SampleDistribution::kGaussian;
  TruncationPolicy truncation;
  std::size_t reps = 1000;
  std::uint64_t seed = 20240101;
  Regime regime = Regime::kAssumptionD;
  RatioConvention ratio_convention = RatioConvention::kPOverN;
  StieltjesBackend backend = StieltjesBackend::kQuadrature;
  MonteCarloBackendOptions backend_options;

  /// Throws kConfig for p <= M, n2 <= p, reps == 0, |rho| >= 1 and invalid
  /// truncation policies.
  void validate() const;
  std::size_t spiked_count() const noexcept { return spikes.total(); }
  Ratios ratios() const;
  SpectralModel base_model() const;
};

/// Population covariance of the first sample with its eigendecomposition.
/// Sigma2 is the identity.
struct SigmaParts {
  Eigen::MatrixXd sigma1;
  /// Square root of sigma1.
  Eigen::MatrixXd sigma1_root;
  /// Population eigenvalues, descending.
  Eigen::VectorXd eigenvalues;
  /// Orthonormal eigenvectors matching `eigenvalues` column by column.
  Eigen::MatrixXd eigenvectors;
};

/// Population spectrum in descending order: spikes at their rank offsets
/// and base eigenvalues elsewhere.
Eigen::VectorXd population_spectrum(const ModelConfig& config);

SigmaParts build_sigma(const ModelConfig& config);

/// Truncates at policy.threshold(n), recentres and rescales. With a known
/// generating law the exact post-truncation moments are used, otherwise the
/// pooled empirical ones. Throws kDegenerate when the scale drops below 1e-8.
Eigen::MatrixXd truncate_center_scale(const Eigen::MatrixXd& x, std::size_t n,
                                      const TruncationPolicy& policy,
                                      std::optional<SampleDistribution> law = std::nullopt);

/// Descending eigenvalues of S1 S2^{-1} with S1 = R1 (X X^T / n1) R1 and
/// S2 = R2 (Y Y^T / n2) R2, where R1 and R2 are the symmetric square roots
/// of the population covariances.
Eigen::VectorXd fisher_eigs(const Eigen::MatrixXd& sigma1, const Eigen::MatrixXd& sigma2,
                            const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// Same with precomputed roots; `sigma2_root` may be empty for the identity.
Eigen::VectorXd fisher_eigs_rooted(const Eigen::MatrixXd& sigma1_root,
                                   const Eigen::MatrixXd& sigma2_root, const Eigen::MatrixXd& x,
                                   const Eigen::MatrixXd& y);

/// Standardized and truncated samples of one replication.
struct Replication {
  Eigen::MatrixXd x;  // p x n1
  Eigen::MatrixXd y;  // p x n2
};

/// Draws replication `rep` from its own child stream of config.seed.
Replication draw_replication(const ModelConfig& config, std::size_t rep);

struct EigenSample {
  Eigen::VectorXd all_eigs;
  /// gamma[k] holds the m_k statistics of laws[k].
  std::vector<Eigen::VectorXd> gamma;
};

/// Statistics sqrt(p - M) (l_j / psi_n - 1) at the rank positions of each
/// law's spike group.
EigenSample extract_gamma(const Eigen::VectorXd& eigs, const ModelConfig& config,
                          std::span<const CltLaw> laws);

struct GroupReport {
  CltLaw law;
  std::size_t offset = 0;
  /// gamma[i] is the vector of replication rep_index[i].
  std::vector<Eigen::VectorXd> gamma;
  Eigen::VectorXd mean;
  /// Sample covariance across replications; NaN when fewer than two.
  Eigen::MatrixXd covariance;
  bool variance_defined = false;
  /// Per index j: one-sample KS against N(0, sigma^2) for single spikes,
  /// two-sample KS against draws of the limit law otherwise.
  std::vector<KsResult> ks;
  /// Fraction of replications whose group eigenvalues lie on the same side
  /// of the bulk as psi_n. NaN when the bulk is unknown.
  double positioning_fraction = 0.0;
};

struct McReport {
  std::size_t reps_requested = 0;
  std::vector<std::size_t> rep_index;
  std::vector<std::size_t> failed_reps;
  std::vector<std::string> failure_messages;
  std::vector<GroupReport> groups;
  /// Per successful replication: non-spiked eigenvalues inside the widened
  /// bulk. Empty when the bulk is unknown.
  std::vector<std::uint8_t> bulk_contained;
  std::optional<SupportInterval> bulk;
  /// Fraction of replications whose non-spiked eigenvalues all lie in the
  /// bulk widened by 15% of its width. NaN when the bulk is unknown.
  double bulk_containment_fraction = 0.0;
};

struct RunOptions {
  unsigned threads = 0;
  /// Draws of the limit law for the two-sample KS of multiple spikes.
  std::size_t limit_draws = 20000;
};

/// Fills the derived fields of a report whose rep_index, failures,
/// bulk_contained and group gamma/law/offset entries are already set:
/// moments, KS results, positioning and containment fractions.
void finalize_report(const ModelConfig& config, McReport& report, const RunOptions& options = {});

/// Runs config.reps replications. A failing replication is recorded and
/// skipped; more than 1% failures throws kHarness.
McReport run_mc(const ModelConfig& config, std::span<const CltLaw> laws,
                const RunOptions& options = {});

}  // namespace fisherspike
