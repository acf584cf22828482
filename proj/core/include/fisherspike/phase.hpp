// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fisherspike/lsd.hpp"

namespace fisherspike {

struct SpikeGroup {
  double alpha;
  std::size_t multiplicity;
};

/// Population spikes with multiplicities, kept in descending order of alpha.
class SpikeSpec {
 public:
  SpikeSpec() = default;
  /// Throws kInvalidArgument for non-positive spikes, zero multiplicities or
  /// repeated spike values.
  explicit SpikeSpec(std::vector<SpikeGroup> groups);

  std::span<const SpikeGroup> groups() const noexcept { return groups_; }
  std::size_t size() const noexcept { return groups_.size(); }
  bool empty() const noexcept { return groups_.empty(); }
  /// Total multiplicity M.
  std::size_t total() const noexcept { return total_; }

  /// Zero-based position j_k of each group's first eigenvalue in the
  /// descending population spectrum of dimension p, where the p - M
  /// non-spiked eigenvalues follow the base spectrum of `model`. Group k
  /// occupies [j_k, j_k + m_k).
  std::vector<std::size_t> rank_offsets(std::size_t p, const SpectralModel& model) const;

 private:
  std::vector<SpikeGroup> groups_;
  std::size_t total_ = 0;
};

/// Dimension-to-sample ratios (c_{n1}, c_{n2}).
struct Ratios {
  double c1;
  double c2;
};

/// Finite-n phase transition map: the almost-sure location of the sample
/// eigenvalue generated by a population spike `alpha`. Throws kDomain when
/// alpha coincides with a base atom and kPole when the denominator vanishes.
double psi_n(double alpha, const SpectralModel& model, Ratios ratios);

/// Exact derivative of psi_n in alpha.
double psi_prime(double alpha, const SpectralModel& model, Ratios ratios);

struct PhaseResult {
  double alpha;
  double psi_n;
  double psi_prime;
  bool distant;
  /// Almost-sure limit of the sample eigenvalues of the group.
  double rho;
  /// Critical point (psi' = 0) used for rho when the spike is not distant.
  std::optional<double> critical_alpha;
};

/// Phase classification of every spike group, in the SpikeSpec order.
/// Distant groups get rho = psi_n(alpha); the others get psi_n at the
/// nearest critical point reached while psi' stays negative, searching
/// upward first. Throws kClassification when no critical point brackets.
std::vector<PhaseResult> classify(const SpikeSpec& spec, const SpectralModel& model,
                                  Ratios ratios);

PhaseResult classify(double alpha, const SpectralModel& model, Ratios ratios);

}  // namespace fisherspike
