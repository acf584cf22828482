// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fisherspike/clt.hpp"
#include "fisherspike/lsd.hpp"
#include "fisherspike/phase.hpp"
#include "fisherspike/simulate.hpp"

namespace fisherspike {

struct TheoryRow {
  PhaseResult phase;
  std::size_t multiplicity = 1;
  std::optional<StieltjesBundle> bundle;
  /// Present for distant spikes only.
  std::optional<CltLaw> law;
};

struct TheoryTable {
  Ratios ratios{};
  /// Closed-form bulk when the base spectrum is a single unit atom.
  std::optional<SupportInterval> bulk;
  std::size_t scale_dim = 0;
  Regime regime = Regime::kAssumptionD;
  StieltjesBackend backend = StieltjesBackend::kQuadrature;
  std::vector<TheoryRow> rows;

  std::vector<CltLaw> laws() const;
};

/// Sum of fourth powers of each spiked eigenvector of group k.
std::vector<double> fourth_power_sums(const SigmaParts& sigma, const ModelConfig& config,
                                      std::size_t group);

/// Phase classification and limit laws for every spike group of `config`,
/// evaluated with config.backend.
TheoryTable compute_theory(const ModelConfig& config);

}  // namespace fisherspike
