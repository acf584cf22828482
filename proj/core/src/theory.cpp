// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fisherspike/theory.hpp"

#include "fisherspike/error.hpp"

namespace fisherspike {

std::vector<CltLaw> TheoryTable::laws() const {
  std::vector<CltLaw> out;
  for (const auto& row : rows) {
    if (row.law) out.push_back(*row.law);
  }
  return out;
}

std::vector<double> fourth_power_sums(const SigmaParts& sigma, const ModelConfig& config,
                                      std::size_t group) {
  const auto offsets = config.spikes.rank_offsets(config.p, config.base_model());
  if (group >= offsets.size()) throw Error(ErrorCode::kInvalidArgument, "spike group index out of range");
  std::vector<double> sums;
  for (std::size_t j = 0; j < config.spikes.groups()[group].multiplicity; ++j) {
    const auto col = static_cast<Eigen::Index>(offsets[group] + j);
    sums.push_back(sigma.eigenvectors.col(col).array().pow(4).sum());
  }
  return sums;
}

TheoryTable compute_theory(const ModelConfig& config) {
  const auto model = config.base_model();
  TheoryTable table;
  table.ratios = config.ratios();
  table.scale_dim = config.p - config.spikes.total();
  table.regime = config.regime;
  table.backend = config.backend;
  if (model.is_unit_atom()) table.bulk = wachter_support(model);
  if (config.spikes.empty()) return table;

  const auto phases = classify(config.spikes, model, table.ratios);
  std::vector<double> centres;
  for (const auto& ph : phases) {
    if (ph.distant) centres.push_back(ph.psi_n);
  }
  const auto bundles = centres.empty()
                           ? std::vector<StieltjesBundle>{}
                           : stieltjes(centres, model, config.backend, config.backend_options);

  // Eigenvectors only matter for the fourth-moment correction.
  std::optional<SigmaParts> sigma;
  if (config.regime == Regime::kDiagonalBlock) sigma = build_sigma(config);

  std::size_t next_bundle = 0;
  const auto groups = config.spikes.groups();
  for (std::size_t k = 0; k < groups.size(); ++k) {
    TheoryRow row;
    row.phase = phases[k];
    row.multiplicity = groups[k].multiplicity;
    if (row.phase.distant) {
      row.bundle = bundles[next_bundle++];
      MomentProfile px = MomentProfile::for_distribution(config.dist_x);
      MomentProfile py = MomentProfile::for_distribution(config.dist_y);
      if (sigma) {
        const auto sums = fourth_power_sums(*sigma, config, k);
        px = MomentProfile::for_distribution(config.dist_x, sums);
        py = MomentProfile::for_distribution(config.dist_y, sums);
      }
      row.law = limit_law(row.phase, *row.bundle, px, py, config.regime, table.ratios,
                          row.multiplicity, table.scale_dim);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace fisherspike
