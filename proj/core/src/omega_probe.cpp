// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fisherspike/omega_probe.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fisherspike/error.hpp"
#include "fisherspike/linalg.hpp"
#include "fisherspike/parallel.hpp"
#include "fisherspike/phase.hpp"

namespace fisherspike {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

double orthogonality_defect(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd full(a.rows(), a.cols() + b.cols());
  full << a, b;
  return (full.transpose() * full - Eigen::MatrixXd::Identity(full.cols(), full.cols()))
      .cwiseAbs()
      .maxCoeff();
}

}  // namespace

SvdParts SvdParts::from_sigma(const SigmaParts& sigma, const ModelConfig& config) {
  const auto offsets = config.spikes.rank_offsets(config.p, config.base_model());
  const auto groups = config.spikes.groups();
  const auto p = static_cast<Eigen::Index>(config.p);
  const auto m = static_cast<Eigen::Index>(config.spikes.total());
  std::vector<char> spiked(config.p, 0);
  std::vector<Eigen::Index> spiked_cols;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    for (std::size_t j = 0; j < groups[k].multiplicity; ++j) {
      spiked[offsets[k] + j] = 1;
      spiked_cols.push_back(static_cast<Eigen::Index>(offsets[k] + j));
    }
  }
  SvdParts parts;
  parts.u1.resize(p, m);
  parts.u2.resize(p, p - m);
  parts.d1.resize(m);
  parts.d2.resize(p - m);
  for (Eigen::Index i = 0; i < m; ++i) {
    parts.u1.col(i) = sigma.eigenvectors.col(spiked_cols[static_cast<std::size_t>(i)]);
    parts.d1[i] = sigma.eigenvalues[spiked_cols[static_cast<std::size_t>(i)]];
  }
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < p; ++i) {
    if (spiked[static_cast<std::size_t>(i)]) continue;
    parts.u2.col(c) = sigma.eigenvectors.col(i);
    parts.d2[c] = sigma.eigenvalues[i];
    ++c;
  }
  // Sigma2 = I, so the right singular vectors coincide with the left ones.
  parts.v1 = parts.u1;
  parts.v2 = parts.u2;
  parts.validate();
  return parts;
}

void SvdParts::validate() const {
  if (u1.rows() != u2.rows() || v1.rows() != v2.rows() || u1.rows() != v1.rows() ||
      u1.cols() != v1.cols() || u2.cols() != v2.cols() || d1.size() != u1.cols() ||
      d2.size() != u2.cols() || u1.rows() != u1.cols() + u2.cols()) {
    throw Error(ErrorCode::kGeometry, "SVD blocks have inconsistent shapes");
  }
  const double du = orthogonality_defect(u1, u2);
  const double dv = orthogonality_defect(v1, v2);
  if (du > 1e-10 || dv > 1e-10) {
    throw Error(ErrorCode::kGeometry, "SVD bases are not orthogonal (defect " +
                                          fmt(std::max(du, dv)) + ")");
  }
  if ((d1.size() > 0 && !(d1.minCoeff() > 0.0)) || (d2.size() > 0 && !(d2.minCoeff() > 0.0))) {
    throw Error(ErrorCode::kGeometry, "singular value squares must be positive");
  }
}

std::size_t block_offset(const SpikeSpec& spec, std::size_t k) {
  if (k >= spec.size()) throw Error(ErrorCode::kInvalidArgument, "spike group index out of range");
  std::size_t off = 0;
  for (std::size_t i = 0; i < k; ++i) off += spec.groups()[i].multiplicity;
  return off;
}

OmegaSample compute_omega(double lambda, const SvdParts& parts, const Eigen::MatrixXd& x,
                          const Eigen::MatrixXd& y) {
  const Eigen::Index p = parts.u1.rows();
  const Eigen::Index m = parts.u1.cols();
  const Eigen::Index q = parts.u2.cols();
  if (x.rows() != p || y.rows() != p) {
    throw Error(ErrorCode::kInvalidArgument, "samples do not match the SVD dimension");
  }
  const double n1 = static_cast<double>(x.cols());
  const double n2 = static_cast<double>(y.cols());
  const double sp = std::sqrt(static_cast<double>(p));

  const Eigen::MatrixXd yv1 = y.transpose() * parts.v1;  // n2 x M
  const Eigen::MatrixXd yv2 = y.transpose() * parts.v2;  // n2 x q
  const Eigen::MatrixXd s2_11 = yv1.transpose() * yv1 / n2;
  const Eigen::MatrixXd a = yv1.transpose() * yv2;  // V1' Y Y' V2
  const Eigen::MatrixXd qmat = yv2.transpose() * yv2 / n2;
  const Eigen::MatrixXd q_isqrt = symmetric_inverse_sqrt(qmat);

  const Eigen::MatrixXd x1 = parts.u1.transpose() * x;  // M x n1
  const Eigen::MatrixXd x2 = parts.u2.transpose() * x;  // q x n1
  const Eigen::VectorXd d2h = parts.d2.cwiseSqrt();
  const Eigen::VectorXd d1h = parts.d1.cwiseSqrt();
  const Eigen::MatrixXd z = q_isqrt * d2h.asDiagonal() * x2 / std::sqrt(n1);
  const Eigen::MatrixXd f_tilde = scaled_gram(z, 1.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f_tilde);
  const Eigen::ArrayXd gap = lambda - eig.eigenvalues().array();
  const double cond = gap.abs().maxCoeff() / gap.abs().minCoeff();
  if (!(cond < 1e12)) {
    throw Error(ErrorCode::kResolvent, "lambda=" + fmt(lambda) + " gives resolvent condition " +
                                           fmt(cond));
  }
  const Eigen::MatrixXd r =
      eig.eigenvectors() * gap.inverse().matrix().asDiagonal() * eig.eigenvectors().transpose();
  const double tr_r = gap.inverse().sum();
  // F~ and its companion share nonzero eigenvalues; the companion adds
  // n1 - q zeros.
  const double tr_r_under = (n1 - static_cast<double>(q)) / lambda + tr_r;

  const Eigen::MatrixXd aq = a * q_isqrt;  // M x q
  const Eigen::MatrixXd b = x1 * x2.transpose();  // U1' X X' U2
  const Eigen::MatrixXd xz = b * d2h.asDiagonal() * q_isqrt / std::sqrt(n1);  // U1' X Z'
  const Eigen::MatrixXd x1_ru_x1 = (x1 * x1.transpose() + xz * r * xz.transpose()) / lambda;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m, m);

  OmegaSample out;
  out.lambda = lambda;
  out.terms[0] = sp * (s2_11 - eye);
  out.terms[1] = (sp * lambda / n2) * tr_r * eye - (sp * lambda / (n2 * n2)) * aq * r * aq.transpose();
  out.terms[2] = (sp / n1) * tr_r_under * Eigen::MatrixXd(parts.d1.asDiagonal()) -
                 (sp / n1) * d1h.asDiagonal() * x1_ru_x1 * d1h.asDiagonal();
  out.terms[3] = (sp / (n1 * n2)) * aq * r * q_isqrt * d2h.asDiagonal() * b.transpose() *
                 d1h.asDiagonal();
  out.terms[4] = out.terms[3].transpose();

  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(m, m);
  for (const auto& t : out.terms) raw += t;
  out.asymmetry = (0.5 * (raw - raw.transpose())).norm();
  for (int i = 0; i < 3; ++i) out.terms[i] = symmetrized(out.terms[i]);
  out.omega = Eigen::MatrixXd::Zero(m, m);
  for (const auto& t : out.terms) out.omega += t;
  return out;
}

OmegaCollection collect_omega(const ModelConfig& config, std::span<const CltLaw> laws,
                              const OmegaProbeOptions& options) {
  config.validate();
  if (config.spikes.empty()) throw Error(ErrorCode::kConfig, "Omega probe needs at least one spike");
  const auto sigma = build_sigma(config);
  const auto parts = SvdParts::from_sigma(sigma, config);
  double lambda = 0.0;
  if (options.lambda) {
    lambda = *options.lambda;
  } else {
    if (options.group >= config.spikes.size()) {
      throw Error(ErrorCode::kConfig, "Omega probe group index out of range");
    }
    lambda = psi_n(config.spikes.groups()[options.group].alpha, config.base_model(), config.ratios());
  }
  const std::size_t reps = options.reps.value_or(config.reps);
  if (reps == 0) throw Error(ErrorCode::kConfig, "Omega probe needs at least one replication");

  struct Slot {
    bool ok = false;
    std::string error;
    OmegaSample sample;
    std::vector<Eigen::VectorXd> gamma;
  };
  std::vector<Slot> slots(reps);
  const Eigen::MatrixXd no_root;
  parallel_for_index(reps, options.threads, [&](std::size_t r) {
    auto& slot = slots[r];
    try {
      const auto rep = draw_replication(config, r);
      slot.sample = compute_omega(lambda, parts, rep.x, rep.y);
      if (!laws.empty()) {
        const auto eigs = fisher_eigs_rooted(sigma.sigma1_root, no_root, rep.x, rep.y);
        slot.gamma = extract_gamma(eigs, config, laws).gamma;
      }
      slot.ok = true;
    } catch (const std::exception& e) {
      slot.error = e.what();
    }
  });

  OmegaCollection out;
  out.lambda = lambda;
  out.dimension = config.spikes.total();
  const auto m = static_cast<Eigen::Index>(out.dimension);
  for (auto& t : out.term_means) t = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t r = 0; r < reps; ++r) {
    auto& slot = slots[r];
    if (!slot.ok) {
      out.failed_reps.push_back(r);
      out.failure_messages.push_back(std::move(slot.error));
      continue;
    }
    out.rep_index.push_back(r);
    for (int t = 0; t < 5; ++t) out.term_means[t] += slot.sample.terms[t];
    out.max_asymmetry = std::max(out.max_asymmetry, slot.sample.asymmetry);
    out.omegas.push_back(std::move(slot.sample.omega));
    out.gamma.push_back(std::move(slot.gamma));
  }
  if (out.rep_index.empty() || out.failed_reps.size() * 100 > reps) {
    throw Error(ErrorCode::kHarness,
                std::to_string(out.failed_reps.size()) + " of " + std::to_string(reps) +
                    " Omega replications failed; first: " + out.failure_messages.front());
  }
  for (auto& t : out.term_means) t /= static_cast<double>(out.rep_index.size());
  return out;
}

std::vector<double> entry_values(const OmegaCollection& collection, std::size_t row, std::size_t col) {
  std::vector<double> v;
  v.reserve(collection.omegas.size());
  for (const auto& o : collection.omegas) {
    v.push_back(o(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)));
  }
  return v;
}

std::vector<EntrySummary> summarize_entries(const OmegaCollection& collection) {
  std::vector<EntrySummary> out;
  for (std::size_t i = 0; i < collection.dimension; ++i) {
    for (std::size_t j = i; j < collection.dimension; ++j) {
      const auto v = entry_values(collection, i, j);
      EntrySummary s{i, j, mean(v), variance(v), 0.0};
      s.std_error = std::sqrt(s.variance / static_cast<double>(v.size()));
      out.push_back(s);
    }
  }
  return out;
}

void require_same_geometry(const ModelConfig& a, const ModelConfig& b) {
  std::vector<std::string> diffs;
  if (a.p != b.p) diffs.push_back("p");
  if (a.n1 != b.n1) diffs.push_back("n1");
  if (a.n2 != b.n2) diffs.push_back("n2");
  if (a.sigma_case != b.sigma_case) diffs.push_back("sigma case");
  if (a.sigma_case == SigmaCase::kCase2 && a.rho != b.rho) diffs.push_back("rho");
  const auto ga = a.spikes.groups();
  const auto gb = b.spikes.groups();
  bool same_spikes = ga.size() == gb.size();
  for (std::size_t k = 0; same_spikes && k < ga.size(); ++k) {
    same_spikes = ga[k].alpha == gb[k].alpha && ga[k].multiplicity == gb[k].multiplicity;
  }
  if (!same_spikes) diffs.push_back("spikes");
  bool same_base = a.base_atoms.size() == b.base_atoms.size();
  for (std::size_t k = 0; same_base && k < a.base_atoms.size(); ++k) {
    same_base = a.base_atoms[k].value == b.base_atoms[k].value &&
                a.base_atoms[k].weight == b.base_atoms[k].weight;
  }
  if (!same_base) diffs.push_back("base spectrum");
  if (a.ratio_convention != b.ratio_convention) diffs.push_back("ratio convention");
  if (!diffs.empty()) {
    std::string msg = "configs differ in";
    for (std::size_t i = 0; i < diffs.size(); ++i) msg += (i ? ", " : " ") + diffs[i];
    throw Error(ErrorCode::kGeometry, msg);
  }
}

UniversalityReport universality_test(const ModelConfig& a, const ModelConfig& b,
                                     std::span<const CltLaw> laws,
                                     const OmegaProbeOptions& options, double level) {
  require_same_geometry(a, b);
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::kInvalidArgument, "level must lie in (0,1)");
  UniversalityReport report;
  report.level = level;
  report.a = collect_omega(a, laws, options);
  OmegaProbeOptions opts_b = options;
  opts_b.lambda = report.a.lambda;
  report.b = collect_omega(b, laws, opts_b);
  report.lambda = report.a.lambda;
  report.reps = options.reps.value_or(a.reps);
  const std::size_t m = report.a.dimension;
  report.corrected_level = level / static_cast<double>(m * (m + 1) / 2);
  report.pass = true;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const auto va = entry_values(report.a, i, j);
      const auto vb = entry_values(report.b, i, j);
      EntryComparison c;
      c.row = i;
      c.col = j;
      c.ks = ks_two_sample(va, vb);
      c.variance_ratio = variance_ratio_test(va, vb, report.corrected_level);
      c.rejected = c.ks.p_value < report.corrected_level;
      if (c.rejected) report.pass = false;
      report.entries.push_back(c);
    }
  }
  for (std::size_t g = 0; g < laws.size(); ++g) {
    for (std::size_t j = 0; j < laws[g].multiplicity; ++j) {
      std::vector<double> va, vb;
      for (const auto& rep : report.a.gamma) va.push_back(rep[g][static_cast<Eigen::Index>(j)]);
      for (const auto& rep : report.b.gamma) vb.push_back(rep[g][static_cast<Eigen::Index>(j)]);
      GammaComparison c;
      c.alpha = laws[g].alpha;
      c.index = j;
      c.ks = ks_two_sample(va, vb);
      c.variance_ratio = variance_ratio_test(va, vb, level);
      c.rejected = c.ks.p_value < level;
      report.gammas.push_back(c);
    }
  }
  return report;
}

}  // namespace fisherspike
