// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fisherspike/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fisherspike/error.hpp"
#include "fisherspike/linalg.hpp"
#include "fisherspike/parallel.hpp"

namespace fisherspike {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

bool is_diagonal(const Eigen::MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != 0.0) return false;
    }
  }
  return true;
}

Eigen::MatrixXd apply_root(const Eigen::MatrixXd& root, const Eigen::MatrixXd& x) {
  if (root.size() == 0) return x;
  if (is_diagonal(root)) return root.diagonal().asDiagonal() * x;
  return root * x;
}

std::size_t find_group(const ModelConfig& config, double alpha) {
  const auto groups = config.spikes.groups();
  for (std::size_t k = 0; k < groups.size(); ++k) {
    if (groups[k].alpha == alpha) return k;
  }
  throw Error(ErrorCode::kConfig, "limit law for alpha=" + fmt(alpha) + " has no spike group");
}

}  // namespace

std::string_view to_string(SigmaCase c) noexcept { return c == SigmaCase::kCase1 ? "case1" : "case2"; }

SigmaCase parse_sigma_case(std::string_view name) {
  if (name == "case1" || name == "I" || name == "1") return SigmaCase::kCase1;
  if (name == "case2" || name == "II" || name == "2") return SigmaCase::kCase2;
  throw Error(ErrorCode::kConfig, "unknown sigma case '" + std::string(name) + "'");
}

std::string_view to_string(RatioConvention c) noexcept {
  return c == RatioConvention::kPOverN ? "p_over_n" : "p_minus_m_over_n";
}

RatioConvention parse_ratio_convention(std::string_view name) {
  if (name == "p_over_n") return RatioConvention::kPOverN;
  if (name == "p_minus_m_over_n") return RatioConvention::kPMinusMOverN;
  throw Error(ErrorCode::kConfig, "unknown ratio convention '" + std::string(name) + "'");
}

double TruncationPolicy::threshold(std::size_t n) const {
  const auto nn = static_cast<double>(n);
  return eta_scale * std::pow(nn, -eta_exponent) * std::sqrt(nn);
}

void TruncationPolicy::validate() const {
  if (!(eta_exponent > 0.0 && eta_exponent < 0.5)) {
    throw Error(ErrorCode::kConfig, "truncation exponent must lie in (0, 1/2)");
  }
  if (!(eta_scale > 0.0) || !std::isfinite(eta_scale)) {
    throw Error(ErrorCode::kConfig, "truncation scale must be positive");
  }
}

void ModelConfig::validate() const {
  if (p == 0 || n1 == 0 || n2 == 0) throw Error(ErrorCode::kConfig, "p, n1 and n2 must be positive");
  if (p <= spikes.total()) throw Error(ErrorCode::kConfig, "p must exceed the total spike multiplicity");
  if (n2 <= p) throw Error(ErrorCode::kConfig, "n2 must exceed p so that S2 is invertible");
  if (reps == 0) throw Error(ErrorCode::kConfig, "reps must be >= 1");
  if (sigma_case == SigmaCase::kCase2 && !(std::abs(rho) < 1.0)) {
    throw Error(ErrorCode::kConfig, "Toeplitz rho must lie in (-1, 1)");
  }
  truncation.validate();
  try {
    (void)base_model();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
}

Ratios ModelConfig::ratios() const {
  const double dim = ratio_convention == RatioConvention::kPOverN
                         ? static_cast<double>(p)
                         : static_cast<double>(p - spikes.total());
  return {dim / static_cast<double>(n1), dim / static_cast<double>(n2)};
}

SpectralModel ModelConfig::base_model() const {
  const auto r = ratios();
  return SpectralModel(base_atoms, r.c1, r.c2);
}

Eigen::VectorXd population_spectrum(const ModelConfig& config) {
  const auto model = config.base_model();
  const auto offsets = config.spikes.rank_offsets(config.p, model);
  const auto base = allocate_base_spectrum(model, config.p - config.spikes.total());
  std::vector<char> taken(config.p, 0);
  Eigen::VectorXd values(static_cast<Eigen::Index>(config.p));
  const auto groups = config.spikes.groups();
  for (std::size_t k = 0; k < groups.size(); ++k) {
    for (std::size_t j = 0; j < groups[k].multiplicity; ++j) {
      values[static_cast<Eigen::Index>(offsets[k] + j)] = groups[k].alpha;
      taken[offsets[k] + j] = 1;
    }
  }
  auto it = base.rbegin();
  for (std::size_t i = 0; i < config.p; ++i) {
    if (!taken[i]) values[static_cast<Eigen::Index>(i)] = *it++;
  }
  return values;
}

SigmaParts build_sigma(const ModelConfig& config) {
  if (config.sigma_case == SigmaCase::kCase2 && !(std::abs(config.rho) < 1.0)) {
    throw Error(ErrorCode::kConfig, "Toeplitz rho must lie in (-1, 1)");
  }
  const auto p = static_cast<Eigen::Index>(config.p);
  SigmaParts parts;
  parts.eigenvalues = population_spectrum(config);
  const Eigen::VectorXd root = parts.eigenvalues.cwiseSqrt();
  if (config.sigma_case == SigmaCase::kCase1) {
    parts.eigenvectors = Eigen::MatrixXd::Identity(p, p);
    parts.sigma1 = parts.eigenvalues.asDiagonal();
    parts.sigma1_root = root.asDiagonal();
    return parts;
  }
  Eigen::MatrixXd toeplitz(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      toeplitz(i, j) = std::pow(config.rho, static_cast<double>(std::abs(i - j)));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(toeplitz);
  // Columns in descending order of the Toeplitz eigenvalues, each with a
  // positive entry of largest magnitude so the basis is reproducible.
  Eigen::MatrixXd u = eig.eigenvectors().rowwise().reverse();
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::Index arg = 0;
    u.col(j).cwiseAbs().maxCoeff(&arg);
    if (u(arg, j) < 0.0) u.col(j) *= -1.0;
  }
  parts.eigenvectors = u;
  parts.sigma1 = u * parts.eigenvalues.asDiagonal() * u.transpose();
  parts.sigma1 = 0.5 * (parts.sigma1 + parts.sigma1.transpose()).eval();
  parts.sigma1_root = u * root.asDiagonal() * u.transpose();
  parts.sigma1_root = 0.5 * (parts.sigma1_root + parts.sigma1_root.transpose()).eval();
  return parts;
}

Eigen::MatrixXd truncate_center_scale(const Eigen::MatrixXd& x, std::size_t n,
                                      const TruncationPolicy& policy,
                                      std::optional<SampleDistribution> law) {
  if (static_cast<std::size_t>(x.cols()) != n) {
    throw Error(ErrorCode::kInvalidArgument, "truncation n does not match the column count");
  }
  policy.validate();
  const double tau = policy.threshold(n);
  Eigen::MatrixXd out = (x.array().abs() < tau).select(x, 0.0);
  double centre = 0.0;
  double sd = 1.0;
  if (law) {
    // All supported laws are symmetric, so truncation keeps the mean at 0.
    sd = std::sqrt(truncated_second_moment(*law, tau));
  } else {
    const auto count = static_cast<double>(out.size());
    if (count < 2) throw Error(ErrorCode::kDegenerate, "too few entries for empirical moments");
    centre = out.mean();
    sd = std::sqrt((out.array() - centre).square().sum() / (count - 1.0));
  }
  if (!(sd >= 1e-8)) {
    throw Error(ErrorCode::kDegenerate, "post-truncation scale " + fmt(sd) + " is below 1e-8");
  }
  if (centre == 0.0 && sd == 1.0) return out;
  out.array() -= centre;
  out /= sd;
  return out;
}

Eigen::VectorXd fisher_eigs_rooted(const Eigen::MatrixXd& sigma1_root,
                                   const Eigen::MatrixXd& sigma2_root, const Eigen::MatrixXd& x,
                                   const Eigen::MatrixXd& y) {
  if (x.rows() != y.rows()) throw Error(ErrorCode::kInvalidArgument, "X and Y need the same row count");
  if (sigma1_root.size() != 0 && sigma1_root.rows() != x.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "Sigma1 does not match the dimension of X");
  }
  if (sigma2_root.size() != 0 && sigma2_root.rows() != y.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "Sigma2 does not match the dimension of Y");
  }
  const Eigen::MatrixXd s1 =
      scaled_gram(apply_root(sigma1_root, x), 1.0 / static_cast<double>(x.cols()));
  const Eigen::MatrixXd s2 =
      scaled_gram(apply_root(sigma2_root, y), 1.0 / static_cast<double>(y.cols()));
  return generalized_eigenvalues_desc(s1, s2).cwiseMax(0.0);
}

Eigen::VectorXd fisher_eigs(const Eigen::MatrixXd& sigma1, const Eigen::MatrixXd& sigma2,
                            const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  return fisher_eigs_rooted(symmetric_sqrt(sigma1), symmetric_sqrt(sigma2), x, y);
}

Replication draw_replication(const ModelConfig& config, std::size_t rep) {
  Engine engine(child_seed(config.seed, rep));
  const auto p = static_cast<Eigen::Index>(config.p);
  Replication out;
  out.x = draw_matrix(config.dist_x, p, static_cast<Eigen::Index>(config.n1), engine);
  out.y = draw_matrix(config.dist_y, p, static_cast<Eigen::Index>(config.n2), engine);
  out.x = truncate_center_scale(out.x, config.n1, config.truncation, config.dist_x);
  out.y = truncate_center_scale(out.y, config.n2, config.truncation, config.dist_y);
  return out;
}

EigenSample extract_gamma(const Eigen::VectorXd& eigs, const ModelConfig& config,
                          std::span<const CltLaw> laws) {
  if (static_cast<std::size_t>(eigs.size()) != config.p) {
    throw Error(ErrorCode::kInvalidArgument, "expected p eigenvalues");
  }
  const auto offsets = config.spikes.rank_offsets(config.p, config.base_model());
  const double root_dim = std::sqrt(static_cast<double>(config.p - config.spikes.total()));
  EigenSample out;
  out.all_eigs = eigs;
  for (const auto& law : laws) {
    const auto k = find_group(config, law.alpha);
    const auto m = static_cast<Eigen::Index>(config.spikes.groups()[k].multiplicity);
    const Eigen::VectorXd l = eigs.segment(static_cast<Eigen::Index>(offsets[k]), m);
    out.gamma.push_back(root_dim * (l.array() / law.psi_n - 1.0).matrix());
  }
  return out;
}

void finalize_report(const ModelConfig& config, McReport& report, const RunOptions& options) {
  if (report.rep_index.empty() || report.failed_reps.size() * 100 > report.reps_requested) {
    const std::string first =
        report.failure_messages.empty() ? std::string("none recorded") : report.failure_messages.front();
    throw Error(ErrorCode::kHarness, std::to_string(report.failed_reps.size()) + " of " +
                                         std::to_string(report.reps_requested) +
                                         " replications failed; first: " + first);
  }
  const auto ok_reps = static_cast<double>(report.rep_index.size());
  if (report.bulk && report.bulk_contained.size() == report.rep_index.size()) {
    std::size_t contained = 0;
    for (auto c : report.bulk_contained) contained += c;
    report.bulk_containment_fraction = static_cast<double>(contained) / ok_reps;
  } else {
    report.bulk_containment_fraction = kNaN;
  }
  const double root_dim = std::sqrt(static_cast<double>(config.p - config.spikes.total()));
  for (std::size_t i = 0; i < report.groups.size(); ++i) {
    auto& g = report.groups[i];
    const auto m = static_cast<Eigen::Index>(g.law.multiplicity);
    const auto n = static_cast<Eigen::Index>(g.gamma.size());
    if (static_cast<std::size_t>(n) != report.rep_index.size()) {
      throw Error(ErrorCode::kHarness, "group gamma count does not match the replication count");
    }
    Eigen::MatrixXd data(n, m);
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto& v = g.gamma[static_cast<std::size_t>(r)];
      if (v.size() != m) throw Error(ErrorCode::kHarness, "gamma vector has the wrong length");
      data.row(r) = v.transpose();
    }
    g.mean = data.colwise().mean().transpose();
    g.variance_defined = n >= 2;
    if (g.variance_defined) {
      const Eigen::MatrixXd centred = data.rowwise() - g.mean.transpose();
      g.covariance = centred.transpose() * centred / static_cast<double>(n - 1);
    } else {
      g.covariance = Eigen::MatrixXd::Constant(m, m, kNaN);
    }

    if (report.bulk) {
      std::size_t positioned = 0;
      for (Eigen::Index r = 0; r < n; ++r) {
        const Eigen::ArrayXd l = g.law.psi_n * (1.0 + data.row(r).array() / root_dim);
        bool ok = false;
        if (g.law.psi_n > report.bulk->upper) ok = l.minCoeff() > report.bulk->upper;
        if (g.law.psi_n < report.bulk->lower) ok = l.maxCoeff() < report.bulk->lower;
        positioned += ok ? 1 : 0;
      }
      g.positioning_fraction = static_cast<double>(positioned) / ok_reps;
    } else {
      g.positioning_fraction = kNaN;
    }

    std::vector<std::vector<double>> limit_cols;
    if (m > 1) {
      const auto draws = sample_limit(g.law, options.limit_draws,
                                      child_seed(config.seed ^ 0x4c494d4954ULL, i));
      limit_cols.assign(static_cast<std::size_t>(m), {});
      for (const auto& d : draws) {
        for (Eigen::Index j = 0; j < m; ++j) limit_cols[static_cast<std::size_t>(j)].push_back(d[j]);
      }
    }
    const double sd = std::sqrt(g.law.sigma2());
    g.ks.clear();
    for (Eigen::Index j = 0; j < m; ++j) {
      std::vector<double> col(data.col(j).begin(), data.col(j).end());
      if (m == 1) {
        g.ks.push_back(ks_one_sample(col, [sd](double x) { return normal_cdf(x, sd); }));
      } else {
        g.ks.push_back(ks_two_sample(col, limit_cols[static_cast<std::size_t>(j)]));
      }
    }
  }
}

McReport run_mc(const ModelConfig& config, std::span<const CltLaw> laws, const RunOptions& options) {
  config.validate();
  const auto model = config.base_model();
  const auto offsets = config.spikes.rank_offsets(config.p, model);
  const auto sigma = build_sigma(config);

  McReport report;
  report.reps_requested = config.reps;
  if (model.is_unit_atom()) report.bulk = wachter_support(model);

  std::vector<char> spiked(config.p, 0);
  const auto groups = config.spikes.groups();
  for (std::size_t k = 0; k < groups.size(); ++k) {
    std::fill_n(spiked.begin() + static_cast<std::ptrdiff_t>(offsets[k]), groups[k].multiplicity, 1);
  }
  struct Slot {
    bool ok = false;
    std::string error;
    std::vector<Eigen::VectorXd> gamma;
    bool contained = false;
  };
  std::vector<Slot> slots(config.reps);
  const Eigen::MatrixXd no_root;
  parallel_for_index(config.reps, options.threads, [&](std::size_t r) {
    Slot& slot = slots[r];
    try {
      const auto rep = draw_replication(config, r);
      const auto eigs = fisher_eigs_rooted(sigma.sigma1_root, no_root, rep.x, rep.y);
      slot.gamma = extract_gamma(eigs, config, laws).gamma;
      if (report.bulk) {
        const double eps = 0.15 * report.bulk->width();
        slot.contained = true;
        for (std::size_t i = 0; i < config.p; ++i) {
          if (spiked[i]) continue;
          const double v = eigs[static_cast<Eigen::Index>(i)];
          if (v < report.bulk->lower - eps || v > report.bulk->upper + eps) slot.contained = false;
        }
      }
      slot.ok = true;
    } catch (const std::exception& e) {
      slot.error = e.what();
    }
  });

  report.groups.resize(laws.size());
  for (std::size_t i = 0; i < laws.size(); ++i) {
    report.groups[i].law = laws[i];
    report.groups[i].offset = offsets[find_group(config, laws[i].alpha)];
  }
  for (std::size_t r = 0; r < slots.size(); ++r) {
    auto& slot = slots[r];
    if (!slot.ok) {
      report.failed_reps.push_back(r);
      report.failure_messages.push_back(std::move(slot.error));
      continue;
    }
    report.rep_index.push_back(r);
    if (report.bulk) report.bulk_contained.push_back(slot.contained ? 1 : 0);
    for (std::size_t i = 0; i < laws.size(); ++i) report.groups[i].gamma.push_back(std::move(slot.gamma[i]));
  }
  finalize_report(config, report, options);
  return report;
}

}  // namespace fisherspike
