// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fisherspike/clt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "fisherspike/error.hpp"

namespace fisherspike {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void require_lambda(double psi, const StieltjesBundle& bundle) {
  if (std::abs(bundle.lambda() - psi) > 1e-12 * std::max(1.0, std::abs(psi))) {
    throw Error(ErrorCode::kMismatch, "bundle evaluated at " + fmt(bundle.lambda()) +
                                          " but psi = " + fmt(psi));
  }
}

}  // namespace

MomentProfile MomentProfile::for_distribution(SampleDistribution dist) {
  return for_distribution(dist, {1.0});
}

MomentProfile MomentProfile::for_distribution(SampleDistribution dist,
                                              std::vector<double> column_fourth_power_sums) {
  MomentProfile p;
  p.fourth_moment = fisherspike::fourth_moment(dist);
  p.column_fourth_power_sums = std::move(column_fourth_power_sums);
  double mean_sum = 1.0;
  if (!p.column_fourth_power_sums.empty()) {
    mean_sum = std::accumulate(p.column_fourth_power_sums.begin(),
                               p.column_fourth_power_sums.end(), 0.0) /
               static_cast<double>(p.column_fourth_power_sums.size());
  }
  if (std::isinf(p.fourth_moment)) {
    p.beta = mean_sum == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    p.beta = mean_sum * (p.fourth_moment - 3.0);
  }
  return p;
}

std::string_view to_string(Regime regime) noexcept {
  return regime == Regime::kAssumptionD ? "assumptionD" : "diagonalBlock";
}

Regime parse_regime(std::string_view name) {
  if (name == "assumptionD") return Regime::kAssumptionD;
  if (name == "diagonalBlock") return Regime::kDiagonalBlock;
  throw Error(ErrorCode::kConfig, "unknown regime '" + std::string(name) +
                                      "' (expected assumptionD or diagonalBlock)");
}

double kappa_s(double alpha, double psi, const StieltjesBundle& b, double c2) {
  require_lambda(psi, b);
  return 1.0 + c2 * psi * psi * b.m2() + 2.0 * c2 * psi * b.m() + alpha * psi * b.m_under2() +
         alpha * b.m_under();
}

double theta_k(double alpha, double psi, const StieltjesBundle& b, Ratios r) {
  require_lambda(psi, b);
  const double c1 = r.c1;
  const double c2 = r.c2;
  return c2 + c2 * c2 * psi * psi * b.m2() + 2.0 * c2 * c2 * psi * b.m() +
         c1 * alpha * alpha * b.m_under2() + 2.0 * c1 * c2 * alpha * b.m3();
}

NuCoefficients nu_coefficients(double alpha, double psi, const StieltjesBundle& b, Ratios r) {
  require_lambda(psi, b);
  const double f = 1.0 + r.c1 * b.m();
  if (std::abs(f) < 1e-12) throw Error(ErrorCode::kDegenerate, "1 + c1 m(psi) vanishes");
  const double d = psi * f;
  const double g = 1.0 + r.c2 * psi * b.m();
  return {r.c1 * alpha * alpha / (d * d), r.c2 * g * g};
}

CltLaw limit_law(const PhaseResult& phase, const StieltjesBundle& bundle,
                 const MomentProfile& profile_x, const MomentProfile& profile_y, Regime regime,
                 Ratios ratios, std::size_t multiplicity, std::size_t scale_dim) {
  if (!phase.distant) {
    throw Error(ErrorCode::kUnsupportedModel,
                "no limit law for the non-distant spike alpha=" + fmt(phase.alpha));
  }
  if (multiplicity == 0) throw Error(ErrorCode::kInvalidArgument, "multiplicity must be >= 1");
  CltLaw law;
  law.alpha = phase.alpha;
  law.psi_n = phase.psi_n;
  law.kappa = kappa_s(phase.alpha, phase.psi_n, bundle, ratios.c2);
  if (!(std::abs(law.kappa) > 1e-12)) throw Error(ErrorCode::kDegenerate, "kappa vanishes");
  law.theta = theta_k(phase.alpha, phase.psi_n, bundle, ratios);
  const auto nu = nu_coefficients(phase.alpha, phase.psi_n, bundle, ratios);
  law.nu1 = nu.nu1;
  law.nu2 = nu.nu2;
  law.multiplicity = multiplicity;
  law.scale_dim = scale_dim;
  law.regime = regime;
  law.var_off = law.theta;
  if (regime == Regime::kAssumptionD) {
    law.var_diag = 2.0 * law.theta;
  } else {
    if (!std::isfinite(profile_x.beta) || !std::isfinite(profile_y.beta)) {
      throw Error(ErrorCode::kUnsupportedModel,
                  "diagonal-block regime needs a finite fourth moment");
    }
    law.beta_x = profile_x.beta;
    law.beta_y = profile_y.beta;
    law.var_diag = 2.0 * law.theta + law.beta_x * law.nu1 + law.beta_y * law.nu2;
  }
  if (!(law.var_diag > 0.0)) {
    throw Error(ErrorCode::kDegenerate, "diagonal variance " + fmt(law.var_diag) + " is not positive");
  }
  return law;
}

std::vector<Eigen::VectorXd> sample_limit(const CltLaw& law, std::size_t count,
                                          std::uint64_t seed) {
  if (count == 0) throw Error(ErrorCode::kInvalidArgument, "sample count must be positive");
  if (law.multiplicity == 0) throw Error(ErrorCode::kInvalidArgument, "multiplicity must be >= 1");
  if (!(law.var_diag > 0.0) || law.var_off < 0.0 || law.kappa == 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "limit law has invalid variances");
  }
  const auto m = static_cast<Eigen::Index>(law.multiplicity);
  const double sd_diag = std::sqrt(law.var_diag);
  const double sd_off = std::sqrt(law.var_off);
  Engine engine(seed);
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  Eigen::MatrixXd w(m, m);
  for (std::size_t r = 0; r < count; ++r) {
    for (Eigen::Index i = 0; i < m; ++i) {
      w(i, i) = sd_diag * draw(SampleDistribution::kGaussian, engine);
      for (Eigen::Index j = i + 1; j < m; ++j) {
        w(i, j) = w(j, i) = sd_off * draw(SampleDistribution::kGaussian, engine);
      }
    }
    Eigen::VectorXd ev;
    if (m == 1) {
      ev = Eigen::VectorXd::Constant(1, w(0, 0));
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w, Eigen::EigenvaluesOnly);
      ev = eig.eigenvalues();
    }
    ev *= -1.0 / law.kappa;
    std::sort(ev.begin(), ev.end(), std::greater<>());
    out.push_back(std::move(ev));
  }
  return out;
}

}  // namespace fisherspike
