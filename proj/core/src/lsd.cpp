// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fisherspike/lsd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fisherspike/error.hpp"
#include "fisherspike/linalg.hpp"
#include "fisherspike/parallel.hpp"
#include "fisherspike/random.hpp"

namespace fisherspike {

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

SpectralModel::SpectralModel(std::vector<Atom> atoms, double y1, double y2)
    : atoms_(std::move(atoms)), y1_(y1), y2_(y2) {
  if (atoms_.empty()) throw Error(ErrorCode::kInvalidArgument, "base spectrum has no atoms");
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (!(a.value > 0.0)) throw Error(ErrorCode::kInvalidArgument, "base atoms must be positive");
    if (!(a.weight > 0.0)) throw Error(ErrorCode::kInvalidArgument, "atom weights must be positive");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "atom weights sum to " + fmt_double(total));
  }
  if (!(y1_ > 0.0) || !std::isfinite(y1_)) throw Error(ErrorCode::kInvalidArgument, "y1 must be positive");
  if (!(y2_ > 0.0 && y2_ < 1.0)) throw Error(ErrorCode::kInvalidArgument, "y2 must lie in (0,1)");
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
}

SpectralModel SpectralModel::unit(double y1, double y2) { return SpectralModel({{1.0, 1.0}}, y1, y2); }

bool SpectralModel::is_unit_atom() const noexcept {
  return atoms_.size() == 1 && atoms_.front().value == 1.0;
}

StieltjesBundle::StieltjesBundle(double lambda, double m, double m2, double m3, double y1)
    : lambda_(lambda), m_(m), m2_(m2), m3_(m3), y1_(y1) {
  m_under_ = -(1.0 - y1) / lambda + y1 * m;
  m_under2_ = (1.0 - y1) / (lambda * lambda) + y1 * m2;
  if (!(m2_ > 0.0) || !(m_under2_ > 0.0)) {
    throw Error(ErrorCode::kDegenerate, "second-order transforms must be positive at lambda=" +
                                            fmt_double(lambda));
  }
  const double scale = std::abs(lambda * m2) + std::abs(m) + std::abs(m3);
  if (std::abs(m3 - (lambda * m2 + m)) > 1e-10 * scale) {
    throw Error(ErrorCode::kDegenerate, "m3 != lambda*m2 + m at lambda=" + fmt_double(lambda));
  }
}

SupportInterval wachter_support(const SpectralModel& model) {
  if (!model.is_unit_atom()) {
    throw Error(ErrorCode::kUnsupportedModel,
                "closed-form support needs H_n = delta_1; use the Monte Carlo backend");
  }
  const double y1 = model.y1();
  const double y2 = model.y2();
  const double h = std::sqrt(y1 + y2 - y1 * y2);
  const double denom = (1.0 - y2) * (1.0 - y2);
  return {(1.0 - h) * (1.0 - h) / denom, (1.0 + h) * (1.0 + h) / denom};
}

double wachter_density(double x, const SpectralModel& model) {
  if (!(x > 0.0)) throw Error(ErrorCode::kDomain, "density evaluated at x <= 0");
  const auto [a, b] = wachter_support(model);
  if (x <= a || x >= b) return 0.0;
  const double y1 = model.y1();
  const double y2 = model.y2();
  return (1.0 - y2) * std::sqrt((b - x) * (x - a)) /
         (2.0 * std::numbers::pi * x * (y1 + y2 * x));
}

namespace {

void require_outside(double lambda, const SupportInterval& support) {
  if (support.near_or_inside(lambda)) {
    throw Error(ErrorCode::kSpikeInsideBulk,
                "lambda=" + fmt_double(lambda) + " lies within the bulk [" +
                    fmt_double(support.lower) + ", " + fmt_double(support.upper) + "] (margin " +
                    fmt_double(support.margin()) + ")");
  }
}

// Integrates g against the Wachter density. With x = c + h sin(t) the
// square-root edge factor becomes h cos(t) and the integrand is smooth.
template <class G>
double integrate_wachter(const SpectralModel& model, const SupportInterval& support, G&& g) {
  const double y1 = model.y1();
  const double y2 = model.y2();
  const double c = 0.5 * (support.lower + support.upper);
  const double h = 0.5 * (support.upper - support.lower);
  const double pref = (1.0 - y2) * h * h / (2.0 * std::numbers::pi);
  auto integrand = [&](double t) {
    const double ct = std::cos(t);
    const double x = c + h * std::sin(t);
    return pref * ct * ct / (x * (y1 + y2 * x)) * g(x);
  };
  double error = 0.0;
  const double half_pi = 0.5 * std::numbers::pi;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, -half_pi, half_pi,
                                                                        15, 1e-13, &error);
}

StieltjesBundle stieltjes_quadrature(double lambda, const SpectralModel& model) {
  const auto support = wachter_support(model);
  require_outside(lambda, support);
  double m = integrate_wachter(model, support, [lambda](double x) { return 1.0 / (x - lambda); });
  double m2 = integrate_wachter(model, support, [lambda](double x) {
    const double d = lambda - x;
    return 1.0 / (d * d);
  });
  double m3 = integrate_wachter(model, support, [lambda](double x) {
    const double d = lambda - x;
    return x / (d * d);
  });
  if (model.y1() > 1.0) {
    // Atom of mass 1 - 1/y1 at the origin.
    if (lambda == 0.0) throw Error(ErrorCode::kSpikeInsideBulk, "lambda = 0 hits the null atom");
    const double mass = 1.0 - 1.0 / model.y1();
    m += mass / (0.0 - lambda);
    m2 += mass / (lambda * lambda);
  }
  return StieltjesBundle(lambda, m, m2, m3, model.y1());
}

}  // namespace

std::vector<double> allocate_base_spectrum(const SpectralModel& model, std::size_t dimension) {
  const auto atoms = model.atoms();
  std::vector<std::size_t> counts(atoms.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double exact = atoms[i].weight * static_cast<double>(dimension);
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& l, const auto& r) { return l.first > r.first; });
  for (std::size_t k = 0; assigned < dimension; ++k, ++assigned) ++counts[remainders[k].second];
  std::vector<double> values;
  values.reserve(dimension);
  for (std::size_t i = 0; i < atoms.size(); ++i) values.insert(values.end(), counts[i], atoms[i].value);
  return values;
}

SimulatedSpectrum simulate_base_spectrum(const SpectralModel& model,
                                         const MonteCarloBackendOptions& options) {
  if (options.replicates < 2) {
    throw Error(ErrorCode::kConfig, "Monte Carlo backend needs at least 2 replicates");
  }
  if (options.dimension < 2) throw Error(ErrorCode::kConfig, "Monte Carlo dimension must be >= 2");
  const auto dim = static_cast<Eigen::Index>(options.dimension);
  const auto n1 = static_cast<Eigen::Index>(std::llround(static_cast<double>(dim) / model.y1()));
  const auto n2 = static_cast<Eigen::Index>(std::llround(static_cast<double>(dim) / model.y2()));
  if (n2 <= dim) throw Error(ErrorCode::kConfig, "Monte Carlo backend needs n2 > dimension");

  const auto base = allocate_base_spectrum(model, options.dimension);
  Eigen::VectorXd root(dim);
  for (Eigen::Index i = 0; i < dim; ++i) root[i] = std::sqrt(base[static_cast<std::size_t>(i)]);

  std::vector<Eigen::VectorXd> per_rep(options.replicates);
  parallel_for_index(options.replicates, options.threads, [&](std::size_t r) {
    Engine engine(child_seed(options.seed, r));
    Eigen::MatrixXd x = draw_matrix(SampleDistribution::kGaussian, dim, n1, engine);
    const Eigen::MatrixXd y = draw_matrix(SampleDistribution::kGaussian, dim, n2, engine);
    x = root.asDiagonal() * x;
    per_rep[r] = generalized_eigenvalues_desc(scaled_gram(x, 1.0 / static_cast<double>(n1)),
                                              scaled_gram(y, 1.0 / static_cast<double>(n2)));
  });

  SimulatedSpectrum out;
  out.dimension = options.dimension;
  out.replicates = options.replicates;
  out.eigenvalues.reserve(options.dimension * options.replicates);
  for (const auto& ev : per_rep) out.eigenvalues.insert(out.eigenvalues.end(), ev.begin(), ev.end());
  const auto [lo, hi] = std::minmax_element(out.eigenvalues.begin(), out.eigenvalues.end());
  out.min_eigenvalue = *lo;
  out.max_eigenvalue = *hi;
  return out;
}

StieltjesBundle stieltjes_from_spectrum(double lambda, const SimulatedSpectrum& spectrum, double y1) {
  if (spectrum.eigenvalues.empty()) throw Error(ErrorCode::kConfig, "empty simulated spectrum");
  // When n1 < dimension the null eigenvalues are part of the spectrum, so
  // only the nonzero bulk is used as the exclusion band.
  double lo = spectrum.min_eigenvalue;
  if (y1 > 1.0) {
    lo = spectrum.max_eigenvalue;
    for (double v : spectrum.eigenvalues) {
      if (v > 1e-9 * spectrum.max_eigenvalue) lo = std::min(lo, v);
    }
  }
  const SupportInterval observed{lo, spectrum.max_eigenvalue};
  require_outside(lambda, observed);
  double m = 0.0, m2 = 0.0, m3 = 0.0;
  for (double x : spectrum.eigenvalues) {
    const double d = lambda - x;
    m -= 1.0 / d;
    m2 += 1.0 / (d * d);
    m3 += x / (d * d);
  }
  const auto n = static_cast<double>(spectrum.eigenvalues.size());
  return StieltjesBundle(lambda, m / n, m2 / n, m3 / n, y1);
}

StieltjesBundle stieltjes(double lambda, const SpectralModel& model, StieltjesBackend backend,
                          const MonteCarloBackendOptions& options) {
  const double single[] = {lambda};
  return stieltjes(std::span<const double>(single), model, backend, options).front();
}

std::vector<StieltjesBundle> stieltjes(std::span<const double> lambdas, const SpectralModel& model,
                                       StieltjesBackend backend,
                                       const MonteCarloBackendOptions& options) {
  std::vector<StieltjesBundle> out;
  out.reserve(lambdas.size());
  if (backend == StieltjesBackend::kQuadrature) {
    if (!model.is_unit_atom()) {
      throw Error(ErrorCode::kUnsupportedModel,
                  "quadrature backend needs H_n = delta_1; use the Monte Carlo backend");
    }
    for (double lambda : lambdas) out.push_back(stieltjes_quadrature(lambda, model));
    return out;
  }
  // Check against the closed-form bulk first when it is known so both
  // backends reject the same points.
  if (model.is_unit_atom()) {
    const auto support = wachter_support(model);
    for (double lambda : lambdas) require_outside(lambda, support);
  }
  const auto spectrum = simulate_base_spectrum(model, options);
  for (double lambda : lambdas) out.push_back(stieltjes_from_spectrum(lambda, spectrum, model.y1()));
  return out;
}

}  // namespace fisherspike
