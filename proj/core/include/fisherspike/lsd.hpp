// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fisherspike {

/// One atom of the base (non-spiked) population spectrum H_n.
struct Atom {
  double value;
  double weight;
};

/// Base population spectrum of T_p^* T_p together with the two dimension
/// ratios of the non-spiked Fisher matrix. Everything the limiting spectral
/// distribution depends on.
class SpectralModel {
 public:
  /// Throws kInvalidArgument unless weights are positive and sum to one
  /// (1e-12), atoms are positive, y1 > 0 and 0 < y2 < 1.
  SpectralModel(std::vector<Atom> atoms, double y1, double y2);

  /// H_n = point mass at 1; the closed-form Wachter case.
  static SpectralModel unit(double y1, double y2);

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  double y1() const noexcept { return y1_; }
  double y2() const noexcept { return y2_; }
  bool is_unit_atom() const noexcept;

 private:
  std::vector<Atom> atoms_;
  double y1_;
  double y2_;
};

struct SupportInterval {
  double lower;
  double upper;

  double width() const noexcept { return upper - lower; }
  /// Guard band used to decide whether a point is "outside" the bulk.
  double margin() const noexcept { return 1e-6 * width(); }
  bool near_or_inside(double x) const noexcept {
    return x >= lower - margin() && x <= upper + margin();
  }
};

/// The five transforms of the non-spiked LSD (and its companion) at a real
/// point outside the support. Construction validates the algebraic
/// identities linking them.
class StieltjesBundle {
 public:
  /// `m`, `m2`, `m3` are the integrals against the LSD; the companion pair
  /// is derived from them with ratio `y1`. Throws kDegenerate when
  /// m2 <= 0 or m3 deviates from lambda*m2 + m beyond rounding.
  StieltjesBundle(double lambda, double m, double m2, double m3, double y1);

  double lambda() const noexcept { return lambda_; }
  double m() const noexcept { return m_; }
  double m2() const noexcept { return m2_; }
  double m3() const noexcept { return m3_; }
  double m_under() const noexcept { return m_under_; }
  double m_under2() const noexcept { return m_under2_; }
  double y1() const noexcept { return y1_; }

 private:
  double lambda_;
  double m_;
  double m2_;
  double m3_;
  double m_under_;
  double m_under2_;
  double y1_;
};

enum class StieltjesBackend { kQuadrature, kMonteCarlo };

struct MonteCarloBackendOptions {
  std::size_t dimension = 2000;
  std::size_t replicates = 20;
  std::uint64_t seed = 0x5eed'f15e'0001ULL;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Edges of the Fisher LSD. Requires H_n = delta_1 (kUnsupportedModel
/// otherwise).
SupportInterval wachter_support(const SpectralModel& model);

/// Largest-remainder allocation of `count` eigenvalues across the atoms,
/// ascending.
std::vector<double> allocate_base_spectrum(const SpectralModel& model, std::size_t count);

/// Absolutely continuous part of the Fisher LSD. Zero outside [a, b];
/// throws kDomain for x <= 0. When y1 > 1 the LSD additionally carries an
/// atom of mass 1 - 1/y1 at the origin, not represented here.
double wachter_density(double x, const SpectralModel& model);

/// Pooled eigenvalues of independently simulated non-spiked Fisher
/// matrices drawn with the model's base spectrum and ratios.
struct SimulatedSpectrum {
  std::vector<double> eigenvalues;
  std::size_t dimension = 0;
  std::size_t replicates = 0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

SimulatedSpectrum simulate_base_spectrum(const SpectralModel& model,
                                         const MonteCarloBackendOptions& options);

/// Transforms from an already simulated spectrum; throws
/// kSpikeInsideBulk when lambda falls within the observed eigenvalue range.
StieltjesBundle stieltjes_from_spectrum(double lambda,
                                        const SimulatedSpectrum& spectrum,
                                        double y1);

StieltjesBundle stieltjes(double lambda, const SpectralModel& model,
                          StieltjesBackend backend = StieltjesBackend::kQuadrature,
                          const MonteCarloBackendOptions& options = {});

/// Evaluates several points. With the Monte Carlo backend the simulated
/// spectrum is shared across all points.
std::vector<StieltjesBundle> stieltjes(std::span<const double> lambdas,
                                       const SpectralModel& model,
                                       StieltjesBackend backend,
                                       const MonteCarloBackendOptions& options = {});

}  // namespace fisherspike
