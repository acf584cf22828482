// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "fisherspike/lsd.hpp"
#include "fisherspike/omega_probe.hpp"
#include "fisherspike/phase.hpp"
#include "fisherspike/simulate.hpp"
#include "fisherspike/theory.hpp"

namespace {

using namespace fisherspike;

ModelConfig reference(std::size_t p) {
  ModelConfig c;
  c.p = p;
  c.n1 = 5 * p;
  c.n2 = 2 * p;
  c.spikes = SpikeSpec({{20.0, 1}, {0.2, 2}, {0.1, 1}});
  return c;
}

void BM_StieltjesQuadrature(benchmark::State& state) {
  const auto model = SpectralModel::unit(0.2, 0.5);
  const double lambda = psi_n(0.2, model, {0.2, 0.5});
  for (auto _ : state) benchmark::DoNotOptimize(stieltjes(lambda, model));
}
BENCHMARK(BM_StieltjesQuadrature);

void BM_Classify(benchmark::State& state) {
  const auto model = SpectralModel::unit(0.2, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(classify(1.2, model, {0.2, 0.5}));
}
BENCHMARK(BM_Classify);

void BM_ComputeTheory(benchmark::State& state) {
  const auto c = reference(200);
  for (auto _ : state) benchmark::DoNotOptimize(compute_theory(c));
}
BENCHMARK(BM_ComputeTheory)->Unit(benchmark::kMicrosecond);

void BM_Replication(benchmark::State& state) {
  auto c = reference(static_cast<std::size_t>(state.range(0)));
  c.sigma_case = SigmaCase::kCase2;
  const auto sigma = build_sigma(c);
  std::size_t r = 0;
  for (auto _ : state) {
    const auto rep = draw_replication(c, r++);
    benchmark::DoNotOptimize(fisher_eigs_rooted(sigma.sigma1_root, Eigen::MatrixXd(), rep.x, rep.y));
  }
}
BENCHMARK(BM_Replication)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_ComputeOmega(benchmark::State& state) {
  auto c = reference(static_cast<std::size_t>(state.range(0)));
  c.sigma_case = SigmaCase::kCase2;
  const auto parts = SvdParts::from_sigma(build_sigma(c), c);
  const auto rep = draw_replication(c, 0);
  const double lambda = psi_n(0.2, c.base_model(), c.ratios());
  for (auto _ : state) benchmark::DoNotOptimize(compute_omega(lambda, parts, rep.x, rep.y));
}
BENCHMARK(BM_ComputeOmega)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
