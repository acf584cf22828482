// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fisherspike/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fisherspike/error.hpp"

namespace fisherspike {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

struct PsiEval {
  double psi = 0.0;
  double dpsi = 0.0;
  bool ok = false;
};

// Non-throwing evaluation of psi_n and its derivative. `ok` is false at an
// atom or at a pole of the map.
PsiEval evaluate(double alpha, const SpectralModel& model, Ratios r) {
  double sum_t = 0.0;    // sum w t / (t - alpha)
  double sum_a = 0.0;    // sum w alpha / (t - alpha)
  double sum_t2 = 0.0;   // sum w t / (t - alpha)^2
  for (const auto& atom : model.atoms()) {
    const double d = atom.value - alpha;
    if (std::abs(d) <= 1e-12 * std::max(1.0, atom.value)) return {};
    sum_t += atom.weight * atom.value / d;
    sum_a += atom.weight * alpha / d;
    sum_t2 += atom.weight * atom.value / (d * d);
  }
  const double num = 1.0 - r.c1 * sum_t;
  const double den = 1.0 + r.c2 * sum_a;
  if (std::abs(den) < 1e-12) return {};
  const double dnum = -r.c1 * sum_t2;
  const double dden = r.c2 * sum_t2;
  PsiEval out;
  out.psi = alpha * num / den;
  out.dpsi = (num + alpha * dnum) / den - alpha * num * dden / (den * den);
  out.ok = true;
  return out;
}

bool at_atom(double alpha, const SpectralModel& model) {
  for (const auto& atom : model.atoms()) {
    if (std::abs(atom.value - alpha) <= 1e-12 * std::max(1.0, atom.value)) return true;
  }
  return false;
}

void check_ratios(Ratios r) {
  if (!(r.c1 > 0.0) || !(r.c2 > 0.0) || !std::isfinite(r.c1) || !std::isfinite(r.c2)) {
    throw Error(ErrorCode::kInvalidArgument, "ratios must be positive and finite");
  }
}

PsiEval evaluate_or_throw(double alpha, const SpectralModel& model, Ratios r) {
  check_ratios(r);
  if (!(alpha > 0.0)) throw Error(ErrorCode::kDomain, "spike must be positive, got " + fmt(alpha));
  if (at_atom(alpha, model)) {
    throw Error(ErrorCode::kDomain, "alpha=" + fmt(alpha) + " coincides with a base atom");
  }
  const auto e = evaluate(alpha, model, r);
  if (!e.ok) throw Error(ErrorCode::kPole, "psi_n has a pole at alpha=" + fmt(alpha));
  return e;
}

constexpr int kScanPoints = 4000;

// Walks from alpha toward `end` (an atom, 0, or +inf) on a log scale in the
// remaining distance and returns the first critical point where psi'
// crosses from negative to non-negative.
std::optional<double> scan(double alpha, double end, const SpectralModel& model, Ratios r) {
  auto point = [&](int i) {
    const double s = static_cast<double>(i) / kScanPoints;
    if (std::isinf(end)) return alpha * std::pow(10.0, 8.0 * s);
    return end + (alpha - end) * std::pow(10.0, -12.0 * s);
  };
  double lo = alpha;
  for (int i = 1; i <= kScanPoints; ++i) {
    const double x = point(i);
    const auto e = evaluate(x, model, r);
    if (!e.ok) continue;
    if (e.dpsi >= 0.0) {
      double hi = x;
      for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const auto em = evaluate(mid, model, r);
        if (em.ok && std::abs(em.dpsi) < 1e-10) return mid;
        // A pole at mid keeps psi' negative on both sides, so treat it as
        // still descending.
        if (!em.ok || em.dpsi < 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    lo = x;
  }
  return std::nullopt;
}

}  // namespace

SpikeSpec::SpikeSpec(std::vector<SpikeGroup> groups) : groups_(std::move(groups)) {
  for (const auto& g : groups_) {
    if (!(g.alpha > 0.0) || !std::isfinite(g.alpha)) {
      throw Error(ErrorCode::kInvalidArgument, "spike values must be positive and finite");
    }
    if (g.multiplicity == 0) throw Error(ErrorCode::kInvalidArgument, "spike multiplicity must be >= 1");
    total_ += g.multiplicity;
  }
  std::sort(groups_.begin(), groups_.end(),
            [](const SpikeGroup& a, const SpikeGroup& b) { return a.alpha > b.alpha; });
  for (std::size_t i = 1; i < groups_.size(); ++i) {
    if (groups_[i].alpha == groups_[i - 1].alpha) {
      throw Error(ErrorCode::kInvalidArgument,
                  "spike value " + fmt(groups_[i].alpha) + " listed twice; merge multiplicities");
    }
  }
}

std::vector<std::size_t> SpikeSpec::rank_offsets(std::size_t p, const SpectralModel& model) const {
  if (total_ > p) throw Error(ErrorCode::kInvalidArgument, "total multiplicity exceeds p");
  const auto base = allocate_base_spectrum(model, p - total_);
  std::vector<std::size_t> out;
  out.reserve(groups_.size());
  std::size_t spikes_above = 0;
  for (const auto& g : groups_) {
    const auto base_above = static_cast<std::size_t>(
        base.end() - std::upper_bound(base.begin(), base.end(), g.alpha));
    out.push_back(spikes_above + base_above);
    spikes_above += g.multiplicity;
  }
  return out;
}

double psi_n(double alpha, const SpectralModel& model, Ratios ratios) {
  return evaluate_or_throw(alpha, model, ratios).psi;
}

double psi_prime(double alpha, const SpectralModel& model, Ratios ratios) {
  return evaluate_or_throw(alpha, model, ratios).dpsi;
}

PhaseResult classify(double alpha, const SpectralModel& model, Ratios ratios) {
  const auto e = evaluate_or_throw(alpha, model, ratios);
  PhaseResult out{alpha, e.psi, e.dpsi, e.dpsi > 0.0, e.psi, std::nullopt};
  if (out.distant) return out;
  if (e.dpsi == 0.0) {
    out.critical_alpha = alpha;
    return out;
  }

  double above = std::numeric_limits<double>::infinity();
  double below = 0.0;
  for (const auto& atom : model.atoms()) {
    if (atom.value > alpha) above = std::min(above, atom.value);
    if (atom.value < alpha) below = std::max(below, atom.value);
  }
  auto crit = scan(alpha, above, model, ratios);
  if (!crit) crit = scan(alpha, below, model, ratios);
  if (!crit) {
    throw Error(ErrorCode::kClassification,
                "no critical point brackets alpha=" + fmt(alpha) + " (psi'=" + fmt(e.dpsi) +
                    ", searched (" + fmt(below) + ", " + fmt(above) + "))");
  }
  out.critical_alpha = *crit;
  const auto ec = evaluate(*crit, model, ratios);
  if (!ec.ok) throw Error(ErrorCode::kClassification, "critical point lands on a pole");
  out.rho = ec.psi;
  return out;
}

std::vector<PhaseResult> classify(const SpikeSpec& spec, const SpectralModel& model, Ratios ratios) {
  std::vector<PhaseResult> out;
  out.reserve(spec.size());
  for (const auto& g : spec.groups()) out.push_back(classify(g.alpha, model, ratios));
  return out;
}

}  // namespace fisherspike
