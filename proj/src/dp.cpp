// Copyright 2026 The rde Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "rde/dp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace rde {

namespace {

// Uniform double in (0, 1), portable across platforms: mt19937_64 output
// is fully specified by the standard and no library distribution is used.
double next_uniform(std::mt19937_64& rng) {
  return (double(rng() >> 11) + 0.5) * 0x1p-53;
}

double laplace_sample(std::mt19937_64& rng, double b) {
  double u = next_uniform(rng) - 0.5;
  return -b * (u < 0.0 ? -1.0 : 1.0) * std::log(1.0 - 2.0 * std::abs(u));
}

}  // namespace

void QuerySpec::validate() const {
  if (kind == QueryKind::kClippedSum) {
    if (!std::isfinite(clip_lo) || !std::isfinite(clip_hi)) {
      throw ValidationError(
          "QuerySpec: sum queries are unbounded; clipping bounds are required");
    }
    if (!(clip_lo < clip_hi)) {
      throw ValidationError("QuerySpec: clip_lo must be below clip_hi");
    }
  }
}

double sensitivity(const QuerySpec& q) {
  q.validate();
  switch (q.kind) {
    case QueryKind::kCount:
      return 1.0;
    case QueryKind::kClippedSum:
      return std::max(std::abs(q.clip_lo), std::abs(q.clip_hi));
  }
  throw ArgumentError("sensitivity: unknown query kind");
}

double evaluate_query(const QuerySpec& q, std::span<const double> column) {
  q.validate();
  double acc = 0.0;
  for (double v : column) {
    if (q.kind == QueryKind::kCount) {
      if (!q.predicate || q.predicate(v)) acc += 1.0;
    } else {
      acc += std::clamp(v, q.clip_lo, q.clip_hi);
    }
  }
  return acc;
}

Mechanism Mechanism::laplace(double epsilon, double delta_f) {
  if (!(epsilon > 0.0)) throw ValidationError("Mechanism: epsilon must be positive");
  if (!(delta_f >= 0.0)) throw ValidationError("Mechanism: sensitivity must be >= 0");
  return Mechanism{epsilon, delta_f, delta_f / epsilon};
}

std::vector<double> laplace_noise(std::size_t n, double b, std::uint64_t seed) {
  if (!(b >= 0.0)) throw ValidationError("laplace_noise: scale must be >= 0");
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (double& v : out) v = b == 0.0 ? 0.0 : laplace_sample(rng, b);
  return out;
}

std::vector<double> laplace_mechanism(std::span<const double> values,
                                      const QuerySpec& q, double epsilon,
                                      std::uint64_t seed) {
  if (!(epsilon > 0.0)) throw ValidationError("laplace_mechanism: epsilon must be positive");
  Mechanism m = Mechanism::laplace(epsilon, sensitivity(q));
  std::vector<double> noise = laplace_noise(values.size(), m.b, seed);
  for (std::size_t i = 0; i < values.size(); ++i) noise[i] += values[i];
  return noise;
}

RatioCheckReport dp_ratio_check(double b, double epsilon, double delta_f,
                                double shift, std::size_t mc_samples,
                                std::uint64_t seed) {
  if (!(epsilon > 0.0) || !(delta_f > 0.0) || !(b > 0.0)) {
    throw ValidationError("dp_ratio_check: b, epsilon, delta_f must be positive");
  }
  if (std::abs(b - delta_f / epsilon) > 1e-9 * b) {
    std::ostringstream os;
    os << "dp_ratio_check: b = " << b << " is not delta_f/epsilon = "
       << delta_f / epsilon;
    throw ValidationError(os.str());
  }
  if (shift < 0.0) shift = delta_f;

  RatioCheckReport rep;
  rep.b = b;
  rep.epsilon = epsilon;
  rep.delta_f = delta_f;
  rep.shift = shift;
  // Laplace densities at distance `shift` differ pointwise by exactly
  // exp(shift/b); with b = delta_f/epsilon and shift <= delta_f this is
  // at most exp(epsilon).
  rep.analytic_ratio = std::exp(shift / b);
  rep.epsilon_bound = std::exp(epsilon);
  rep.analytic_holds =
      shift <= delta_f + 1e-12 && rep.analytic_ratio <= rep.epsilon_bound * (1.0 + 1e-12);

  // Histogram comparison of two shifted noise streams. Interval events
  // obey the same exp(shift/b) bound, so each populated bin ratio must
  // stay below it up to sampling noise.
  const double lo = -4.0 * b;
  const double hi = shift + 4.0 * b;
  const std::size_t n_bins = 24;
  const double width = (hi - lo) / double(n_bins);
  std::vector<double> c0(n_bins, 0.0), c1(n_bins, 0.0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < mc_samples; ++i) {
    double z0 = laplace_sample(rng, b);
    double z1 = shift + laplace_sample(rng, b);
    auto bin = [&](double z) {
      return std::min(n_bins - 1,
                      std::size_t(std::max(0.0, (z - lo) / width)));
    };
    c0[bin(z0)] += 1.0;
    c1[bin(z1)] += 1.0;
  }
  double worst = 0.0;
  const double min_count = 50.0;
  for (std::size_t i = 0; i < n_bins; ++i) {
    if (c0[i] >= min_count && c1[i] >= min_count) {
      worst = std::max(worst, std::max(c0[i] / c1[i], c1[i] / c0[i]));
    }
  }
  rep.mc_samples = mc_samples;
  rep.mc_max_ratio = worst;
  rep.mc_tolerance = 0.2;
  rep.mc_holds = worst <= rep.analytic_ratio * (1.0 + rep.mc_tolerance);
  return rep;
}

std::vector<AccuracyPoint> accuracy_curve(std::span<const double> epsilon_grid,
                                          const QuerySpec& q) {
  double df = sensitivity(q);
  std::vector<AccuracyPoint> out;
  out.reserve(epsilon_grid.size());
  for (double eps : epsilon_grid) {
    if (!(eps > 0.0)) throw ValidationError("accuracy_curve: epsilon grid must be positive");
    out.push_back(AccuracyPoint{eps, df / eps});
  }
  return out;
}

}  // namespace rde
