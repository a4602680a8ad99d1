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
//
// Laplace-mechanism baseline: epsilon-differentially-private releases of
// count and clipped-sum queries, with the analytic density-ratio guarantee
// and the accuracy-versus-epsilon curve it implies.
#ifndef RDE_DP_HPP_
#define RDE_DP_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rde/errors.hpp"

namespace rde {

enum class QueryKind { kCount, kClippedSum };

// A statistical query mapping a column of per-row values to one real.
// Counts apply the predicate per row (default: count everything); sums
// clip every row into [clip_lo, clip_hi] before adding.
struct QuerySpec {
  QueryKind kind = QueryKind::kCount;
  double clip_lo = 0.0;
  double clip_hi = 0.0;
  std::function<bool(double)> predicate;

  void validate() const;
};

// Largest change of the query value when one row is added or removed:
// 1 for counts, max(|clip_lo|, |clip_hi|) for clipped sums.
double sensitivity(const QuerySpec& q);

// The query value itself (no noise).
double evaluate_query(const QuerySpec& q, std::span<const double> column);

// Laplace release parameters.
struct Mechanism {
  double epsilon = 0.0;
  double delta_f = 0.0;
  double b = 0.0;  // scale, delta_f / epsilon

  static Mechanism laplace(double epsilon, double delta_f);
};

// Zero-mean Laplace(b) noise via the inverse-CDF transform of a uniform
// variate from a seeded mt19937_64 stream; fully deterministic per seed.
std::vector<double> laplace_noise(std::size_t n, double b, std::uint64_t seed);

// Adds Laplace(sensitivity(q)/epsilon) noise independently to each value.
std::vector<double> laplace_mechanism(std::span<const double> values,
                                      const QuerySpec& q, double epsilon,
                                      std::uint64_t seed);

struct RatioCheckReport {
  double b = 0.0;
  double epsilon = 0.0;
  double delta_f = 0.0;
  double shift = 0.0;               // |z - z'| probed
  double analytic_ratio = 0.0;      // exp(shift / b), exact for the density
  double epsilon_bound = 0.0;       // exp(epsilon)
  bool analytic_holds = false;      // shift <= delta_f forces ratio <= bound
  double mc_max_ratio = 0.0;        // largest per-bin histogram ratio seen
  std::size_t mc_samples = 0;
  double mc_tolerance = 0.0;
  bool mc_holds = false;
};

// Verifies the density-ratio guarantee of Laplace(b): analytically (the
// ratio of densities shifted by `shift` is exactly exp(shift/b)) and by a
// seeded Monte-Carlo histogram comparison. Requires b == delta_f/epsilon.
// shift < 0 selects the worst admissible shift, delta_f.
RatioCheckReport dp_ratio_check(double b, double epsilon, double delta_f,
                                double shift = -1.0,
                                std::size_t mc_samples = 200000,
                                std::uint64_t seed = 7);

struct AccuracyPoint {
  double epsilon;
  double expected_abs_error;  // mean |noise| = sensitivity / epsilon
};

std::vector<AccuracyPoint> accuracy_curve(std::span<const double> epsilon_grid,
                                          const QuerySpec& q);

}  // namespace rde

#endif  // RDE_DP_HPP_
