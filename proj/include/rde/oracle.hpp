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
// Brute-force ground truth on tiny alphabets: exhaustive search over
// channels whose rows live on a quantized simplex grid. Results are exact
// over the grid, so they certify the iterative solvers and the closed
// forms up to a reported quantization gap.
#ifndef RDE_ORACLE_HPP_
#define RDE_ORACLE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rde/prob.hpp"
#include "rde/region.hpp"

namespace rde {

struct OracleConfig {
  double quantization_step = 0.05;  // grid resolution on simplex coordinates
  double max_enumerations = 1e7;    // refuse larger channel counts

  void validate() const;  // 1/quantization_step must be an integer
};

// Exhaustive-search result. `value` is exact over the grid; the true
// optimum lies within `continuity_gap` of it (conservative entropy
// continuity bound) once the distortion constraint is widened by
// `distortion_slack`; `value_relaxed` is the grid optimum under that
// widened constraint.
struct OracleReport {
  double value = 0.0;
  Channel channel;
  double quantization_step = 0.0;
  double enumeration_count = 0.0;
  double continuity_gap = 0.0;
  double distortion_slack = 0.0;
  double value_relaxed = 0.0;
};

// Number of grid channels for the given shape.
double channel_grid_count(std::size_t n_in, std::size_t n_out,
                          const OracleConfig& cfg);

// Visits every row-stochastic matrix whose entries are multiples of the
// quantization step, as a flat row-major view. Refuses when the count
// exceeds the budget, reporting the count.
void enumerate_channels(std::size_t n_in, std::size_t n_out,
                        const OracleConfig& cfg,
                        const std::function<void(std::span<const double>)>& visit);

// Materializing convenience for small grids.
std::vector<Channel> enumerate_channels(const Alphabet& input,
                                        const Alphabet& output,
                                        const OracleConfig& cfg);

// Grid minimum of I(X; Xhat) subject to expected distortion <= distortion.
// The result is >= the true R(D). Inputs of zero probability are excluded
// from the enumeration; their reported rows are uniform.
OracleReport oracle_rd(const Pmf& p, const DistortionSpec& d, double distortion,
                       const OracleConfig& cfg = {});

// Grid maximum of H(X_h | U, Z) over channels p(u | x_r, x_h) whose
// optimal-decoder distortion is <= distortion. The result is <= the true
// Gamma(D).
OracleReport oracle_gamma(const PrivacyProblem& prob, double distortion,
                          const OracleConfig& cfg = {});

// Grid minimum of I(X_h X_r; U) - I(Z; U) subject to distortion <=
// distortion and equivocation >= equivocation_floor. The result is >= the
// true R(D, E).
OracleReport oracle_rate(const PrivacyProblem& prob, double distortion,
                         double equivocation_floor,
                         const OracleConfig& cfg = {});

}  // namespace rde

#endif  // RDE_ORACLE_HPP_
