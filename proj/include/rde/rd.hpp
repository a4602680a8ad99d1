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
// The classical rate-distortion function R(D) of a discrete memoryless
// source under an arbitrary distortion matrix, computed by alternating
// minimization over a sweep of Lagrange slopes.
#ifndef RDE_RD_HPP_
#define RDE_RD_HPP_

#include <cstddef>
#include <vector>

#include "rde/prob.hpp"

namespace rde {

struct BAConfig {
  double tolerance = 1e-9;     // stop when the rate changes less than this
  std::size_t max_iters = 50000;
  std::vector<double> slope_grid = default_slope_grid();

  // 0 plus a log-spaced sweep steep enough to pin the low-distortion end.
  static std::vector<double> default_slope_grid();
  void validate() const;
};

struct RDPoint {
  double rate = 0.0;        // bits per symbol
  double distortion = 0.0;
  double slope = 0.0;       // |R'(D)| in bits per distortion unit
  Channel channel;          // achieving p(xhat | x)
};

// One point on the lower convex envelope of the rate-distortion region, at
// a fixed Lagrange slope. slope = 0 returns the zero-rate endpoint
// (R = 0, D = d_max) directly. Throws ConvergenceError if the iteration
// cap is reached first.
RDPoint blahut_arimoto(const Pmf& p, const DistortionSpec& d, double slope,
                       const BAConfig& cfg = {});

// R(D) at a distortion target, by bisection over the slope.
RDPoint rd_point_at_distortion(const Pmf& p, const DistortionSpec& d,
                               double target_distortion,
                               const BAConfig& cfg = {});

// Sweep of the config's slope grid, sorted by distortion.
std::vector<RDPoint> rd_curve(const Pmf& p, const DistortionSpec& d,
                              const BAConfig& cfg = {});

// Smallest expected distortion achievable at zero rate: the best constant
// reconstruction.
double d_max(const Pmf& p, const DistortionSpec& d);

}  // namespace rde

#endif  // RDE_RD_HPP_
