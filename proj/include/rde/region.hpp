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
// The equivocation-distortion frontier Gamma(D) and the rate surface
// R(D, E) for a source with public and private attributes and optional
// side information at the user. A sanitizing description U is drawn from
// the attributes through a channel p(u | x_r, x_h); the user reconstructs
// with a deterministic decoder g(U, Z).
//
// All solver outputs are achievable points (inner bounds): every returned
// value is realized by the accompanying channel and decoder. Certification
// against the true optimum is done externally with the brute-force oracle
// at small sizes.
#ifndef RDE_REGION_HPP_
#define RDE_REGION_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rde/prob.hpp"

namespace rde {

// A joint source over attribute axes (roles public/private/both) plus
// optional side-information axes, a distortion matrix on (revealed
// product, reconstruction), and the cardinality of the description
// alphabet U. u_cardinality = 0 selects the default: the number of
// distinct attribute cells plus 2, a safe support-style bound.
struct PrivacyProblem {
  PrivacyProblem(JointPmf joint, DistortionSpec distortion,
                 std::size_t u_cardinality = 0);

  const JointPmf& joint() const { return joint_; }
  const DistortionSpec& distortion() const { return distortion_; }
  std::size_t u_cardinality() const { return u_cardinality_; }

  std::span<const std::size_t> attribute_axes() const { return attribute_axes_; }
  std::span<const std::size_t> revealed_axes() const { return revealed_axes_; }
  std::span<const std::size_t> private_axes() const { return private_axes_; }
  std::span<const std::size_t> side_info_axes() const { return side_info_axes_; }

  // H(X_h), H(X_h | Z), H(X_h | X_r Z): the feasibility landmarks.
  double private_entropy() const;
  double equivocation_ceiling() const;
  double equivocation_floor() const;

  // Largest useful distortion: the expected cost of the best constant
  // reconstruction chosen per side-information symbol. Beyond this the
  // distortion constraint is slack.
  double max_useful_distortion() const;

 private:
  JointPmf joint_;
  DistortionSpec distortion_;
  std::size_t u_cardinality_;
  std::vector<std::size_t> attribute_axes_;
  std::vector<std::size_t> revealed_axes_;
  std::vector<std::size_t> private_axes_;
  std::vector<std::size_t> side_info_axes_;
};

// Deterministic reconstruction map (u, z) -> xhat, stored u-major.
// Pairs of zero probability map to index 0.
struct Decoder {
  std::size_t n_u = 0;
  std::size_t n_z = 1;
  std::vector<std::uint32_t> map;

  std::uint32_t at(std::size_t u, std::size_t z) const { return map[u * n_z + z]; }
};

// An achievable (rate, distortion, equivocation) triple with its
// certificate: the channel p(u | attributes) and the decoder used.
struct RegionPoint {
  double rate = 0.0;
  double distortion = 0.0;
  double equivocation = 0.0;
  Channel channel;
  Decoder decoder;
};

struct SolverConfig {
  std::size_t multistarts = 32;
  double inner_tolerance = 1e-11;  // stop a stage when steps improve less
  std::size_t max_iters = 7000;    // gradient steps per start, all stages
  std::uint64_t rng_seed = 1;
  std::vector<double> penalty_weight_schedule = {
      4.0, 32.0, 256.0, 2048.0, 16384.0, 131072.0, 1048576.0};

  void validate() const;
};

// H(X_h | U, Z) induced by the channel; equals H(X_h | U) when the problem
// has no side-information axis. The channel input may be the product of
// all attribute axes or of the revealed axes only.
double equivocation(const PrivacyProblem& prob, const Channel& c);

// I(X_h X_r; U) - I(Z; U), the minimal description rate of the channel;
// non-negative, and equal to I(X_h X_r; U) when no side information is
// present.
double rate_objective(const PrivacyProblem& prob, const Channel& c);

// Minimum-expected-distortion reconstruction for each (u, z), ties broken
// toward the lowest reconstruction index.
Decoder optimal_decoder(const PrivacyProblem& prob, const Channel& c);

// Maximal equivocation subject to decoder distortion <= distortion.
// Distortion above max_useful_distortion() clamps to the unconstrained
// maximum H(X_h | Z). The returned equivocation is a certified achievable
// lower bound on the true frontier.
RegionPoint gamma_of_d(const PrivacyProblem& prob, double distortion,
                       const SolverConfig& cfg = {});

// Minimal rate subject to decoder distortion <= distortion and
// equivocation >= equivocation_floor. Throws InfeasibleError with the
// Gamma(D) estimate attached when the floor exceeds it. The returned rate
// is an achievable upper bound on the true surface.
RegionPoint r_of_de(const PrivacyProblem& prob, double distortion,
                    double equivocation_floor, const SolverConfig& cfg = {});

// Same contract as r_of_de with the channel restricted to condition on the
// revealed attributes only (X_h - X_r - U Markov chains).
RegionPoint r_of_de_markov(const PrivacyProblem& prob, double distortion,
                           double equivocation_floor,
                           const SolverConfig& cfg = {});

struct RegionCurveEntry {
  double target_distortion = 0.0;
  double target_equivocation = 0.0;
  bool on_gamma_boundary = false;
  RegionPoint point;
};

struct RegionCurve {
  std::vector<RegionCurveEntry> entries;
  std::vector<std::string> skipped;  // per-point failures, not fatal
};

// The (R, D, E) surface over the distortion grid crossed with the
// equivocation grid, plus the Gamma(D) boundary point for every D. For
// each distortion only equivocation targets up to Gamma(D) are emitted.
// Points inherit any better channel found at a dominating grid point
// (smaller D, larger E), so the reported surface is monotone.
RegionCurve region_curve(const PrivacyProblem& prob,
                         std::span<const double> d_grid,
                         std::span<const double> e_grid,
                         const SolverConfig& cfg = {});

}  // namespace rde

#endif  // RDE_REGION_HPP_
