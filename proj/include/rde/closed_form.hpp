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
// Exact solutions for two canonical sources: a categorical source under
// Hamming distortion, solved by reverse (upside-down) waterfilling, and a
// bivariate Gaussian source with one attribute revealed.
#ifndef RDE_CLOSED_FORM_HPP_
#define RDE_CLOSED_FORM_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "rde/prob.hpp"

namespace rde {

// Reverse-waterfilling solution at one distortion level.
//
// The test channel is stored with reconstruction symbols as rows, so
// test_channel.row(xhat) is the conditional p(x | xhat): d_bar on the
// diagonal, lambda on off-diagonal support entries, and the source
// probability itself on symbols outside the support. Rows for zero-mass
// reconstructions (xhat outside the support) are padded with the source
// distribution and carry no weight.
//
// gamma_formula_bits evaluates the closed-form expression
//   -d_bar*log2(d_bar) - |support|*lambda*log2(lambda)
//   - sum over out-of-support k of p_k*log2(p_k),
// which counts |support| lambda terms per reconstruction column. The
// realized test channel has |support|-1 off-diagonal lambda entries per
// column, so whenever lambda > 0 this expression exceeds the channel's
// actual H(X | Xhat) by exactly one lambda*log2(lambda) term. Both values
// are reported; gamma_exact_bits is the one consistent with the channel.
struct WaterfillSolution {
  double lambda = 0.0;           // water level
  double d_bar = 0.0;            // 1 - D, the test-channel diagonal
  std::vector<std::size_t> support;
  Pmf p_xhat;                    // reconstruction marginal, zero off support
  Channel test_channel;          // p(x | xhat), rows indexed by xhat
  double gamma_exact_bits = 0.0;    // H(X | Xhat) of the test channel
  double gamma_formula_bits = 0.0;  // literal closed-form expression
  double implied_rate_bits = 0.0;   // I(X; Xhat) = H(X) - gamma_exact_bits
  double distortion = 0.0;          // achieved expected Hamming distortion
};

// Maximal equivocation H(X | Xhat) at Hamming distortion `distortion`,
// with the achieving output distribution and test channel.
// Requires 0 <= distortion <= d_max = 1 - max p(x).
WaterfillSolution hamming_waterfill(const Pmf& p, double distortion);

struct GammaCurvePoint {
  double distortion;
  double gamma_exact_bits;
  double gamma_formula_bits;
};

std::vector<GammaCurvePoint> hamming_gamma_curve(const Pmf& p,
                                                 std::span<const double> d_grid);

// Zero-mean bivariate Gaussian: X revealed, Y hidden.
struct GaussianModel {
  double sigma_x2;  // Var(X) > 0
  double sigma_y2;  // Var(Y) > 0
  double rho;       // correlation coefficient, |rho| <= 1

  void validate() const;
};

// The maximal-equivocation curve has two readings and both are reported:
// variance_form is the conditional variance sigma_y2*((1-rho^2) +
// rho^2*D/sigma_x2) (units: variance), entropy_form_bits is its
// differential-entropy reading 0.5*log2(2*pi*e*variance_form) (units:
// bits). Neither is substituted for the other. The optimum is realized by
// a reverse channel from Xhat to X that is additive Gaussian with
// variance D.
struct GaussianGamma {
  double variance_form;
  double entropy_form_bits;
};

// Requires 0 <= distortion <= sigma_x2.
GaussianGamma gaussian_gamma(const GaussianModel& m, double distortion);

struct GaussianCurvePoint {
  double distortion;
  double variance_form;
  double entropy_form_bits;
};

std::vector<GaussianCurvePoint> gaussian_region(const GaussianModel& m,
                                                std::span<const double> d_grid);

}  // namespace rde

#endif  // RDE_CLOSED_FORM_HPP_
