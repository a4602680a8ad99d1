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
#include "rde/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rde {

namespace {

constexpr double kSupportEps = 1e-12;

// Water-level consistency residual (1 - D) - lambda - sum((p - lambda)+).
// Non-decreasing in lambda, negative at 0 for D > 0.
double residual(const Pmf& p, double distortion, double lambda) {
  double clipped = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    clipped += std::max(p[x] - lambda, 0.0);
  }
  return (1.0 - distortion) - lambda - clipped;
}

std::vector<std::size_t> support_at(const Pmf& p, double lambda) {
  std::vector<std::size_t> s;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] - lambda > kSupportEps) s.push_back(x);
  }
  return s;
}

}  // namespace

WaterfillSolution hamming_waterfill(const Pmf& p, double distortion) {
  const std::size_t m = p.size();
  double p_max = *std::max_element(p.probs().begin(), p.probs().end());
  double dm = 1.0 - p_max;
  if (!(distortion >= 0.0) || distortion > dm + 1e-12) {
    std::ostringstream os;
    os << "hamming_waterfill: distortion " << distortion
       << " outside [0, " << dm << "]";
    throw ArgumentError(os.str());
  }
  distortion = std::min(distortion, dm);

  // Locate the water level by bisection, then snap it to the exact
  // algebraic value for the support it selects.
  double lambda = 0.0;
  if (distortion > 0.0) {
    double lo = 0.0, hi = p_max;
    for (int iter = 0; iter < 200; ++iter) {
      double mid = 0.5 * (lo + hi);
      if (residual(p, distortion, mid) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
      if (hi - lo < 1e-15) break;
    }
    lambda = 0.5 * (lo + hi);
    for (std::size_t pass = 0; pass < m; ++pass) {
      std::vector<std::size_t> s = support_at(p, lambda);
      if (s.size() < 2) break;
      double p_s = 0.0;
      for (std::size_t x : s) p_s += p[x];
      double snapped = (p_s - 1.0 + distortion) / double(s.size() - 1);
      if (std::abs(snapped - lambda) < 1e-15) {
        lambda = snapped;
        break;
      }
      lambda = snapped;
    }
  }

  std::vector<std::size_t> support = support_at(p, lambda);
  if (support.empty()) {
    // Degenerate corner (e.g. a uniform source at D = d_max): collapse to
    // the lowest-index most-likely symbol.
    std::size_t argmax = 0;
    for (std::size_t x = 1; x < m; ++x) {
      if (p[x] > p[argmax]) argmax = x;
    }
    support = {argmax};
  }

  const double d_bar = 1.0 - distortion;

  std::vector<double> mass(m, 0.0);
  double norm = 0.0;
  for (std::size_t x : support) {
    mass[x] = p[x] - lambda;
    norm += mass[x];
  }
  if (support.size() == 1) {
    mass[support[0]] = 1.0;
    norm = 1.0;
  }
  for (double& v : mass) v /= norm;
  Pmf p_xhat(p.alphabet(), std::move(mass));

  std::vector<bool> in_support(m, false);
  for (std::size_t x : support) in_support[x] = true;

  std::vector<double> matrix(m * m, 0.0);
  for (std::size_t xhat = 0; xhat < m; ++xhat) {
    double* row = matrix.data() + xhat * m;
    if (!in_support[xhat]) {
      // Zero reconstruction mass; pad with the source law.
      std::copy(p.probs().begin(), p.probs().end(), row);
      continue;
    }
    double sum = 0.0;
    for (std::size_t x = 0; x < m; ++x) {
      if (x == xhat) {
        row[x] = d_bar;
      } else if (in_support[x]) {
        row[x] = lambda;
      } else {
        row[x] = p[x];
      }
      sum += row[x];
    }
    // The row sums to 1 algebraically; absorb roundoff into the diagonal.
    row[xhat] += 1.0 - sum;
  }
  Channel test_channel(p.alphabet(), p.alphabet(), std::move(matrix));

  double gamma_exact = 0.0;
  double achieved = 0.0;
  for (std::size_t xhat = 0; xhat < m; ++xhat) {
    double w = p_xhat[xhat];
    if (w == 0.0) continue;
    gamma_exact += w * shannon_entropy(test_channel.row(xhat));
    achieved += w * (1.0 - test_channel.at(xhat, xhat));
  }

  double gamma_formula = -xlog2x(d_bar) - double(support.size()) * xlog2x(lambda);
  for (std::size_t x = 0; x < m; ++x) {
    if (!in_support[x]) gamma_formula -= xlog2x(p[x]);
  }

  WaterfillSolution sol{lambda,
                        d_bar,
                        std::move(support),
                        std::move(p_xhat),
                        std::move(test_channel),
                        gamma_exact,
                        gamma_formula,
                        entropy(p) - gamma_exact,
                        achieved};
  return sol;
}

std::vector<GammaCurvePoint> hamming_gamma_curve(const Pmf& p,
                                                 std::span<const double> d_grid) {
  std::vector<GammaCurvePoint> out;
  out.reserve(d_grid.size());
  for (double d : d_grid) {
    WaterfillSolution sol = hamming_waterfill(p, d);
    out.push_back({d, sol.gamma_exact_bits, sol.gamma_formula_bits});
  }
  return out;
}

void GaussianModel::validate() const {
  if (!(sigma_x2 > 0.0) || !(sigma_y2 > 0.0)) {
    throw ValidationError("GaussianModel: variances must be positive");
  }
  if (!(std::abs(rho) <= 1.0)) {
    throw ValidationError("GaussianModel: |rho| must not exceed 1");
  }
}

GaussianGamma gaussian_gamma(const GaussianModel& m, double distortion) {
  m.validate();
  if (!(distortion >= 0.0) || distortion > m.sigma_x2 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "gaussian_gamma: distortion " << distortion << " outside [0, "
       << m.sigma_x2 << "]";
    throw ArgumentError(os.str());
  }
  double r2 = m.rho * m.rho;
  double variance = m.sigma_y2 * ((1.0 - r2) + r2 * distortion / m.sigma_x2);
  // log2(0) = -inf is the honest value for the deterministic corner.
  double entropy_bits =
      0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e * variance);
  return GaussianGamma{variance, entropy_bits};
}

std::vector<GaussianCurvePoint> gaussian_region(const GaussianModel& m,
                                                std::span<const double> d_grid) {
  std::vector<GaussianCurvePoint> out;
  out.reserve(d_grid.size());
  for (double d : d_grid) {
    GaussianGamma g = gaussian_gamma(m, d);
    out.push_back({d, g.variance_form, g.entropy_form_bits});
  }
  return out;
}

}  // namespace rde
