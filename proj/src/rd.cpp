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
#include "rde/rd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rde {

namespace {

void check_compatible(const Pmf& p, const DistortionSpec& d) {
  if (p.size() != d.n_source()) {
    throw ValidationError("rd: source alphabet size does not match distortion matrix");
  }
}

std::size_t best_constant_reconstruction(const Pmf& p, const DistortionSpec& d) {
  std::size_t best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t xhat = 0; xhat < d.n_reconstruction(); ++xhat) {
    double cost = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) cost += p[x] * d.at(x, xhat);
    if (cost < best_cost) {
      best_cost = cost;
      best = xhat;
    }
  }
  return best;
}

}  // namespace

std::vector<double> BAConfig::default_slope_grid() {
  std::vector<double> grid = {0.0};
  for (double s = 0.125; s <= 40.0; s *= std::pow(2.0, 0.25)) grid.push_back(s);
  return grid;
}

void BAConfig::validate() const {
  if (!(tolerance > 0.0)) throw ValidationError("BAConfig: tolerance must be positive");
  if (max_iters < 1) throw ValidationError("BAConfig: max_iters must be at least 1");
  if (slope_grid.empty()) throw ValidationError("BAConfig: slope grid is empty");
  if (!std::is_sorted(slope_grid.begin(), slope_grid.end())) {
    throw ValidationError("BAConfig: slope grid must be sorted");
  }
  if (slope_grid.front() < 0.0) {
    throw ValidationError("BAConfig: slopes must be non-negative");
  }
}

double d_max(const Pmf& p, const DistortionSpec& d) {
  check_compatible(p, d);
  std::size_t xhat = best_constant_reconstruction(p, d);
  double cost = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) cost += p[x] * d.at(x, xhat);
  return cost;
}

RDPoint blahut_arimoto(const Pmf& p, const DistortionSpec& d, double slope,
                       const BAConfig& cfg) {
  check_compatible(p, d);
  cfg.validate();
  if (!(slope >= 0.0) || !std::isfinite(slope)) {
    throw ArgumentError("blahut_arimoto: slope must be finite and non-negative");
  }

  const std::size_t n_out = d.n_reconstruction();
  Alphabet out_alpha = d.n_reconstruction() == p.alphabet().size()
                           ? p.alphabet()
                           : Alphabet::indexed("xhat", n_out);

  if (slope == 0.0) {
    // Zero-rate endpoint: the best constant reconstruction.
    std::size_t xhat = best_constant_reconstruction(p, d);
    return RDPoint{0.0, d_max(p, d), 0.0,
                   Channel::constant(p.alphabet(), out_alpha, xhat)};
  }

  std::vector<std::size_t> active;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] > 0.0) active.push_back(x);
  }

  std::vector<double> q(n_out, 1.0 / double(n_out));
  std::vector<double> rows(active.size() * n_out, 0.0);
  std::vector<double> q_new(n_out);

  double rate = std::numeric_limits<double>::infinity();
  double distortion = 0.0;
  double residual = std::numeric_limits<double>::infinity();

  for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
    std::fill(q_new.begin(), q_new.end(), 0.0);
    for (std::size_t ai = 0; ai < active.size(); ++ai) {
      std::size_t x = active[ai];
      double* row = rows.data() + ai * n_out;
      double norm = 0.0;
      for (std::size_t u = 0; u < n_out; ++u) {
        row[u] = q[u] * std::exp2(-slope * d.at(x, u));
        norm += row[u];
      }
      if (norm <= 0.0) {
        // Every remaining output has underflowed; pin the row to the
        // distortion-minimizing reconstruction (the steep-slope limit).
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t u = 0; u < n_out; ++u) {
          if (d.at(x, u) < best_d) {
            best_d = d.at(x, u);
            best = u;
          }
        }
        std::fill(row, row + n_out, 0.0);
        row[best] = 1.0;
      } else {
        for (std::size_t u = 0; u < n_out; ++u) row[u] /= norm;
      }
      for (std::size_t u = 0; u < n_out; ++u) q_new[u] += p[x] * row[u];
    }

    double new_rate = 0.0;
    double new_distortion = 0.0;
    for (std::size_t ai = 0; ai < active.size(); ++ai) {
      std::size_t x = active[ai];
      const double* row = rows.data() + ai * n_out;
      for (std::size_t u = 0; u < n_out; ++u) {
        if (row[u] > 0.0) {
          new_rate += p[x] * row[u] * std::log2(row[u] / q_new[u]);
          new_distortion += p[x] * row[u] * d.at(x, u);
        }
      }
    }
    if (new_rate < 0.0) new_rate = 0.0;

    residual = std::abs(new_rate - rate);
    rate = new_rate;
    distortion = new_distortion;
    q = q_new;
    if (residual < cfg.tolerance) {
      std::vector<double> matrix(p.size() * n_out);
      for (std::size_t x = 0; x < p.size(); ++x) {
        // Rows of zero-probability symbols carry no mass; report the output
        // marginal there so the channel stays valid.
        for (std::size_t u = 0; u < n_out; ++u) matrix[x * n_out + u] = q[u];
      }
      for (std::size_t ai = 0; ai < active.size(); ++ai) {
        std::copy(rows.begin() + ai * n_out, rows.begin() + (ai + 1) * n_out,
                  matrix.begin() + active[ai] * n_out);
      }
      return RDPoint{rate, distortion, slope,
                     Channel(p.alphabet(), out_alpha, std::move(matrix))};
    }
  }

  std::ostringstream os;
  os << "blahut_arimoto: no convergence after " << cfg.max_iters
     << " iterations (slope " << slope << ", residual " << residual << ")";
  throw ConvergenceError(os.str(), rate, distortion, residual);
}

RDPoint rd_point_at_distortion(const Pmf& p, const DistortionSpec& d,
                               double target_distortion, const BAConfig& cfg) {
  check_compatible(p, d);
  cfg.validate();
  if (!(target_distortion >= 0.0)) {
    throw ArgumentError("rd_point_at_distortion: target must be non-negative");
  }
  double dm = d_max(p, d);
  if (target_distortion >= dm) return blahut_arimoto(p, d, 0.0, cfg);

  // D(slope) is non-increasing; bracket the target then bisect.
  double lo = 0.0;           // D(lo) = d_max >= target
  double hi = 1.0;
  RDPoint at_hi = blahut_arimoto(p, d, hi, cfg);
  std::size_t guard = 0;
  while (at_hi.distortion > target_distortion) {
    hi *= 2.0;
    if (++guard > 60) break;
    at_hi = blahut_arimoto(p, d, hi, cfg);
  }
  RDPoint best = at_hi;
  for (std::size_t iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    RDPoint pt = blahut_arimoto(p, d, mid, cfg);
    if (std::abs(pt.distortion - target_distortion) <
        std::abs(best.distortion - target_distortion)) {
      best = pt;
    }
    if (std::abs(pt.distortion - target_distortion) <= 1e-10) break;
    if (pt.distortion > target_distortion) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-13 * (1.0 + hi)) break;
  }
  return best;
}

std::vector<RDPoint> rd_curve(const Pmf& p, const DistortionSpec& d,
                              const BAConfig& cfg) {
  check_compatible(p, d);
  cfg.validate();
  std::vector<RDPoint> points;
  points.reserve(cfg.slope_grid.size());
  for (double s : cfg.slope_grid) points.push_back(blahut_arimoto(p, d, s, cfg));
  std::sort(points.begin(), points.end(), [](const RDPoint& a, const RDPoint& b) {
    return a.distortion < b.distortion;
  });
  // Drop near-duplicate distortions, keeping the lower rate.
  std::vector<RDPoint> out;
  for (auto& pt : points) {
    if (!out.empty() && std::abs(out.back().distortion - pt.distortion) < 1e-12) {
      if (pt.rate < out.back().rate) out.back() = std::move(pt);
    } else {
      out.push_back(std::move(pt));
    }
  }
  return out;
}

}  // namespace rde
