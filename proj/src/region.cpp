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
#include "rde/region.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

namespace rde {

namespace {

constexpr double kFeasSlack = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_log2(double x) { return std::log2(std::max(x, 1e-300)); }

// Problem flattened against a fixed encoder scope and description size.
struct Compiled {
  std::size_t n_cells = 0;
  std::size_t n_enc = 0;
  std::size_t n_u = 0;
  std::size_t n_z = 1;
  std::size_t n_h = 0;
  std::size_t n_r = 0;
  std::size_t n_xhat = 0;

  std::vector<double> p;            // cell mass
  std::vector<std::uint32_t> enc;   // composite indices per cell
  std::vector<std::uint32_t> h;
  std::vector<std::uint32_t> r;
  std::vector<std::uint32_t> zf;

  std::vector<double> p_enc;        // [enc]
  std::vector<double> p_enc_z;      // [enc][z]
  std::vector<double> p_z;          // [z]
  std::vector<std::uint32_t> r_of_enc;
  double h_z = 0.0;

  const DistortionSpec* dist = nullptr;
  Alphabet in_alphabet{std::vector<std::string>{"_"}};
  Alphabet u_alphabet{std::vector<std::string>{"_"}};
};

std::size_t composite(const JointPmf& j, std::span<const std::size_t> axes,
                      std::span<const std::size_t> idx) {
  std::size_t c = 0;
  for (std::size_t a : axes) c = c * j.axis(a).alphabet.size() + idx[a];
  return c;
}

std::size_t product_size(const JointPmf& j, std::span<const std::size_t> axes) {
  std::size_t n = 1;
  for (std::size_t a : axes) n *= j.axis(a).alphabet.size();
  return n;
}

Compiled compile(const PrivacyProblem& prob, EncoderScope scope,
                 std::size_t n_u) {
  const JointPmf& j = prob.joint();
  std::span<const std::size_t> enc_axes = scope == EncoderScope::kAttributes
                                              ? prob.attribute_axes()
                                              : prob.revealed_axes();
  Compiled c;
  c.n_cells = j.cell_count();
  c.n_enc = product_size(j, enc_axes);
  c.n_u = n_u;
  c.n_z = prob.side_info_axes().empty() ? 1 : product_size(j, prob.side_info_axes());
  c.n_h = product_size(j, prob.private_axes());
  c.n_r = product_size(j, prob.revealed_axes());
  c.n_xhat = prob.distortion().n_reconstruction();
  c.dist = &prob.distortion();
  c.in_alphabet = product_alphabet(j, enc_axes);
  c.u_alphabet = Alphabet::indexed("u", n_u);

  c.p = j.probs();
  c.enc.resize(c.n_cells);
  c.h.resize(c.n_cells);
  c.r.resize(c.n_cells);
  c.zf.resize(c.n_cells);
  c.p_enc.assign(c.n_enc, 0.0);
  c.p_enc_z.assign(c.n_enc * c.n_z, 0.0);
  c.p_z.assign(c.n_z, 0.0);
  c.r_of_enc.assign(c.n_enc, 0);

  std::vector<std::size_t> idx(j.rank());
  for (std::size_t flat = 0; flat < c.n_cells; ++flat) {
    j.unflatten(flat, idx);
    c.enc[flat] = std::uint32_t(composite(j, enc_axes, idx));
    c.h[flat] = std::uint32_t(composite(j, prob.private_axes(), idx));
    c.r[flat] = std::uint32_t(composite(j, prob.revealed_axes(), idx));
    c.zf[flat] = prob.side_info_axes().empty()
                     ? 0
                     : std::uint32_t(composite(j, prob.side_info_axes(), idx));
    c.p_enc[c.enc[flat]] += c.p[flat];
    c.p_enc_z[c.enc[flat] * c.n_z + c.zf[flat]] += c.p[flat];
    c.p_z[c.zf[flat]] += c.p[flat];
    c.r_of_enc[c.enc[flat]] = c.r[flat];
  }
  c.h_z = shannon_entropy(c.p_z);
  return c;
}

// Channel statistics and gradients; owns the scratch buffers so a Compiled
// instance stays immutable and shareable.
struct Eval {
  const Compiled* cp;
  std::vector<double> juz;    // p(u, z)
  std::vector<double> jhzu;   // p(u, z, h), (u*n_z + z)*n_h + h
  std::vector<double> wruz;   // p(u, z, r), (u*n_z + z)*n_r + r

  explicit Eval(const Compiled& c)
      : cp(&c),
        juz(c.n_u * c.n_z),
        jhzu(c.n_u * c.n_z * c.n_h),
        wruz(c.n_u * c.n_z * c.n_r) {}

  void accumulate(std::span<const double> chan) {
    const Compiled& c = *cp;
    std::fill(juz.begin(), juz.end(), 0.0);
    std::fill(jhzu.begin(), jhzu.end(), 0.0);
    std::fill(wruz.begin(), wruz.end(), 0.0);
    for (std::size_t cell = 0; cell < c.n_cells; ++cell) {
      double pc = c.p[cell];
      if (pc == 0.0) continue;
      const double* row = chan.data() + std::size_t(c.enc[cell]) * c.n_u;
      std::size_t z = c.zf[cell];
      std::size_t hh = c.h[cell];
      std::size_t rr = c.r[cell];
      for (std::size_t u = 0; u < c.n_u; ++u) {
        double w = pc * row[u];
        std::size_t uz = u * c.n_z + z;
        juz[uz] += w;
        jhzu[uz * c.n_h + hh] += w;
        wruz[uz * c.n_r + rr] += w;
      }
    }
  }

  double equivocation() const {
    double hzu = 0.0;   // H(U, Z)
    double hhzu = 0.0;  // H(X_h, U, Z)
    for (double v : juz) hzu -= xlog2x(v);
    for (double v : jhzu) hhzu -= xlog2x(v);
    double e = hhzu - hzu;
    return e < 0.0 ? 0.0 : e;
  }

  double rate(std::span<const double> chan) const {
    const Compiled& c = *cp;
    double hzu = 0.0;
    for (double v : juz) hzu -= xlog2x(v);
    double row_ent = 0.0;
    for (std::size_t e = 0; e < c.n_enc; ++e) {
      if (c.p_enc[e] == 0.0) continue;
      double he = 0.0;
      const double* row = chan.data() + e * c.n_u;
      for (std::size_t u = 0; u < c.n_u; ++u) he -= xlog2x(row[u]);
      row_ent += c.p_enc[e] * he;
    }
    double rate = hzu - c.h_z - row_ent;
    return rate < 0.0 ? 0.0 : rate;
  }

  void decoder(std::vector<std::uint32_t>& g) const {
    const Compiled& c = *cp;
    g.assign(c.n_u * c.n_z, 0);
    for (std::size_t uz = 0; uz < c.n_u * c.n_z; ++uz) {
      const double* w = wruz.data() + uz * c.n_r;
      double mass = 0.0;
      for (std::size_t rr = 0; rr < c.n_r; ++rr) mass += w[rr];
      if (mass <= 0.0) continue;  // dead pair, index 0 by convention
      double best_cost = kInf;
      std::uint32_t best = 0;
      for (std::size_t xh = 0; xh < c.n_xhat; ++xh) {
        double cost = 0.0;
        for (std::size_t rr = 0; rr < c.n_r; ++rr) {
          cost += w[rr] * c.dist->at(rr, xh);
        }
        if (cost < best_cost) {
          best_cost = cost;
          best = std::uint32_t(xh);
        }
      }
      g[uz] = best;
    }
  }

  double distortion(std::span<const std::uint32_t> g) const {
    const Compiled& c = *cp;
    double total = 0.0;
    for (std::size_t uz = 0; uz < c.n_u * c.n_z; ++uz) {
      const double* w = wruz.data() + uz * c.n_r;
      for (std::size_t rr = 0; rr < c.n_r; ++rr) {
        total += w[rr] * c.dist->at(rr, g[uz]);
      }
    }
    return total;
  }

  // d H(X_h | U Z) / d c(u | e), accumulated into out (n_enc * n_u).
  void grad_equivocation(std::vector<double>& out) const {
    const Compiled& c = *cp;
    out.assign(c.n_enc * c.n_u, 0.0);
    for (std::size_t cell = 0; cell < c.n_cells; ++cell) {
      double pc = c.p[cell];
      if (pc == 0.0) continue;
      std::size_t z = c.zf[cell];
      std::size_t hh = c.h[cell];
      double* g = out.data() + std::size_t(c.enc[cell]) * c.n_u;
      for (std::size_t u = 0; u < c.n_u; ++u) {
        std::size_t uz = u * c.n_z + z;
        g[u] += pc * (safe_log2(juz[uz]) - safe_log2(jhzu[uz * c.n_h + hh]));
      }
    }
  }

  // d rate / d c(u | e).
  void grad_rate(std::span<const double> chan, std::vector<double>& out) const {
    const Compiled& c = *cp;
    out.assign(c.n_enc * c.n_u, 0.0);
    for (std::size_t e = 0; e < c.n_enc; ++e) {
      if (c.p_enc[e] == 0.0) continue;
      const double* row = chan.data() + e * c.n_u;
      double* g = out.data() + e * c.n_u;
      for (std::size_t u = 0; u < c.n_u; ++u) {
        double v = c.p_enc[e] * safe_log2(row[u]);
        for (std::size_t z = 0; z < c.n_z; ++z) {
          double pez = c.p_enc_z[e * c.n_z + z];
          if (pez > 0.0) v -= pez * safe_log2(juz[u * c.n_z + z]);
        }
        g[u] = v;
      }
    }
  }

  // d distortion / d c(u | e) for a fixed decoder.
  void grad_distortion(std::span<const std::uint32_t> g,
                       std::vector<double>& out) const {
    const Compiled& c = *cp;
    out.assign(c.n_enc * c.n_u, 0.0);
    for (std::size_t cell = 0; cell < c.n_cells; ++cell) {
      double pc = c.p[cell];
      if (pc == 0.0) continue;
      std::size_t z = c.zf[cell];
      std::size_t rr = c.r[cell];
      double* gd = out.data() + std::size_t(c.enc[cell]) * c.n_u;
      for (std::size_t u = 0; u < c.n_u; ++u) {
        gd[u] += pc * c.dist->at(rr, g[u * c.n_z + z]);
      }
    }
  }
};

void project_row_simplex(double* v, std::size_t n, std::vector<double>& scratch) {
  scratch.assign(v, v + n);
  std::sort(scratch.begin(), scratch.end(), std::greater<>());
  double cum = 0.0;
  double theta = scratch[0] - 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    cum += scratch[i];
    double t = (cum - 1.0) / double(i + 1);
    if (scratch[i] - t > 0.0) theta = t;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = std::max(v[i] - theta, 0.0);
    sum += v[i];
  }
  for (std::size_t i = 0; i < n; ++i) v[i] /= sum;
}

enum class Objective { kMaxEquivocation, kMinRate };

struct Stats {
  double equiv = 0.0;
  double rate = 0.0;
  double distortion = 0.0;
  std::vector<std::uint32_t> decoder;
};

struct Candidate {
  bool valid = false;
  std::vector<double> chan;
  Stats stats;
};

class Solver {
 public:
  Solver(const Compiled& cp, Objective obj, double d_cap, double e_floor,
         const SolverConfig& cfg)
      : cp_(cp), ev_(cp), obj_(obj), d_cap_(d_cap), e_floor_(e_floor), cfg_(cfg) {}

  // Every evaluation funnels through here, so any feasible channel the
  // search ever touches is a candidate for the returned optimum.
  Stats stats_of(std::span<const double> chan) {
    ev_.accumulate(chan);
    Stats s;
    ev_.decoder(s.decoder);
    s.distortion = ev_.distortion(s.decoder);
    s.equiv = ev_.equivocation();
    s.rate = ev_.rate(chan);
    if (feasible(s) && (!best_.valid || merit(s) > merit(best_.stats))) {
      best_.valid = true;
      best_.chan.assign(chan.begin(), chan.end());
      best_.stats = s;
    }
    return s;
  }

  bool feasible(const Stats& s) const {
    if (s.distortion > d_cap_ + kFeasSlack) return false;
    if (obj_ == Objective::kMinRate && s.equiv < e_floor_ - kFeasSlack) return false;
    return true;
  }

  double merit(const Stats& s) const {
    return obj_ == Objective::kMaxEquivocation ? s.equiv : -s.rate;
  }

  void consider(const std::vector<double>& chan) { stats_of(chan); }

  // Penalized surrogate maximized by the gradient loop.
  double penalized(const Stats& s, double w) const {
    double viol_d = std::max(0.0, s.distortion - d_cap_);
    if (obj_ == Objective::kMaxEquivocation) {
      return s.equiv - w * viol_d * viol_d;
    }
    double viol_e = std::max(0.0, e_floor_ - s.equiv);
    return -(s.rate + w * viol_d * viol_d + w * viol_e * viol_e);
  }

  void run_start(std::vector<double> chan) {
    const std::size_t dim = cp_.n_enc * cp_.n_u;
    const std::size_t stages = cfg_.penalty_weight_schedule.size();
    const std::size_t iters_per_stage = std::max<std::size_t>(1, cfg_.max_iters / stages);
    std::vector<double> grad(dim), gd(dim), geq(dim), trial(dim), scratch;

    Stats s = stats_of(chan);

    for (std::size_t stage = 0; stage < stages; ++stage) {
      double w = cfg_.penalty_weight_schedule[stage];
      double phi = penalized(s, w);
      double eta = 0.05;  // fresh step scale: the surrogate just changed
      // Interior floor, relaxed stage by stage. Exact zeros kill the
      // gradient signal for reopening an unused description symbol.
      double floor_mix = std::pow(10.0, -2.0 - double(stage));
      std::size_t stall = 0;
      for (std::size_t it = 0; it < iters_per_stage; ++it) {
        // Supergradient of the penalized surrogate at the current decoder.
        double viol_d = std::max(0.0, s.distortion - d_cap_);
        if (obj_ == Objective::kMaxEquivocation) {
          ev_.accumulate(chan);
          ev_.grad_equivocation(grad);
          if (viol_d > 0.0) {
            ev_.grad_distortion(s.decoder, gd);
            for (std::size_t i = 0; i < dim; ++i) grad[i] -= 2.0 * w * viol_d * gd[i];
          }
        } else {
          ev_.accumulate(chan);
          ev_.grad_rate(chan, grad);
          for (double& v : grad) v = -v;
          if (viol_d > 0.0) {
            ev_.grad_distortion(s.decoder, gd);
            for (std::size_t i = 0; i < dim; ++i) grad[i] -= 2.0 * w * viol_d * gd[i];
          }
          double viol_e = std::max(0.0, e_floor_ - s.equiv);
          if (viol_e > 0.0) {
            ev_.grad_equivocation(geq);
            for (std::size_t i = 0; i < dim; ++i) grad[i] += 2.0 * w * viol_e * geq[i];
          }
        }

        bool accepted = false;
        for (int bt = 0; bt < 10 && !accepted; ++bt) {
          for (std::size_t i = 0; i < dim; ++i) trial[i] = chan[i] + eta * grad[i];
          for (std::size_t e = 0; e < cp_.n_enc; ++e) {
            project_row_simplex(trial.data() + e * cp_.n_u, cp_.n_u, scratch);
          }
          double mix = floor_mix / double(cp_.n_u);
          for (double& v : trial) v = (1.0 - floor_mix) * v + mix;
          Stats st = stats_of(trial);
          double phi_t = penalized(st, w);
          if (phi_t > phi + 1e-15) {
            chan.swap(trial);
            s = std::move(st);
            phi = phi_t;
            eta = std::min(eta * 1.3, 10.0);
            accepted = true;
          } else {
            eta *= 0.5;
          }
        }
        if (!accepted) {
          if (++stall >= 6 || eta < 1e-14) break;
        } else {
          stall = 0;
        }
      }
      // Re-evaluate the surrogate under the next weight.
      s = stats_of(chan);
    }
    last_iterate_ = std::move(chan);
  }

  // Blend a (possibly slightly infeasible) iterate toward a feasible anchor
  // until the constraints hold, then record it.
  void polish(const std::vector<double>& iterate,
              const std::vector<double>& anchor) {
    Stats si = stats_of(iterate);
    if (feasible(si)) return;
    double lo = 0.0, hi = 1.0;
    std::vector<double> blend(iterate.size());
    for (int it = 0; it < 40; ++it) {
      double mid = 0.5 * (lo + hi);
      for (std::size_t i = 0; i < blend.size(); ++i) {
        blend[i] = (1.0 - mid) * iterate[i] + mid * anchor[i];
      }
      Stats sb = stats_of(blend);
      if (feasible(sb)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
  }

  // Monotone ascent on the true objective over the feasible set: step along
  // the merit gradient, repair constraint violations by blending toward the
  // feasible anchor, accept only feasible improvements. This slides along
  // the active constraint where penalty surrogates zigzag.
  void refine(const std::vector<double>& anchor, std::size_t iters) {
    if (!best_.valid) return;
    const std::size_t dim = cp_.n_enc * cp_.n_u;
    std::vector<double> chan = best_.chan;
    std::vector<double> grad(dim), gd(dim), trial(dim), scratch;
    double eta = 0.01;
    double current = merit(best_.stats);
    for (std::size_t it = 0; it < iters; ++it) {
      ev_.accumulate(chan);
      if (obj_ == Objective::kMaxEquivocation) {
        ev_.grad_equivocation(grad);
      } else {
        ev_.grad_rate(chan, grad);
        for (double& v : grad) v = -v;
      }
      bool accepted = false;
      for (int bt = 0; bt < 8 && !accepted; ++bt) {
        for (std::size_t i = 0; i < dim; ++i) trial[i] = chan[i] + eta * grad[i];
        for (std::size_t e = 0; e < cp_.n_enc; ++e) {
          project_row_simplex(trial.data() + e * cp_.n_u, cp_.n_u, scratch);
        }
        Stats st = stats_of(trial);
        if (!feasible(st)) {
          // Pull back toward the anchor until the constraints hold.
          double lo = 0.0, hi = 1.0;
          std::vector<double> blend(dim);
          for (int rep = 0; rep < 30; ++rep) {
            double mid = 0.5 * (lo + hi);
            for (std::size_t i = 0; i < dim; ++i) {
              blend[i] = (1.0 - mid) * trial[i] + mid * anchor[i];
            }
            Stats sb = stats_of(blend);
            if (feasible(sb)) {
              hi = mid;
              st = std::move(sb);
            } else {
              lo = mid;
            }
          }
          for (std::size_t i = 0; i < dim; ++i) {
            trial[i] = (1.0 - hi) * trial[i] + hi * anchor[i];
          }
          st = stats_of(trial);
          if (!feasible(st)) break;
        }
        if (merit(st) > current + 1e-13) {
          chan.swap(trial);
          current = merit(st);
          eta = std::min(eta * 1.4, 1.0);
          accepted = true;
        } else {
          eta *= 0.4;
        }
      }
      if (!accepted && eta < 1e-13) break;
    }
  }

  // Exact treatment of the distortion constraint for the equivocation
  // objective. For a fixed decoder g the map c -> H(X_h|UZ) - s * G_g(c)
  // is concave (entropy of a linear image minus a linear form), so
  // projected gradient ascent finds its global maximum; bisection on s
  // then pins G_g = D, and decoder updates repeat until stable. Every
  // solve lands on a feasible point recorded through stats_of.
  void dual_refine(std::size_t inner_iters = 300) {
    if (!best_.valid || obj_ != Objective::kMaxEquivocation) return;
    const std::size_t dim = cp_.n_enc * cp_.n_u;
    std::vector<double> chan = best_.chan;
    std::vector<double> grad(dim), gd(dim), trial(dim), scratch;
    std::vector<std::uint32_t> g = best_.stats.decoder;

    auto solve_at = [&](double s, std::vector<double>& c) {
      double eta = 0.05;
      ev_.accumulate(c);
      ev_.grad_equivocation(grad);
      ev_.grad_distortion(g, gd);
      double dist = ev_.distortion(g);
      double equiv = ev_.equivocation();
      double phi = equiv - s * dist;
      for (std::size_t it = 0; it < inner_iters; ++it) {
        bool accepted = false;
        for (int bt = 0; bt < 8 && !accepted; ++bt) {
          for (std::size_t i = 0; i < dim; ++i) {
            trial[i] = c[i] + eta * (grad[i] - s * gd[i]);
          }
          for (std::size_t e = 0; e < cp_.n_enc; ++e) {
            project_row_simplex(trial.data() + e * cp_.n_u, cp_.n_u, scratch);
          }
          ev_.accumulate(trial);
          double d_t = ev_.distortion(g);
          double e_t = ev_.equivocation();
          double phi_t = e_t - s * d_t;
          if (phi_t > phi + 1e-15) {
            c.swap(trial);
            phi = phi_t;
            dist = d_t;
            eta = std::min(eta * 1.3, 10.0);
            accepted = true;
            ev_.accumulate(c);
            ev_.grad_equivocation(grad);
          } else {
            eta *= 0.5;
          }
        }
        if (!accepted && eta < 1e-14) break;
      }
      return dist;
    };

    for (int round = 0; round < 6; ++round) {
      // Bracket the multiplier so the fixed-decoder distortion meets the cap.
      std::vector<double> c = chan;
      double dist0 = solve_at(0.0, c);
      if (dist0 <= d_cap_ + kFeasSlack) {
        stats_of(c);
        chan = c;
      } else {
        double s_hi = 1.0;
        std::vector<double> c_hi = chan;
        double d_hi = solve_at(s_hi, c_hi);
        int guard = 0;
        while (d_hi > d_cap_ && ++guard < 24) {
          s_hi *= 4.0;
          d_hi = solve_at(s_hi, c_hi);
        }
        if (d_hi > d_cap_) return;
        double s_lo = 0.0;
        std::vector<double> c_mid = c_hi;
        for (int it = 0; it < 40; ++it) {
          double s_mid = 0.5 * (s_lo + s_hi);
          double d_mid = solve_at(s_mid, c_mid);
          if (d_mid <= d_cap_) {
            s_hi = s_mid;
            stats_of(c_mid);
          } else {
            s_lo = s_mid;
          }
        }
        chan = c_mid;
      }
      Stats st = stats_of(chan);
      if (st.decoder == g) break;
      g = st.decoder;
    }
  }

  const Candidate& best() const { return best_; }
  const std::vector<double>& last_iterate() const { return last_iterate_; }

 private:
  const Compiled& cp_;
  Eval ev_;
  Objective obj_;
  double d_cap_;
  double e_floor_;
  const SolverConfig& cfg_;
  Candidate best_;
  std::vector<double> last_iterate_;
};

std::vector<double> constant_channel_flat(const Compiled& cp) {
  std::vector<double> chan(cp.n_enc * cp.n_u, 0.0);
  for (std::size_t e = 0; e < cp.n_enc; ++e) chan[e * cp.n_u] = 1.0;
  return chan;
}

std::vector<double> identity_channel_flat(const Compiled& cp) {
  std::vector<double> chan(cp.n_enc * cp.n_u, 0.0);
  for (std::size_t e = 0; e < cp.n_enc; ++e) {
    chan[e * cp.n_u + (e % cp.n_u)] = 1.0;
  }
  return chan;
}

std::vector<double> revealed_identity_channel_flat(const Compiled& cp) {
  std::vector<double> chan(cp.n_enc * cp.n_u, 0.0);
  for (std::size_t e = 0; e < cp.n_enc; ++e) {
    chan[e * cp.n_u + (cp.r_of_enc[e] % cp.n_u)] = 1.0;
  }
  return chan;
}

std::vector<double> random_channel_flat(const Compiled& cp, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    return (double(rng() >> 11) + 0.5) * 0x1p-53;
  };
  std::vector<double> chan(cp.n_enc * cp.n_u);
  for (std::size_t e = 0; e < cp.n_enc; ++e) {
    double sum = 0.0;
    for (std::size_t u = 0; u < cp.n_u; ++u) {
      double v = -std::log(uniform());
      chan[e * cp.n_u + u] = v;
      sum += v;
    }
    for (std::size_t u = 0; u < cp.n_u; ++u) chan[e * cp.n_u + u] /= sum;
  }
  return chan;
}

RegionPoint finalize(const Compiled& cp, const Candidate& cand) {
  std::vector<double> chan = cand.chan;
  for (std::size_t e = 0; e < cp.n_enc; ++e) {
    if (cp.p_enc[e] == 0.0) {
      // Rows of impossible inputs carry no information; report them uniform.
      std::fill(chan.begin() + e * cp.n_u, chan.begin() + (e + 1) * cp.n_u,
                1.0 / double(cp.n_u));
    }
  }
  RegionPoint pt;
  pt.rate = cand.stats.rate;
  pt.distortion = cand.stats.distortion;
  pt.equivocation = cand.stats.equiv;
  pt.channel = Channel(cp.in_alphabet, cp.u_alphabet, std::move(chan));
  pt.decoder = Decoder{cp.n_u, cp.n_z, cand.stats.decoder};
  return pt;
}

// Lift a revealed-scope channel into the attribute scope.
std::vector<double> lift_to_attributes(const Compiled& attr_cp,
                                       const Compiled& rev_cp,
                                       std::span<const double> chan_rev) {
  std::vector<double> chan(attr_cp.n_enc * attr_cp.n_u);
  for (std::size_t e = 0; e < attr_cp.n_enc; ++e) {
    std::size_t rr = attr_cp.r_of_enc[e];
    std::copy(chan_rev.begin() + rr * rev_cp.n_u,
              chan_rev.begin() + (rr + 1) * rev_cp.n_u,
              chan.begin() + e * attr_cp.n_u);
  }
  return chan;
}

struct SolveResult {
  Candidate cand;
  bool found = false;
};

SolveResult multistart_solve(const Compiled& cp, Objective obj, double d_cap,
                             double e_floor, const SolverConfig& cfg,
                             const std::vector<std::vector<double>>& extra_starts,
                             std::vector<double> anchor_hint = {}) {
  Solver solver(cp, obj, d_cap, e_floor, cfg);

  std::vector<double> anchor =
      anchor_hint.empty() ? identity_channel_flat(cp) : std::move(anchor_hint);
  bool anchor_ok = solver.feasible(solver.stats_of(anchor));

  solver.consider(anchor);
  solver.consider(constant_channel_flat(cp));
  solver.consider(revealed_identity_channel_flat(cp));
  for (const auto& s : extra_starts) solver.consider(s);

  std::vector<std::vector<double>> starts;
  starts.push_back(identity_channel_flat(cp));
  starts.push_back(revealed_identity_channel_flat(cp));
  for (const auto& s : extra_starts) starts.push_back(s);
  // Homotopy family between full disclosure and full suppression; the
  // optimum lives near the suppression end when the distortion cap is
  // generous, where random starts rarely land.
  {
    std::vector<double> ident = identity_channel_flat(cp);
    std::vector<double> cons = constant_channel_flat(cp);
    for (double alpha : {0.25, 0.5, 0.75, 0.9, 0.97}) {
      std::vector<double> blend(ident.size());
      for (std::size_t i = 0; i < blend.size(); ++i) {
        blend[i] = (1.0 - alpha) * ident[i] + alpha * cons[i];
      }
      starts.push_back(std::move(blend));
    }
  }
  for (std::size_t i = starts.size(); i < cfg.multistarts; ++i) {
    starts.push_back(random_channel_flat(cp, cfg.rng_seed + i));
  }
  if (starts.size() > cfg.multistarts) starts.resize(std::max(cfg.multistarts, std::size_t(1)));

  for (auto& start : starts) {
    solver.run_start(std::move(start));
    if (anchor_ok) solver.polish(solver.last_iterate(), anchor);
  }
  solver.dual_refine();
  if (anchor_ok) solver.refine(anchor, 400);

  return SolveResult{solver.best(), solver.best().valid};
}

RegionPoint gamma_point_impl(const PrivacyProblem& prob, const Compiled& cp,
                             double distortion, const SolverConfig& cfg) {
  if (!(distortion >= 0.0)) {
    throw ArgumentError("gamma_of_d: distortion must be non-negative");
  }
  double d_useful = prob.max_useful_distortion();
  if (distortion >= d_useful - 1e-12) {
    // Slack constraint: a constant description is optimal and exact.
    Solver solver(cp, Objective::kMaxEquivocation, std::max(distortion, d_useful),
                  -kInf, cfg);
    std::vector<double> chan = constant_channel_flat(cp);
    Stats s = solver.stats_of(chan);
    return finalize(cp, Candidate{true, std::move(chan), std::move(s)});
  }
  SolveResult res = multistart_solve(cp, Objective::kMaxEquivocation, distortion,
                                     -kInf, cfg, {});
  if (!res.found) {
    std::ostringstream os;
    os << "gamma_of_d: no channel met distortion " << distortion;
    throw InfeasibleError(os.str());
  }
  return finalize(cp, res.cand);
}

RegionPoint rate_point_impl(const Compiled& cp, double distortion,
                            double e_floor, const SolverConfig& cfg,
                            const RegionPoint& gamma_pt,
                            const std::vector<std::vector<double>>& extra_starts) {
  if (e_floor > gamma_pt.equivocation + 1e-6) {
    std::ostringstream os;
    os << "r_of_de: equivocation floor " << e_floor
       << " exceeds the achievable maximum (estimate "
       << gamma_pt.equivocation << ") at distortion " << distortion;
    throw InfeasibleError(os.str(), gamma_pt.equivocation);
  }
  std::vector<std::vector<double>> starts = extra_starts;
  starts.push_back(gamma_pt.channel.matrix());
  SolveResult res = multistart_solve(cp, Objective::kMinRate, distortion,
                                     e_floor, cfg, starts,
                                     gamma_pt.channel.matrix());
  if (!res.found) {
    // Unreachable in practice: the gamma point itself is feasible.
    throw InfeasibleError("r_of_de: no feasible channel found");
  }
  return finalize(cp, res.cand);
}

void validate_floor(const PrivacyProblem& prob, double distortion, double e_floor) {
  if (!(distortion >= 0.0)) {
    throw ArgumentError("r_of_de: distortion must be non-negative");
  }
  if (!(e_floor >= -kFeasSlack) || e_floor > prob.private_entropy() + 1e-9) {
    std::ostringstream os;
    os << "r_of_de: equivocation floor " << e_floor << " outside [0, "
       << prob.private_entropy() << "]";
    throw ArgumentError(os.str());
  }
}

}  // namespace

PrivacyProblem::PrivacyProblem(JointPmf joint, DistortionSpec distortion,
                               std::size_t u_cardinality)
    : joint_(std::move(joint)),
      distortion_(std::move(distortion)),
      u_cardinality_(u_cardinality) {
  for (std::size_t i = 0; i < joint_.rank(); ++i) {
    AxisRole role = joint_.axis(i).role;
    if (role == AxisRole::kAuxiliary || role == AxisRole::kReconstruction) {
      throw ValidationError(
          "PrivacyProblem: source axes must be public/private/both/side-info");
    }
    if (is_attribute(role)) attribute_axes_.push_back(i);
    if (reveals(role)) revealed_axes_.push_back(i);
    if (hides(role)) private_axes_.push_back(i);
    if (role == AxisRole::kSideInfo) side_info_axes_.push_back(i);
  }
  if (revealed_axes_.empty() || private_axes_.empty()) {
    throw ValidationError(
        "PrivacyProblem: need at least one public and one private axis");
  }
  std::size_t n_r = 1;
  for (std::size_t a : revealed_axes_) n_r *= joint_.axis(a).alphabet.size();
  if (n_r != distortion_.n_source()) {
    throw ValidationError(
        "PrivacyProblem: distortion rows must match the revealed product");
  }
  if (u_cardinality_ == 0) {
    std::size_t n_attr = 1;
    for (std::size_t a : attribute_axes_) n_attr *= joint_.axis(a).alphabet.size();
    u_cardinality_ = n_attr + 2;
  }
}

double PrivacyProblem::private_entropy() const {
  JointPmf m = joint_.marginal(private_axes_);
  return shannon_entropy(m.probs());
}

double PrivacyProblem::equivocation_ceiling() const {
  if (side_info_axes_.empty()) return private_entropy();
  return conditional_entropy(joint_, private_axes_, side_info_axes_);
}

double PrivacyProblem::equivocation_floor() const {
  std::vector<std::size_t> pure_private = joint_.axes_with_role(AxisRole::kPrivate);
  if (pure_private.empty()) return 0.0;  // census-style: X_h determined by X_r
  std::vector<std::size_t> given = revealed_axes_;
  given.insert(given.end(), side_info_axes_.begin(), side_info_axes_.end());
  return conditional_entropy(joint_, pure_private, given);
}

double PrivacyProblem::max_useful_distortion() const {
  std::vector<std::size_t> order = revealed_axes_;
  order.insert(order.end(), side_info_axes_.begin(), side_info_axes_.end());
  JointPmf m = joint_.marginal(order);
  std::size_t n_z = 1;
  for (std::size_t i = revealed_axes_.size(); i < order.size(); ++i) {
    n_z *= m.axis(i).alphabet.size();
  }
  std::size_t n_r = m.cell_count() / n_z;
  const auto& probs = m.probs();
  double total = 0.0;
  for (std::size_t z = 0; z < n_z; ++z) {
    double best = kInf;
    for (std::size_t xh = 0; xh < distortion_.n_reconstruction(); ++xh) {
      double cost = 0.0;
      for (std::size_t r = 0; r < n_r; ++r) {
        cost += probs[r * n_z + z] * distortion_.at(r, xh);
      }
      best = std::min(best, cost);
    }
    total += best;
  }
  return total;
}

void SolverConfig::validate() const {
  if (multistarts < 1) throw ValidationError("SolverConfig: multistarts must be >= 1");
  if (!(inner_tolerance > 0.0)) throw ValidationError("SolverConfig: tolerance must be positive");
  if (max_iters < 1) throw ValidationError("SolverConfig: max_iters must be >= 1");
  if (penalty_weight_schedule.empty()) {
    throw ValidationError("SolverConfig: penalty schedule is empty");
  }
  for (double w : penalty_weight_schedule) {
    if (!(w > 0.0)) throw ValidationError("SolverConfig: penalty weights must be positive");
  }
}

namespace {

// Accepts a channel over the attribute product or the revealed product and
// returns it lifted to the attribute scope.
std::vector<double> adapt_channel(const PrivacyProblem& prob, const Compiled& cp,
                                  const Channel& c) {
  if (c.input_alphabet() == cp.in_alphabet) return c.matrix();
  Compiled rev = compile(prob, EncoderScope::kRevealedOnly, c.n_out());
  if (c.input_alphabet() == rev.in_alphabet) {
    return lift_to_attributes(cp, rev, c.matrix());
  }
  throw ValidationError(
      "channel input alphabet matches neither the attribute product nor the "
      "revealed product of the problem");
}

Stats stats_for_channel(const PrivacyProblem& prob, const Channel& c,
                        Compiled& cp_out) {
  cp_out = compile(prob, EncoderScope::kAttributes, c.n_out());
  std::vector<double> chan = adapt_channel(prob, cp_out, c);
  Eval ev(cp_out);
  ev.accumulate(chan);
  Stats s;
  ev.decoder(s.decoder);
  s.distortion = ev.distortion(s.decoder);
  s.equiv = ev.equivocation();
  s.rate = ev.rate(chan);
  return s;
}

}  // namespace

double equivocation(const PrivacyProblem& prob, const Channel& c) {
  Compiled cp;
  return stats_for_channel(prob, c, cp).equiv;
}

double rate_objective(const PrivacyProblem& prob, const Channel& c) {
  Compiled cp;
  return stats_for_channel(prob, c, cp).rate;
}

Decoder optimal_decoder(const PrivacyProblem& prob, const Channel& c) {
  Compiled cp;
  Stats s = stats_for_channel(prob, c, cp);
  return Decoder{cp.n_u, cp.n_z, std::move(s.decoder)};
}

RegionPoint gamma_of_d(const PrivacyProblem& prob, double distortion,
                       const SolverConfig& cfg) {
  cfg.validate();
  Compiled cp = compile(prob, EncoderScope::kAttributes, prob.u_cardinality());
  return gamma_point_impl(prob, cp, distortion, cfg);
}

RegionPoint r_of_de(const PrivacyProblem& prob, double distortion,
                    double equivocation_floor, const SolverConfig& cfg) {
  cfg.validate();
  validate_floor(prob, distortion, equivocation_floor);
  Compiled cp = compile(prob, EncoderScope::kAttributes, prob.u_cardinality());
  RegionPoint gamma_pt = gamma_point_impl(prob, cp, distortion, cfg);

  // Markov-structured candidates are members of the search space; fold the
  // restricted solve in so the unrestricted answer never trails it.
  std::vector<std::vector<double>> extra;
  if (cp.n_enc != cp.n_r) {
    Compiled rev = compile(prob, EncoderScope::kRevealedOnly, prob.u_cardinality());
    SolveResult res = multistart_solve(rev, Objective::kMinRate, distortion,
                                       equivocation_floor, cfg, {});
    if (res.found) extra.push_back(lift_to_attributes(cp, rev, res.cand.chan));
  }
  return rate_point_impl(cp, distortion, equivocation_floor, cfg, gamma_pt,
                         extra);
}

RegionPoint r_of_de_markov(const PrivacyProblem& prob, double distortion,
                           double equivocation_floor, const SolverConfig& cfg) {
  cfg.validate();
  validate_floor(prob, distortion, equivocation_floor);
  Compiled rev = compile(prob, EncoderScope::kRevealedOnly, prob.u_cardinality());
  RegionPoint gamma_pt = gamma_point_impl(prob, rev, distortion, cfg);
  return rate_point_impl(rev, distortion, equivocation_floor, cfg, gamma_pt,
                         {});
}

RegionCurve region_curve(const PrivacyProblem& prob,
                         std::span<const double> d_grid,
                         std::span<const double> e_grid,
                         const SolverConfig& cfg) {
  cfg.validate();
  if (!std::is_sorted(d_grid.begin(), d_grid.end()) ||
      !std::is_sorted(e_grid.begin(), e_grid.end())) {
    throw ArgumentError("region_curve: grids must be sorted ascending");
  }
  Compiled cp = compile(prob, EncoderScope::kAttributes, prob.u_cardinality());
  RegionCurve curve;

  // Gamma boundary, made monotone by carrying the best channel forward
  // (a channel feasible at a smaller distortion stays feasible).
  std::vector<RegionPoint> gammas;
  gammas.reserve(d_grid.size());
  for (double d : d_grid) {
    try {
      RegionPoint pt = gamma_point_impl(prob, cp, d, cfg);
      if (!gammas.empty() && gammas.back().equivocation > pt.equivocation) {
        pt = gammas.back();
      }
      gammas.push_back(pt);
      curve.entries.push_back(
          RegionCurveEntry{d, pt.equivocation, true, gammas.back()});
    } catch (const Error& e) {
      std::ostringstream os;
      os << "gamma at D=" << d << ": " << e.what();
      curve.skipped.push_back(os.str());
      gammas.push_back(RegionPoint{});
      gammas.back().equivocation = -1.0;  // marks failure
    }
  }

  // Rate surface with dominance closure: each grid point may inherit the
  // channel of any point with smaller D and larger E.
  const std::size_t nd = d_grid.size(), ne = e_grid.size();
  std::vector<std::optional<RegionPoint>> surface(nd * ne);
  for (std::size_t i = 0; i < nd; ++i) {
    if (gammas[i].equivocation < 0.0) continue;
    for (std::size_t j = 0; j < ne; ++j) {
      if (e_grid[j] > gammas[i].equivocation + kFeasSlack) continue;
      try {
        surface[i * ne + j] = rate_point_impl(cp, d_grid[i], e_grid[j],
                                              cfg, gammas[i], {});
      } catch (const Error& e) {
        std::ostringstream os;
        os << "rate at D=" << d_grid[i] << " E=" << e_grid[j] << ": " << e.what();
        curve.skipped.push_back(os.str());
      }
    }
  }
  for (std::size_t i = 0; i < nd; ++i) {
    for (std::size_t j = ne; j-- > 0;) {
      auto& cell = surface[i * ne + j];
      if (j + 1 < ne) {
        const auto& up = surface[i * ne + j + 1];
        if (up && (!cell || up->rate < cell->rate)) cell = up;
      }
      if (i > 0) {
        const auto& left = surface[(i - 1) * ne + j];
        if (left && (!cell || left->rate < cell->rate)) cell = left;
      }
    }
  }
  for (std::size_t i = 0; i < nd; ++i) {
    for (std::size_t j = 0; j < ne; ++j) {
      const auto& cell = surface[i * ne + j];
      if (cell) {
        curve.entries.push_back(
            RegionCurveEntry{d_grid[i], e_grid[j], false, *cell});
      }
    }
  }
  return curve;
}

}  // namespace rde
