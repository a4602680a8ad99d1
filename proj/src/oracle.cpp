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
#include "rde/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t steps_of(const OracleConfig& cfg) {
  double inv = 1.0 / cfg.quantization_step;
  return std::size_t(std::llround(inv));
}

// All compositions of `steps` quantization units into n_out parts, emitted
// as probability rows. The last entry absorbs roundoff so every row sums
// to exactly 1 in floating point.
std::vector<std::vector<double>> grid_rows(std::size_t n_out,
                                           const OracleConfig& cfg) {
  std::size_t steps = steps_of(cfg);
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> parts(n_out, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos,
                                                          std::size_t left) {
    if (pos + 1 == n_out) {
      parts[pos] = left;
      std::vector<double> row(n_out);
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < n_out; ++i) {
        row[i] = double(parts[i]) / double(steps);
        acc += row[i];
      }
      row[n_out - 1] = 1.0 - acc;
      rows.push_back(std::move(row));
      return;
    }
    for (std::size_t take = 0; take <= left; ++take) {
      parts[pos] = take;
      rec(pos + 1, left - take);
    }
  };
  rec(0, steps);
  return rows;
}

double compositions(std::size_t steps, std::size_t parts) {
  // C(steps + parts - 1, parts - 1)
  double c = 1.0;
  for (std::size_t i = 1; i < parts; ++i) {
    c *= double(steps + i) / double(i);
  }
  return c;
}

void check_budget(double count, const OracleConfig& cfg, const char* what) {
  if (count > cfg.max_enumerations) {
    std::ostringstream os;
    os.precision(6);
    os << what << ": " << count << " grid channels exceed the budget of "
       << cfg.max_enumerations;
    throw ArgumentError(os.str());
  }
}

// Conservative bound on how far an entropy-based objective can move when
// every channel row is rounded to the grid.
double entropy_continuity_gap(double dtv, std::size_t alphabet) {
  dtv = std::min(dtv, 0.5);
  double eps = 2.0 * dtv;
  double a = double(alphabet < 2 ? 2 : alphabet);
  return eps * std::log2(a) + (1.0 + eps) * binary_entropy(eps / (1.0 + eps));
}

// Problem flattened for exhaustive evaluation. Written independently of
// the iterative solver so the two paths do not share objective code.
struct FlatProblem {
  std::size_t n_cells = 0, n_in = 0, n_u = 0, n_z = 1, n_h = 0, n_r = 0,
              n_xhat = 0;
  std::vector<double> p;
  std::vector<std::uint32_t> in, h, r, z;
  std::vector<double> p_in;
  std::vector<std::uint32_t> active;  // inputs with positive probability
  const DistortionSpec* dist = nullptr;
  Alphabet in_alphabet{std::vector<std::string>{"_"}};
  Alphabet u_alphabet{std::vector<std::string>{"_"}};
};

FlatProblem flatten(const PrivacyProblem& prob, std::size_t n_u) {
  const JointPmf& j = prob.joint();
  FlatProblem f;
  f.n_cells = j.cell_count();
  f.n_u = n_u;
  f.n_z = 1;
  for (std::size_t a : prob.side_info_axes()) f.n_z *= j.axis(a).alphabet.size();
  f.n_h = 1;
  for (std::size_t a : prob.private_axes()) f.n_h *= j.axis(a).alphabet.size();
  f.n_r = 1;
  for (std::size_t a : prob.revealed_axes()) f.n_r *= j.axis(a).alphabet.size();
  f.n_in = 1;
  for (std::size_t a : prob.attribute_axes()) f.n_in *= j.axis(a).alphabet.size();
  f.n_xhat = prob.distortion().n_reconstruction();
  f.dist = &prob.distortion();
  f.in_alphabet = product_alphabet(j, prob.attribute_axes());
  f.u_alphabet = Alphabet::indexed("u", n_u);

  f.p = j.probs();
  f.in.resize(f.n_cells);
  f.h.resize(f.n_cells);
  f.r.resize(f.n_cells);
  f.z.resize(f.n_cells);
  f.p_in.assign(f.n_in, 0.0);
  std::vector<std::size_t> idx(j.rank());
  auto comp = [&](std::span<const std::size_t> axes) {
    std::size_t c = 0;
    for (std::size_t a : axes) c = c * j.axis(a).alphabet.size() + idx[a];
    return std::uint32_t(c);
  };
  for (std::size_t cell = 0; cell < f.n_cells; ++cell) {
    j.unflatten(cell, idx);
    f.in[cell] = comp(prob.attribute_axes());
    f.h[cell] = comp(prob.private_axes());
    f.r[cell] = comp(prob.revealed_axes());
    f.z[cell] = prob.side_info_axes().empty() ? 0 : comp(prob.side_info_axes());
    f.p_in[f.in[cell]] += f.p[cell];
  }
  for (std::size_t i = 0; i < f.n_in; ++i) {
    if (f.p_in[i] > 0.0) f.active.push_back(std::uint32_t(i));
  }
  return f;
}

Channel assemble_channel(const FlatProblem& f,
                         std::span<const std::uint32_t> choice,
                         const std::vector<std::vector<double>>& rows) {
  std::vector<double> m(f.n_in * f.n_u, 1.0 / double(f.n_u));
  for (std::size_t k = 0; k < f.active.size(); ++k) {
    const auto& row = rows[choice[k]];
    std::copy(row.begin(), row.end(), m.begin() + f.active[k] * f.n_u);
  }
  return Channel(f.in_alphabet, f.u_alphabet, std::move(m));
}

// Odometer over one grid row per active input.
template <typename Leaf>
void scan(std::size_t depth, std::size_t n_rows, std::vector<std::uint32_t>& choice,
          const Leaf& leaf) {
  if (depth == choice.size()) {
    leaf(choice);
    return;
  }
  for (std::size_t rix = 0; rix < n_rows; ++rix) {
    choice[depth] = std::uint32_t(rix);
    scan(depth + 1, n_rows, choice, leaf);
  }
}

struct GammaRateEval {
  const FlatProblem* f;
  const std::vector<std::vector<double>>* rows;
  std::vector<double> juz, jhzu, wruz;

  explicit GammaRateEval(const FlatProblem& fp,
                         const std::vector<std::vector<double>>& rws)
      : f(&fp),
        rows(&rws),
        juz(fp.n_u * fp.n_z),
        jhzu(fp.n_u * fp.n_z * fp.n_h),
        wruz(fp.n_u * fp.n_z * fp.n_r) {}

  // Fills the joint accumulators for a choice of rows, then reports the
  // equivocation, optimal-decoder distortion, and rate of that channel.
  void evaluate(std::span<const std::uint32_t> choice, double* equiv,
                double* distortion, double* rate) {
    const FlatProblem& fp = *f;
    std::fill(juz.begin(), juz.end(), 0.0);
    std::fill(jhzu.begin(), jhzu.end(), 0.0);
    std::fill(wruz.begin(), wruz.end(), 0.0);
    std::vector<std::uint32_t> row_of_in(fp.n_in, std::uint32_t(-1));
    for (std::size_t k = 0; k < fp.active.size(); ++k) {
      row_of_in[fp.active[k]] = choice[k];
    }
    for (std::size_t cell = 0; cell < fp.n_cells; ++cell) {
      double pc = fp.p[cell];
      if (pc == 0.0) continue;
      const double* row = (*rows)[row_of_in[fp.in[cell]]].data();
      std::size_t zz = fp.z[cell], hh = fp.h[cell], rr = fp.r[cell];
      for (std::size_t u = 0; u < fp.n_u; ++u) {
        double w = pc * row[u];
        std::size_t uz = u * fp.n_z + zz;
        juz[uz] += w;
        jhzu[uz * fp.n_h + hh] += w;
        wruz[uz * fp.n_r + rr] += w;
      }
    }
    double hzu = 0.0, hhzu = 0.0;
    for (double v : juz) hzu -= xlog2x(v);
    for (double v : jhzu) hhzu -= xlog2x(v);
    *equiv = std::max(hhzu - hzu, 0.0);

    double dtot = 0.0;
    for (std::size_t uz = 0; uz < fp.n_u * fp.n_z; ++uz) {
      const double* w = wruz.data() + uz * fp.n_r;
      double best = kInf;
      for (std::size_t xh = 0; xh < fp.n_xhat; ++xh) {
        double cost = 0.0;
        for (std::size_t rr = 0; rr < fp.n_r; ++rr) cost += w[rr] * fp.dist->at(rr, xh);
        best = std::min(best, cost);
      }
      if (best < kInf) dtot += best;
    }
    *distortion = dtot;

    if (rate != nullptr) {
      // I(X_h X_r; U) - I(Z; U) = H(U | Z) - H(U | attributes)
      double h_z = 0.0;
      std::vector<double> pz(fp.n_z, 0.0);
      for (std::size_t u = 0; u < fp.n_u; ++u) {
        for (std::size_t zz = 0; zz < fp.n_z; ++zz) pz[zz] += juz[u * fp.n_z + zz];
      }
      for (double v : pz) h_z -= xlog2x(v);
      double row_ent = 0.0;
      for (std::size_t k = 0; k < fp.active.size(); ++k) {
        const auto& row = (*rows)[choice[k]];
        double he = 0.0;
        for (double v : row) he -= xlog2x(v);
        row_ent += fp.p_in[fp.active[k]] * he;
      }
      *rate = std::max(hzu - h_z - row_ent, 0.0);
    }
  }
};

}  // namespace

void OracleConfig::validate() const {
  if (!(quantization_step > 0.0 && quantization_step <= 1.0)) {
    throw ValidationError("OracleConfig: quantization step must lie in (0, 1]");
  }
  double inv = 1.0 / quantization_step;
  if (std::abs(inv - std::llround(inv)) > 1e-9) {
    throw ValidationError("OracleConfig: 1/quantization_step must be an integer");
  }
  if (!(max_enumerations > 0.0)) {
    throw ValidationError("OracleConfig: enumeration budget must be positive");
  }
}

double channel_grid_count(std::size_t n_in, std::size_t n_out,
                          const OracleConfig& cfg) {
  cfg.validate();
  if (n_in == 0 || n_out == 0) throw ArgumentError("channel_grid_count: empty shape");
  return std::pow(compositions(steps_of(cfg), n_out), double(n_in));
}

void enumerate_channels(std::size_t n_in, std::size_t n_out,
                        const OracleConfig& cfg,
                        const std::function<void(std::span<const double>)>& visit) {
  double count = channel_grid_count(n_in, n_out, cfg);
  check_budget(count, cfg, "enumerate_channels");
  std::vector<std::vector<double>> rows = grid_rows(n_out, cfg);
  std::vector<double> matrix(n_in * n_out);
  std::vector<std::uint32_t> choice(n_in, 0);
  scan(0, rows.size(), choice, [&](std::span<const std::uint32_t> ch) {
    for (std::size_t i = 0; i < n_in; ++i) {
      std::copy(rows[ch[i]].begin(), rows[ch[i]].end(),
                matrix.begin() + i * n_out);
    }
    visit(matrix);
  });
}

std::vector<Channel> enumerate_channels(const Alphabet& input,
                                        const Alphabet& output,
                                        const OracleConfig& cfg) {
  std::vector<Channel> out;
  enumerate_channels(input.size(), output.size(), cfg,
                     [&](std::span<const double> m) {
                       out.emplace_back(input, output,
                                        std::vector<double>(m.begin(), m.end()));
                     });
  return out;
}

OracleReport oracle_rd(const Pmf& p, const DistortionSpec& d, double distortion,
                       const OracleConfig& cfg) {
  cfg.validate();
  if (p.size() != d.n_source()) {
    throw ValidationError("oracle_rd: source alphabet does not match distortion");
  }
  if (!(distortion >= 0.0)) throw ArgumentError("oracle_rd: distortion must be >= 0");

  std::vector<std::uint32_t> active;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] > 0.0) active.push_back(std::uint32_t(x));
  }
  const std::size_t n_out = d.n_reconstruction();
  double count = std::pow(compositions(steps_of(cfg), n_out), double(active.size()));
  check_budget(count, cfg, "oracle_rd");

  std::vector<std::vector<double>> rows = grid_rows(n_out, cfg);
  const std::size_t n_rows = rows.size();

  // Per-row entropy and per-(row, source) expected distortion tables.
  std::vector<double> row_ent(n_rows);
  std::vector<double> row_cost(n_rows * active.size());
  for (std::size_t rix = 0; rix < n_rows; ++rix) {
    row_ent[rix] = shannon_entropy(rows[rix]);
    for (std::size_t k = 0; k < active.size(); ++k) {
      double cost = 0.0;
      for (std::size_t u = 0; u < n_out; ++u) {
        cost += rows[rix][u] * d.at(active[k], u);
      }
      row_cost[rix * active.size() + k] = cost;
    }
  }

  const double q = cfg.quantization_step;
  const double dtv = 0.5 * double(n_out) * q;
  const double gap = 2.0 * entropy_continuity_gap(dtv, n_out);
  const double slack = 2.0 * dtv * d.max_entry();

  double best = kInf, best_relaxed = kInf;
  std::vector<std::uint32_t> best_choice;
  std::vector<double> q_out(n_out);
  std::vector<std::uint32_t> choice(active.size(), 0);
  scan(0, n_rows, choice, [&](std::span<const std::uint32_t> ch) {
    double dist = 0.0;
    for (std::size_t k = 0; k < active.size(); ++k) {
      dist += p[active[k]] * row_cost[ch[k] * active.size() + k];
    }
    if (dist > distortion + slack + 1e-12) return;
    std::fill(q_out.begin(), q_out.end(), 0.0);
    double cond = 0.0;  // H(Xhat | X)
    for (std::size_t k = 0; k < active.size(); ++k) {
      double px = p[active[k]];
      const auto& row = rows[ch[k]];
      for (std::size_t u = 0; u < n_out; ++u) q_out[u] += px * row[u];
      cond += px * row_ent[ch[k]];
    }
    double mi = std::max(shannon_entropy(q_out) - cond, 0.0);
    if (dist <= distortion + 1e-12 && mi < best) {
      best = mi;
      best_choice.assign(ch.begin(), ch.end());
    }
    if (mi < best_relaxed) best_relaxed = mi;
  });

  if (!(best < kInf)) {
    std::ostringstream os;
    os << "oracle_rd: no grid channel meets distortion " << distortion;
    throw InfeasibleError(os.str());
  }

  std::vector<double> m(p.size() * n_out, 1.0 / double(n_out));
  for (std::size_t k = 0; k < active.size(); ++k) {
    std::copy(rows[best_choice[k]].begin(), rows[best_choice[k]].end(),
              m.begin() + active[k] * n_out);
  }
  Alphabet out_alpha = n_out == p.alphabet().size() ? p.alphabet()
                                                    : Alphabet::indexed("xhat", n_out);
  return OracleReport{best,
                      Channel(p.alphabet(), out_alpha, std::move(m)),
                      q,
                      count,
                      gap,
                      slack,
                      best_relaxed};
}

OracleReport oracle_gamma(const PrivacyProblem& prob, double distortion,
                          const OracleConfig& cfg) {
  cfg.validate();
  if (!(distortion >= 0.0)) throw ArgumentError("oracle_gamma: distortion must be >= 0");
  FlatProblem f = flatten(prob, prob.u_cardinality());
  double count = std::pow(compositions(steps_of(cfg), f.n_u), double(f.active.size()));
  check_budget(count, cfg, "oracle_gamma");

  std::vector<std::vector<double>> rows = grid_rows(f.n_u, cfg);
  GammaRateEval ev(f, rows);

  const double q = cfg.quantization_step;
  const double dtv = 0.5 * double(f.n_u) * q;
  const double gap = entropy_continuity_gap(dtv, f.n_h);
  const double slack = 2.0 * dtv * prob.distortion().max_entry();

  double best = -kInf, best_relaxed = -kInf;
  std::vector<std::uint32_t> best_choice;
  std::vector<std::uint32_t> choice(f.active.size(), 0);
  scan(0, rows.size(), choice, [&](std::span<const std::uint32_t> ch) {
    double equiv = 0.0, dist = 0.0;
    ev.evaluate(ch, &equiv, &dist, nullptr);
    if (dist <= distortion + 1e-12 && equiv > best) {
      best = equiv;
      best_choice.assign(ch.begin(), ch.end());
    }
    if (dist <= distortion + slack + 1e-12 && equiv > best_relaxed) {
      best_relaxed = equiv;
    }
  });

  if (!(best > -kInf)) {
    std::ostringstream os;
    os << "oracle_gamma: no grid channel meets distortion " << distortion;
    throw InfeasibleError(os.str());
  }
  return OracleReport{best,          assemble_channel(f, best_choice, rows),
                      q,             count,
                      gap,           slack,
                      best_relaxed};
}

OracleReport oracle_rate(const PrivacyProblem& prob, double distortion,
                         double equivocation_floor, const OracleConfig& cfg) {
  cfg.validate();
  if (!(distortion >= 0.0)) throw ArgumentError("oracle_rate: distortion must be >= 0");
  FlatProblem f = flatten(prob, prob.u_cardinality());
  double count = std::pow(compositions(steps_of(cfg), f.n_u), double(f.active.size()));
  check_budget(count, cfg, "oracle_rate");

  std::vector<std::vector<double>> rows = grid_rows(f.n_u, cfg);
  GammaRateEval ev(f, rows);

  const double q = cfg.quantization_step;
  const double dtv = 0.5 * double(f.n_u) * q;
  const double equiv_gap = entropy_continuity_gap(dtv, f.n_h);
  const double gap = 2.0 * entropy_continuity_gap(dtv, f.n_u);
  const double slack = 2.0 * dtv * prob.distortion().max_entry();

  double best = kInf, best_relaxed = kInf;
  std::vector<std::uint32_t> best_choice;
  std::vector<std::uint32_t> choice(f.active.size(), 0);
  scan(0, rows.size(), choice, [&](std::span<const std::uint32_t> ch) {
    double equiv = 0.0, dist = 0.0, rate = 0.0;
    ev.evaluate(ch, &equiv, &dist, &rate);
    if (dist <= distortion + 1e-12 && equiv >= equivocation_floor - 1e-12 &&
        rate < best) {
      best = rate;
      best_choice.assign(ch.begin(), ch.end());
    }
    if (dist <= distortion + slack + 1e-12 &&
        equiv >= equivocation_floor - equiv_gap - 1e-12 && rate < best_relaxed) {
      best_relaxed = rate;
    }
  });

  if (!(best < kInf)) {
    std::ostringstream os;
    os << "oracle_rate: no grid channel meets distortion " << distortion
       << " with equivocation >= " << equivocation_floor;
    throw InfeasibleError(os.str());
  }
  return OracleReport{best,          assemble_channel(f, best_choice, rows),
                      q,             count,
                      gap,           slack,
                      best_relaxed};
}

}  // namespace rde
