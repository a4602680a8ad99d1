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
// Command-line front end. Exit codes: 0 success, 1 validation or usage
// error, 2 infeasible constraints, 3 solver non-convergence.
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rde/closed_form.hpp"
#include "rde/dp.hpp"
#include "rde/io.hpp"
#include "rde/oracle.hpp"
#include "rde/pipeline.hpp"
#include "rde/rd.hpp"
#include "rde/region.hpp"

namespace {

using namespace rde;

std::vector<double> parse_grid(const std::string& spec) {
  double a = 0, b = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(spec);
  if (!(is >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' ||
      !(step > 0.0) || b < a) {
    throw ValidationError("grid must be start:stop:step with positive step: \"" +
                          spec + "\"");
  }
  std::vector<double> grid;
  for (double v = a; v <= b + 0.5 * step; v += step) {
    grid.push_back(std::min(v, b));
  }
  if (!grid.empty() && grid.back() < b - 1e-12) grid.push_back(b);
  return grid;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw ValidationError("cannot open \"" + path + "\" for writing");
  return file;
}

Pmf load_pmf(const std::string& path) { return pmf_from_json(load_json_file(path)); }

// A single-axis file is promoted to a census joint (the lone axis both
// public and private); anything else is taken as is.
JointPmf load_source_joint(const std::string& path) {
  Json j = load_json_file(path);
  std::vector<Axis> axes = axes_from_json(j);
  if (axes.size() == 1 && axes[0].role != AxisRole::kBoth) {
    j["axes"][0]["role"] = "both";
  }
  return joint_from_json(j);
}

JointPmf strip_side_info(const JointPmf& j) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < j.rank(); ++i) {
    if (j.axis(i).role != AxisRole::kSideInfo) keep.push_back(i);
  }
  if (keep.size() == j.rank()) return j;
  return j.marginal(keep);
}

std::size_t revealed_product(const JointPmf& j) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < j.rank(); ++i) {
    if (reveals(j.axis(i).role)) n *= j.axis(i).alphabet.size();
  }
  return n;
}

DistortionSpec load_distortion(const std::string& spec, std::size_t n_revealed) {
  if (spec == "hamming") return DistortionSpec::hamming(n_revealed);
  DistortionSpec d = distortion_from_json(load_json_file(spec));
  if (d.n_source() != n_revealed) {
    throw ValidationError("distortion rows do not match the revealed alphabet");
  }
  return d;
}

struct SolverFlags {
  std::size_t multistarts = SolverConfig{}.multistarts;
  std::size_t max_iters = SolverConfig{}.max_iters;
  std::uint64_t seed = SolverConfig{}.rng_seed;
  std::size_t u_cardinality = 0;

  SolverConfig config() const {
    SolverConfig cfg;
    cfg.multistarts = multistarts;
    cfg.max_iters = max_iters;
    cfg.rng_seed = seed;
    return cfg;
  }
};

void add_solver_flags(CLI::App* cmd, SolverFlags& flags) {
  cmd->add_option("--multistarts", flags.multistarts, "solver restarts");
  cmd->add_option("--max-iters", flags.max_iters, "gradient steps per start");
  cmd->add_option("--seed", flags.seed, "solver rng seed");
  cmd->add_option("--u-cardinality", flags.u_cardinality,
                  "description alphabet size (0 = default rule)");
}

int run(int argc, char** argv) {
  CLI::App app{"rate-distortion-equivocation toolkit"};
  app.require_subcommand(1);

  // ---- curve ----------------------------------------------------------
  CLI::App* curve = app.add_subcommand("curve", "tradeoff curves and surfaces");
  curve->require_subcommand(1);
  std::string pmf_path, distortion_spec = "hamming", d_grid_spec, e_grid_spec,
              out_path;
  bool side_info = false;
  SolverFlags flags;

  CLI::App* curve_rd = curve->add_subcommand("rd", "rate-distortion curve R(D)");
  curve_rd->add_option("--pmf", pmf_path, "source pmf JSON")->required();
  curve_rd->add_option("--distortion", distortion_spec, "hamming or matrix JSON");
  curve_rd->add_option("--d-grid", d_grid_spec, "start:stop:step")->required();
  curve_rd->add_option("--out", out_path, "output CSV (default stdout)");
  curve_rd->callback([&] {
    Pmf p = load_pmf(pmf_path);
    DistortionSpec d = load_distortion(distortion_spec, p.size());
    std::vector<RDPoint> points;
    for (double dd : parse_grid(d_grid_spec)) {
      points.push_back(rd_point_at_distortion(p, d, dd));
    }
    std::ofstream file;
    write_rd_curve_csv(open_out(file, out_path), points);
  });

  auto make_problem = [&]() {
    JointPmf j = load_source_joint(pmf_path);
    if (side_info) {
      if (j.axes_with_role(AxisRole::kSideInfo).empty()) {
        throw ValidationError("--side-info given but the joint has no side-info axis");
      }
    } else {
      j = strip_side_info(j);
    }
    DistortionSpec d = load_distortion(distortion_spec, revealed_product(j));
    return PrivacyProblem(std::move(j), std::move(d), flags.u_cardinality);
  };

  CLI::App* curve_gamma =
      curve->add_subcommand("gamma", "equivocation-distortion frontier");
  curve_gamma->add_option("--pmf", pmf_path, "source pmf or joint JSON")->required();
  curve_gamma->add_option("--distortion", distortion_spec, "hamming or matrix JSON");
  curve_gamma->add_option("--d-grid", d_grid_spec, "start:stop:step")->required();
  curve_gamma->add_flag("--side-info", side_info,
                        "keep side-information axes (default: marginalized out)");
  curve_gamma->add_option("--out", out_path, "output CSV (default stdout)");
  add_solver_flags(curve_gamma, flags);
  curve_gamma->callback([&] {
    PrivacyProblem prob = make_problem();
    RegionCurve rc = region_curve(prob, parse_grid(d_grid_spec), {}, flags.config());
    std::ofstream file;
    write_gamma_curve_csv(open_out(file, out_path), rc.entries);
    for (const auto& s : rc.skipped) std::cerr << "skipped: " << s << "\n";
  });

  CLI::App* curve_region =
      curve->add_subcommand("region", "rate-distortion-equivocation surface");
  curve_region->add_option("--pmf", pmf_path, "source pmf or joint JSON")->required();
  curve_region->add_option("--distortion", distortion_spec, "hamming or matrix JSON");
  curve_region->add_option("--d-grid", d_grid_spec, "start:stop:step")->required();
  curve_region->add_option("--e-grid", e_grid_spec, "start:stop:step")->required();
  curve_region->add_flag("--side-info", side_info,
                         "keep side-information axes (default: marginalized out)");
  curve_region->add_option("--out", out_path, "output JSON (default stdout)");
  add_solver_flags(curve_region, flags);
  curve_region->callback([&] {
    PrivacyProblem prob = make_problem();
    RegionCurve rc = region_curve(prob, parse_grid(d_grid_spec),
                                  parse_grid(e_grid_spec), flags.config());
    std::ofstream file;
    open_out(file, out_path) << region_entries_to_json(rc.entries).dump(2) << "\n";
    for (const auto& s : rc.skipped) std::cerr << "skipped: " << s << "\n";
  });

  // ---- waterfill ------------------------------------------------------
  CLI::App* waterfill =
      app.add_subcommand("waterfill", "categorical Hamming closed form");
  double wf_d = -1.0;
  std::string wf_grid;
  waterfill->add_option("--pmf", pmf_path, "source pmf JSON")->required();
  waterfill->add_option("--d", wf_d, "distortion level (solution JSON)");
  waterfill->add_option("--d-grid", wf_grid, "start:stop:step (curve CSV)");
  waterfill->add_option("--out", out_path, "output file (default stdout)");
  waterfill->callback([&] {
    Pmf p = load_pmf(pmf_path);
    std::ofstream file;
    if (!wf_grid.empty()) {
      auto curve = hamming_gamma_curve(p, parse_grid(wf_grid));
      write_waterfill_curve_csv(open_out(file, out_path), curve);
    } else if (wf_d >= 0.0) {
      open_out(file, out_path) << to_json(hamming_waterfill(p, wf_d)).dump(2) << "\n";
    } else {
      throw ValidationError("waterfill needs --d or --d-grid");
    }
  });

  // ---- gaussian -------------------------------------------------------
  CLI::App* gaussian =
      app.add_subcommand("gaussian", "bivariate Gaussian closed form");
  GaussianModel model{1.0, 1.0, 0.5};
  std::string g_grid;
  gaussian->add_option("--sx2", model.sigma_x2, "Var(X)")->required();
  gaussian->add_option("--sy2", model.sigma_y2, "Var(Y)")->required();
  gaussian->add_option("--rho", model.rho, "correlation")->required();
  gaussian->add_option("--d-grid", g_grid, "start:stop:step")->required();
  gaussian->add_option("--out", out_path, "output CSV (default stdout)");
  gaussian->callback([&] {
    auto curve = gaussian_region(model, parse_grid(g_grid));
    std::ofstream file;
    write_gaussian_curve_csv(open_out(file, out_path), curve);
  });

  // ---- sanitize -------------------------------------------------------
  CLI::App* sanitize_cmd =
      app.add_subcommand("sanitize", "apply the optimal test channel to a CSV");
  std::string in_path, schema_path, metrics_path;
  double san_d = 0.0;
  std::uint64_t san_seed = 1;
  sanitize_cmd->add_option("--in", in_path, "input CSV")->required();
  sanitize_cmd->add_option("--schema", schema_path, "schema JSON")->required();
  sanitize_cmd->add_option("--d", san_d, "target Hamming distortion")->required();
  sanitize_cmd->add_option("--seed", san_seed, "sampling seed");
  sanitize_cmd->add_option("--out", out_path, "sanitized CSV")->required();
  sanitize_cmd->add_option("--metrics", metrics_path, "metrics JSON (default stdout)");
  sanitize_cmd->callback([&] {
    std::vector<Axis> schema = axes_from_json(load_json_file(schema_path));
    Table t = ingest_csv_file(in_path, schema);
    // the empirical law of the revealed product drives the channel design
    JointPmf emp = empirical_joint(t);
    std::vector<std::size_t> revealed;
    for (std::size_t i = 0; i < emp.rank(); ++i) {
      if (reveals(emp.axis(i).role)) revealed.push_back(i);
    }
    if (revealed.empty()) throw ValidationError("schema has no revealed columns");
    JointPmf rev = emp.marginal(revealed);
    std::vector<std::size_t> all(rev.rank());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    Pmf p(product_alphabet(rev, all), rev.probs());
    WaterfillSolution w = hamming_waterfill(p, san_d);
    // forward channel p(xhat | x) from the reverse test channel
    std::vector<double> fwd(p.size() * p.size(), 0.0);
    for (std::size_t x = 0; x < p.size(); ++x) {
      if (p[x] == 0.0) {
        fwd[x * p.size() + x] = 1.0;
        continue;
      }
      double sum = 0.0;
      for (std::size_t xh = 0; xh < p.size(); ++xh) {
        fwd[x * p.size() + xh] = w.p_xhat[xh] * w.test_channel.at(xh, x) / p[x];
        sum += fwd[x * p.size() + xh];
      }
      for (std::size_t xh = 0; xh < p.size(); ++xh) fwd[x * p.size() + xh] /= sum;
    }
    Channel forward(p.alphabet(), p.alphabet(), std::move(fwd));
    SanitizationRun run =
        run_sanitization(std::move(t), forward, EncoderScope::kRevealedOnly, san_seed);
    Metrics m = measure(run, DistortionSpec::hamming(p.size()));
    write_table_csv_file(out_path, run.output);
    Json report = to_json(m);
    report["target_distortion"] = san_d;
    report["design_equivocation_bits"] = w.gamma_exact_bits;
    std::ofstream file;
    open_out(file, metrics_path) << report.dump(2) << "\n";
  });

  // ---- dp -------------------------------------------------------------
  CLI::App* dp = app.add_subcommand("dp", "Laplace-mechanism baseline");
  std::string query_kind = "count", clip_spec, eps_grid_spec;
  double epsilon = 1.0, sensitivity_override = -1.0;
  std::uint64_t dp_seed = 7;
  dp->add_option("--query", query_kind, "count or sum");
  dp->add_option("--clip", clip_spec, "lo,hi clipping bounds for sums");
  dp->add_option("--epsilon", epsilon, "privacy parameter");
  dp->add_option("--sensitivity", sensitivity_override,
                 "override the query sensitivity");
  dp->add_option("--seed", dp_seed, "noise seed");
  dp->add_option("--epsilon-grid", eps_grid_spec, "start:stop:step accuracy curve");
  dp->add_option("--out", out_path, "accuracy curve CSV (default stdout)");
  dp->callback([&] {
    QuerySpec q;
    if (query_kind == "count") {
      q.kind = QueryKind::kCount;
    } else if (query_kind == "sum") {
      q.kind = QueryKind::kClippedSum;
      double lo = 0, hi = 0;
      char comma = 0;
      std::istringstream is(clip_spec);
      if (!(is >> lo >> comma >> hi) || comma != ',') {
        throw ValidationError("--clip must be lo,hi");
      }
      q.clip_lo = lo;
      q.clip_hi = hi;
    } else {
      throw ValidationError("--query must be count or sum");
    }
    double df = sensitivity_override > 0.0 ? sensitivity_override : sensitivity(q);
    Mechanism m = Mechanism::laplace(epsilon, df);
    RatioCheckReport rep = dp_ratio_check(m.b, epsilon, df, -1.0, 200000, dp_seed);
    Json report{{"epsilon", epsilon},
                {"sensitivity", df},
                {"scale_b", m.b},
                {"noise_variance", 2.0 * m.b * m.b},
                {"expected_abs_error", m.b},
                {"ratio_check",
                 Json{{"shift", rep.shift},
                      {"analytic_ratio", rep.analytic_ratio},
                      {"epsilon_bound", rep.epsilon_bound},
                      {"analytic_holds", rep.analytic_holds},
                      {"mc_max_ratio", rep.mc_max_ratio},
                      {"mc_samples", rep.mc_samples},
                      {"mc_holds", rep.mc_holds}}}};
    std::cout << report.dump(2) << "\n";
    if (!eps_grid_spec.empty()) {
      auto curve = accuracy_curve(parse_grid(eps_grid_spec), q);
      std::ofstream file;
      write_accuracy_curve_csv(open_out(file, out_path), curve);
    }
  });

  // ---- oracle-check ---------------------------------------------------
  CLI::App* oracle_cmd =
      app.add_subcommand("oracle-check", "exhaustive certification on tiny problems");
  std::string problem_path;
  OracleConfig ocfg;
  oracle_cmd->add_option("--problem", problem_path, "problem JSON")->required();
  oracle_cmd->add_option("--q", ocfg.quantization_step, "simplex grid step");
  oracle_cmd->add_option("--budget", ocfg.max_enumerations, "max channel count");
  oracle_cmd->add_option("--out", out_path, "report JSON (default stdout)");
  oracle_cmd->callback([&] {
    Json spec = load_json_file(problem_path);
    if (!spec.contains("d")) throw ValidationError("problem: missing \"d\"");
    double dd = spec.at("d").get<double>();
    Json report;
    if (spec.contains("pmf")) {
      Pmf p = pmf_from_json(spec.at("pmf"));
      DistortionSpec dspec = spec.contains("distortion")
                                 ? distortion_from_json(spec.at("distortion"))
                                 : DistortionSpec::hamming(p.size());
      report = to_json(oracle_rd(p, dspec, dd, ocfg));
      report["kind"] = "rd";
    } else if (spec.contains("joint")) {
      JointPmf j = joint_from_json(spec.at("joint"));
      std::size_t n_rev = revealed_product(j);
      DistortionSpec dspec = spec.contains("distortion")
                                 ? distortion_from_json(spec.at("distortion"))
                                 : DistortionSpec::hamming(n_rev);
      std::size_t u_card = spec.value("u_cardinality", std::size_t{0});
      PrivacyProblem prob(std::move(j), std::move(dspec), u_card);
      if (spec.contains("e")) {
        report = to_json(oracle_rate(prob, dd, spec.at("e").get<double>(), ocfg));
        report["kind"] = "rate";
      } else {
        report = to_json(oracle_gamma(prob, dd, ocfg));
        report["kind"] = "gamma";
      }
    } else {
      throw ValidationError("problem: need \"pmf\" or \"joint\"");
    }
    std::ofstream file;
    open_out(file, out_path) << report.dump(2) << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage problems are validation errors
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const rde::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const rde::ConvergenceError& e) {
    std::cerr << "no convergence: " << e.what() << "\n";
    return 3;
  } catch (const rde::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
