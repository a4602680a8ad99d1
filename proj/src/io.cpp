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
#include "rde/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace rde {

namespace {

const Json& require(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(std::string(what) + ": missing field \"" + key + "\"");
  }
  return j.at(key);
}

std::vector<double> probs_from(const Json& j, const char* what) {
  const Json& p = require(j, "probs", what);
  if (!p.is_array()) throw ValidationError(std::string(what) + ": probs must be an array");
  std::vector<double> out;
  out.reserve(p.size());
  for (const auto& v : p) {
    if (!v.is_number()) throw ValidationError(std::string(what) + ": probs must be numeric");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

Json axis_to_json(const Axis& axis) {
  return Json{{"name", axis.name},
              {"role", to_string(axis.role)},
              {"labels", axis.alphabet.labels()}};
}

Axis axis_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("axis: expected an object");
  const Json& labels = require(j, "labels", "axis");
  std::vector<std::string> ls;
  for (const auto& l : labels) {
    if (!l.is_string()) throw ValidationError("axis: labels must be strings");
    ls.push_back(l.get<std::string>());
  }
  return Axis{require(j, "name", "axis").get<std::string>(), Alphabet(std::move(ls)),
              role_from_string(require(j, "role", "axis").get<std::string>())};
}

std::vector<Axis> axes_from_json(const Json& j) {
  const Json& arr = j.is_array() ? j : require(j, "axes", "schema");
  if (!arr.is_array() || arr.empty()) {
    throw ValidationError("schema: expected a non-empty axes array");
  }
  std::vector<Axis> out;
  for (const auto& a : arr) out.push_back(axis_from_json(a));
  return out;
}

Json to_json(const Pmf& p) {
  return Json{{"axes", Json::array({axis_to_json(Axis{"x", p.alphabet(), AxisRole::kBoth})})},
              {"probs", p.probs()}};
}

Pmf pmf_from_json(const Json& j) {
  std::vector<Axis> axes = axes_from_json(j);
  if (axes.size() != 1) throw ValidationError("Pmf: expected exactly one axis");
  return Pmf(axes[0].alphabet, probs_from(j, "Pmf"));
}

Json to_json(const JointPmf& p) {
  Json axes = Json::array();
  for (const auto& ax : p.axes()) axes.push_back(axis_to_json(ax));
  return Json{{"axes", std::move(axes)}, {"probs", p.probs()}};
}

JointPmf joint_from_json(const Json& j) {
  return JointPmf(axes_from_json(j), probs_from(j, "JointPmf"));
}

Json to_json(const Channel& c) {
  Json axes = Json::array();
  axes.push_back(axis_to_json(Axis{"in", c.input_alphabet(), AxisRole::kPublic}));
  axes.push_back(axis_to_json(Axis{"out", c.output_alphabet(), AxisRole::kAuxiliary}));
  return Json{{"axes", std::move(axes)}, {"probs", c.matrix()}};
}

Channel channel_from_json(const Json& j) {
  std::vector<Axis> axes = axes_from_json(j);
  if (axes.size() != 2) throw ValidationError("Channel: expected input and output axes");
  return Channel(axes[0].alphabet, axes[1].alphabet, probs_from(j, "Channel"));
}

Json to_json(const DistortionSpec& d) {
  return Json{{"name", d.name()},
              {"n_source", d.n_source()},
              {"n_reconstruction", d.n_reconstruction()},
              {"matrix", d.matrix()}};
}

DistortionSpec distortion_from_json(const Json& j) {
  const Json& m = require(j, "matrix", "DistortionSpec");
  std::vector<double> matrix;
  for (const auto& v : m) matrix.push_back(v.get<double>());
  return DistortionSpec(require(j, "name", "DistortionSpec").get<std::string>(),
                        require(j, "n_source", "DistortionSpec").get<std::size_t>(),
                        require(j, "n_reconstruction", "DistortionSpec").get<std::size_t>(),
                        std::move(matrix));
}

Json to_json(const RegionPoint& pt) {
  return Json{{"rate", pt.rate},
              {"distortion", pt.distortion},
              {"equivocation", pt.equivocation},
              {"bound_type", "achievable"},
              {"channel", to_json(pt.channel)},
              {"decoder", pt.decoder.map}};
}

Json region_entries_to_json(std::span<const RegionCurveEntry> entries) {
  Json out = Json::array();
  for (const auto& e : entries) {
    Json pt = to_json(e.point);
    pt["target_distortion"] = e.target_distortion;
    pt["target_equivocation"] = e.target_equivocation;
    pt["on_gamma_boundary"] = e.on_gamma_boundary;
    out.push_back(std::move(pt));
  }
  return out;
}

Json to_json(const WaterfillSolution& w) {
  Json support = Json::array();
  for (std::size_t x : w.support) support.push_back(w.p_xhat.alphabet().label(x));
  return Json{{"lambda", w.lambda},
              {"d_bar", w.d_bar},
              {"support", std::move(support)},
              {"p_xhat", to_json(w.p_xhat)},
              {"test_channel", to_json(w.test_channel)},
              {"gamma_exact_bits", w.gamma_exact_bits},
              {"gamma_formula_bits", w.gamma_formula_bits},
              {"implied_rate_bits", w.implied_rate_bits},
              {"distortion", w.distortion}};
}

Json to_json(const OracleReport& r) {
  return Json{{"value", r.value},
              {"channel", to_json(r.channel)},
              {"quantization_step", r.quantization_step},
              {"enumeration_count", r.enumeration_count},
              {"continuity_gap", r.continuity_gap},
              {"distortion_slack", r.distortion_slack},
              {"value_relaxed", r.value_relaxed}};
}

Json to_json(const Metrics& m) {
  return Json{{"empirical_distortion", m.empirical_distortion},
              {"plug_in_equivocation_bits", m.plug_in_equivocation_bits},
              {"theoretical_distortion", m.theoretical_distortion},
              {"theoretical_equivocation_bits", m.theoretical_equivocation_bits}};
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open \"" + path + "\"");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw ValidationError("cannot parse \"" + path + "\": " + e.what());
  }
  return j;
}

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open \"" + path + "\" for writing");
  out << j.dump(2) << "\n";
  if (!out) throw ValidationError("failed writing \"" + path + "\"");
}

std::string format_sig12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_rd_curve_csv(std::ostream& out, std::span<const RDPoint> points) {
  out << "distortion,rate_bits,slope\n";
  for (const auto& p : points) {
    out << format_sig12(p.distortion) << "," << format_sig12(p.rate) << ","
        << format_sig12(p.slope) << "\n";
  }
}

void write_waterfill_curve_csv(std::ostream& out,
                               std::span<const GammaCurvePoint> points) {
  out << "D,gamma_exact_bits,gamma_formula_bits\n";
  for (const auto& p : points) {
    out << format_sig12(p.distortion) << "," << format_sig12(p.gamma_exact_bits)
        << "," << format_sig12(p.gamma_formula_bits) << "\n";
  }
}

void write_gaussian_curve_csv(std::ostream& out,
                              std::span<const GaussianCurvePoint> points) {
  out << "D,gamma_variance,gamma_entropy_bits\n";
  for (const auto& p : points) {
    out << format_sig12(p.distortion) << "," << format_sig12(p.variance_form)
        << "," << format_sig12(p.entropy_form_bits) << "\n";
  }
}

void write_gamma_curve_csv(std::ostream& out,
                           std::span<const RegionCurveEntry> entries) {
  out << "distortion,equivocation_bits,rate_bits\n";
  for (const auto& e : entries) {
    if (!e.on_gamma_boundary) continue;
    out << format_sig12(e.point.distortion) << ","
        << format_sig12(e.point.equivocation) << ","
        << format_sig12(e.point.rate) << "\n";
  }
}

void write_accuracy_curve_csv(std::ostream& out,
                              std::span<const AccuracyPoint> points) {
  out << "epsilon,expected_abs_error\n";
  for (const auto& p : points) {
    out << format_sig12(p.epsilon) << "," << format_sig12(p.expected_abs_error)
        << "\n";
  }
}

}  // namespace rde
