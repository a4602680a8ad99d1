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
#include "rde/prob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace rde {

namespace {

void check_mass_vector(std::span<const double> probs, std::size_t expected,
                       const char* what) {
  if (probs.size() != expected) {
    std::ostringstream os;
    os << what << ": expected " << expected << " entries, got "
       << probs.size();
    throw ValidationError(os.str());
  }
  double sum = 0.0;
  for (double v : probs) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << what << ": entries must be finite and non-negative, found " << v;
      throw ValidationError(os.str());
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": mass sums to " << sum << ", not 1 within "
       << kSumTolerance;
    throw ValidationError(os.str());
  }
}

std::vector<double> normalize_mass(std::vector<double> mass,
                                   const char* what) {
  double sum = 0.0;
  for (double v : mass) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError(std::string(what) +
                            ": mass entries must be finite and non-negative");
    }
    sum += v;
  }
  if (sum <= 0.0) {
    throw ValidationError(std::string(what) + ": total mass is zero");
  }
  for (double& v : mass) v /= sum;
  return mass;
}

void check_disjoint_in_range(const JointPmf& j,
                             std::span<const std::size_t> a,
                             std::span<const std::size_t> b,
                             const char* what) {
  std::set<std::size_t> seen;
  for (std::size_t i : a) {
    if (i >= j.rank()) throw ArgumentError(std::string(what) + ": axis index out of range");
    if (!seen.insert(i).second) throw ArgumentError(std::string(what) + ": repeated axis index");
  }
  for (std::size_t i : b) {
    if (i >= j.rank()) throw ArgumentError(std::string(what) + ": axis index out of range");
    if (!seen.insert(i).second) throw ArgumentError(std::string(what) + ": axis sets overlap");
  }
}

}  // namespace

const char* to_string(AxisRole role) {
  switch (role) {
    case AxisRole::kPublic: return "public";
    case AxisRole::kPrivate: return "private";
    case AxisRole::kBoth: return "both";
    case AxisRole::kSideInfo: return "side-info";
    case AxisRole::kAuxiliary: return "auxiliary";
    case AxisRole::kReconstruction: return "reconstruction";
  }
  return "unknown";
}

AxisRole role_from_string(std::string_view s) {
  if (s == "public") return AxisRole::kPublic;
  if (s == "private") return AxisRole::kPrivate;
  if (s == "both") return AxisRole::kBoth;
  if (s == "side-info") return AxisRole::kSideInfo;
  if (s == "auxiliary") return AxisRole::kAuxiliary;
  if (s == "reconstruction") return AxisRole::kReconstruction;
  throw ValidationError("unknown axis role: \"" + std::string(s) + "\"");
}

Alphabet::Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw ValidationError("alphabet must have at least one symbol");
  std::set<std::string_view> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) {
      throw ValidationError("alphabet labels must be distinct: \"" + l + "\"");
    }
  }
}

Alphabet Alphabet::indexed(std::string_view prefix, std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(std::string(prefix) + std::to_string(i));
  }
  return Alphabet(std::move(labels));
}

Alphabet Alphabet::product(const Alphabet& a, const Alphabet& b) {
  std::vector<std::string> labels;
  labels.reserve(a.size() * b.size());
  for (const auto& la : a.labels()) {
    for (const auto& lb : b.labels()) {
      labels.push_back(la + "|" + lb);
    }
  }
  return Alphabet(std::move(labels));
}

Alphabet Alphabet::product(std::span<const Alphabet> parts) {
  if (parts.empty()) throw ArgumentError("product alphabet needs at least one part");
  Alphabet acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc = product(acc, parts[i]);
  return acc;
}

std::optional<std::size_t> Alphabet::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  return std::nullopt;
}

Pmf::Pmf(Alphabet alphabet, std::vector<double> probs)
    : alphabet_(std::move(alphabet)), probs_(std::move(probs)) {
  check_mass_vector(probs_, alphabet_.size(), "Pmf");
}

Pmf Pmf::normalized(Alphabet alphabet, std::vector<double> mass) {
  return Pmf(std::move(alphabet), normalize_mass(std::move(mass), "Pmf"));
}

Pmf Pmf::uniform(Alphabet alphabet) {
  std::size_t n = alphabet.size();
  return Pmf(std::move(alphabet), std::vector<double>(n, 1.0 / double(n)));
}

JointPmf::JointPmf(std::vector<Axis> axes, std::vector<double> probs)
    : axes_(std::move(axes)), probs_(std::move(probs)) {
  if (axes_.empty()) throw ValidationError("JointPmf needs at least one axis");
  std::set<std::string_view> names;
  std::size_t cells = 1;
  for (const auto& ax : axes_) {
    if (!names.insert(ax.name).second) {
      throw ValidationError("JointPmf axis names must be distinct: \"" + ax.name + "\"");
    }
    cells *= ax.alphabet.size();
  }
  check_mass_vector(probs_, cells, "JointPmf");
  strides_.assign(axes_.size(), 1);
  for (std::size_t i = axes_.size(); i-- > 1;) {
    strides_[i - 1] = strides_[i] * axes_[i].alphabet.size();
  }
}

JointPmf JointPmf::normalized(std::vector<Axis> axes, std::vector<double> mass) {
  return JointPmf(std::move(axes), normalize_mass(std::move(mass), "JointPmf"));
}

JointPmf JointPmf::from_pmf(const Pmf& p, std::string name, AxisRole role) {
  return JointPmf({Axis{std::move(name), p.alphabet(), role}}, p.probs());
}

std::vector<std::size_t> JointPmf::dims() const {
  std::vector<std::size_t> d(axes_.size());
  for (std::size_t i = 0; i < axes_.size(); ++i) d[i] = axes_[i].alphabet.size();
  return d;
}

std::size_t JointPmf::flat_index(std::span<const std::size_t> idx) const {
  std::size_t flat = 0;
  for (std::size_t i = 0; i < axes_.size(); ++i) flat += idx[i] * strides_[i];
  return flat;
}

void JointPmf::unflatten(std::size_t flat, std::span<std::size_t> idx) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    idx[i] = flat / strides_[i];
    flat %= strides_[i];
  }
}

JointPmf JointPmf::marginal(std::span<const std::size_t> keep_axes) const {
  check_disjoint_in_range(*this, keep_axes, {}, "marginal");
  if (keep_axes.empty()) throw ArgumentError("marginal: need at least one axis");
  std::vector<Axis> out_axes;
  out_axes.reserve(keep_axes.size());
  std::size_t out_cells = 1;
  for (std::size_t a : keep_axes) {
    out_axes.push_back(axes_[a]);
    out_cells *= axes_[a].alphabet.size();
  }
  std::vector<double> out(out_cells, 0.0);
  std::vector<std::size_t> idx(axes_.size());
  for (std::size_t flat = 0; flat < probs_.size(); ++flat) {
    unflatten(flat, idx);
    std::size_t o = 0;
    for (std::size_t a : keep_axes) o = o * axes_[a].alphabet.size() + idx[a];
    out[o] += probs_[flat];
  }
  return JointPmf(std::move(out_axes), std::move(out));
}

Pmf JointPmf::marginal_pmf(std::size_t axis) const {
  std::size_t a[1] = {axis};
  JointPmf m = marginal(a);
  return Pmf(m.axis(0).alphabet, m.probs());
}

std::vector<std::size_t> JointPmf::axes_where(bool (*pred)(AxisRole)) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (pred(axes_[i].role)) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> JointPmf::axes_with_role(AxisRole role) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].role == role) out.push_back(i);
  }
  return out;
}

std::optional<std::size_t> JointPmf::axis_named(std::string_view name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].name == name) return i;
  }
  return std::nullopt;
}

Channel::Channel()
    : input_(std::vector<std::string>{"_"}),
      output_(std::vector<std::string>{"_"}),
      matrix_{1.0} {}

Channel::Channel(Alphabet input, Alphabet output, std::vector<double> matrix)
    : input_(std::move(input)), output_(std::move(output)), matrix_(std::move(matrix)) {
  if (matrix_.size() != input_.size() * output_.size()) {
    throw ValidationError("Channel: matrix shape does not match alphabets");
  }
  for (std::size_t i = 0; i < input_.size(); ++i) {
    check_mass_vector(row(i), output_.size(), "Channel row");
  }
}

Channel Channel::identity(const Alphabet& a) {
  std::size_t n = a.size();
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1.0;
  return Channel(a, a, std::move(m));
}

Channel Channel::constant(Alphabet input, Alphabet output, std::size_t out_index) {
  if (out_index >= output.size()) throw ArgumentError("Channel::constant: output index out of range");
  std::vector<double> m(input.size() * output.size(), 0.0);
  for (std::size_t i = 0; i < input.size(); ++i) m[i * output.size() + out_index] = 1.0;
  return Channel(std::move(input), std::move(output), std::move(m));
}

Channel Channel::bsc(const Alphabet& a, double crossover) {
  if (a.size() != 2) throw ArgumentError("Channel::bsc: alphabet must be binary");
  if (!(crossover >= 0.0 && crossover <= 1.0)) {
    throw ArgumentError("Channel::bsc: crossover must lie in [0, 1]");
  }
  return Channel(a, a, {1.0 - crossover, crossover, crossover, 1.0 - crossover});
}

DistortionSpec::DistortionSpec(std::string name, std::size_t n_source,
                               std::size_t n_reconstruction,
                               std::vector<double> matrix)
    : name_(std::move(name)),
      n_source_(n_source),
      n_reconstruction_(n_reconstruction),
      matrix_(std::move(matrix)) {
  if (n_source_ == 0 || n_reconstruction_ == 0) {
    throw ValidationError("DistortionSpec: empty dimensions");
  }
  if (matrix_.size() != n_source_ * n_reconstruction_) {
    throw ValidationError("DistortionSpec: matrix shape mismatch");
  }
  for (double v : matrix_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError("DistortionSpec: entries must be finite and non-negative");
    }
  }
}

DistortionSpec DistortionSpec::hamming(std::size_t n) {
  std::vector<double> m(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 0.0;
  return DistortionSpec("hamming", n, n, std::move(m));
}

double DistortionSpec::max_entry() const {
  return *std::max_element(matrix_.begin(), matrix_.end());
}

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

double shannon_entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) h -= xlog2x(p);
  return h < 0.0 ? 0.0 : h;  // guard -0.0 and roundoff on point masses
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double entropy(const Pmf& p) { return shannon_entropy(p.probs()); }

double conditional_entropy(const JointPmf& j,
                           std::span<const std::size_t> target_axes,
                           std::span<const std::size_t> given_axes) {
  check_disjoint_in_range(j, target_axes, given_axes, "conditional_entropy");
  if (target_axes.empty()) throw ArgumentError("conditional_entropy: empty target");
  std::vector<std::size_t> order(target_axes.begin(), target_axes.end());
  order.insert(order.end(), given_axes.begin(), given_axes.end());
  JointPmf m = j.marginal(order);
  std::size_t n_given = 1;
  for (std::size_t i = target_axes.size(); i < order.size(); ++i) {
    n_given *= m.axis(i).alphabet.size();
  }
  std::size_t n_target = m.cell_count() / n_given;
  // p(given) from the [target..., given...] layout (given axes are fastest)
  std::vector<double> pg(n_given, 0.0);
  const auto& probs = m.probs();
  for (std::size_t t = 0; t < n_target; ++t) {
    for (std::size_t g = 0; g < n_given; ++g) pg[g] += probs[t * n_given + g];
  }
  double h = 0.0;
  for (std::size_t t = 0; t < n_target; ++t) {
    for (std::size_t g = 0; g < n_given; ++g) {
      double ptg = probs[t * n_given + g];
      if (ptg > 0.0) h -= ptg * std::log2(ptg / pg[g]);
    }
  }
  return h < 0.0 ? 0.0 : h;
}

double mutual_information(const JointPmf& j, std::span<const std::size_t> a,
                          std::span<const std::size_t> b) {
  check_disjoint_in_range(j, a, b, "mutual_information");
  if (a.empty() || b.empty()) throw ArgumentError("mutual_information: empty axis set");
  JointPmf ma = j.marginal(a);
  double h_a = shannon_entropy(ma.probs());
  double mi = h_a - conditional_entropy(j, a, b);
  // Clamp roundoff; genuine negatives cannot occur for valid joints.
  return mi < 0.0 ? 0.0 : mi;
}

JointPmf push_forward(const JointPmf& j, const Channel& c,
                      std::span<const std::size_t> input_axes,
                      std::string output_name, AxisRole output_role) {
  check_disjoint_in_range(j, input_axes, {}, "push_forward");
  if (input_axes.empty()) throw ArgumentError("push_forward: empty input axis set");
  Alphabet in_product = product_alphabet(j, input_axes);
  if (!(in_product == c.input_alphabet())) {
    throw ValidationError(
        "push_forward: channel input alphabet does not match the row-major "
        "product of the selected axes");
  }
  std::vector<Axis> out_axes = j.axes();
  if (j.axis_named(output_name)) {
    throw ArgumentError("push_forward: output axis name already in use: \"" +
                        output_name + "\"");
  }
  out_axes.push_back(Axis{std::move(output_name), c.output_alphabet(), output_role});
  std::size_t n_out = c.n_out();
  const auto& probs = j.probs();
  std::vector<double> out(probs.size() * n_out, 0.0);
  std::vector<std::size_t> idx(j.rank());
  for (std::size_t flat = 0; flat < probs.size(); ++flat) {
    if (probs[flat] == 0.0) continue;
    j.unflatten(flat, idx);
    std::size_t in = 0;
    for (std::size_t a : input_axes) in = in * j.axis(a).alphabet.size() + idx[a];
    for (std::size_t u = 0; u < n_out; ++u) {
      out[flat * n_out + u] = probs[flat] * c.at(in, u);
    }
  }
  return JointPmf(std::move(out_axes), std::move(out));
}

JointPmf push_forward(const Pmf& p, const Channel& c, std::string input_name,
                      AxisRole input_role, std::string output_name,
                      AxisRole output_role) {
  JointPmf j = JointPmf::from_pmf(p, std::move(input_name), input_role);
  std::size_t axes[1] = {0};
  return push_forward(j, c, axes, std::move(output_name), output_role);
}

double expected_distortion(const JointPmf& j, const DistortionSpec& d) {
  std::vector<std::size_t> source = j.axes_where(reveals);
  std::vector<std::size_t> rec = j.axes_with_role(AxisRole::kReconstruction);
  if (source.empty() || rec.empty()) {
    throw ValidationError("expected_distortion: joint needs revealed and reconstruction axes");
  }
  std::vector<std::size_t> order = source;
  order.insert(order.end(), rec.begin(), rec.end());
  JointPmf m = j.marginal(order);
  std::size_t n_rec = 1;
  for (std::size_t i = source.size(); i < order.size(); ++i) {
    n_rec *= m.axis(i).alphabet.size();
  }
  std::size_t n_source = m.cell_count() / n_rec;
  if (n_source != d.n_source() || n_rec != d.n_reconstruction()) {
    throw ValidationError("expected_distortion: distortion matrix shape mismatch");
  }
  double total = 0.0;
  const auto& probs = m.probs();
  for (std::size_t s = 0; s < n_source; ++s) {
    for (std::size_t r = 0; r < n_rec; ++r) {
      total += probs[s * n_rec + r] * d.at(s, r);
    }
  }
  return total;
}

Alphabet product_alphabet(const JointPmf& j, std::span<const std::size_t> axes) {
  if (axes.empty()) throw ArgumentError("product_alphabet: empty axis set");
  Alphabet acc = j.axis(axes[0]).alphabet;
  for (std::size_t i = 1; i < axes.size(); ++i) {
    acc = Alphabet::product(acc, j.axis(axes[i]).alphabet);
  }
  return acc;
}

}  // namespace rde
