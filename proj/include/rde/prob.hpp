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
// Exact finite-alphabet probability primitives: alphabets, probability mass
// functions, joint distributions with role-tagged axes, row-stochastic
// channels, distortion matrices, and the information measures built on them.
//
// Conventions used throughout the library:
//   * all logarithms are base 2; entropies and rates are bits per symbol,
//   * 0 * log 0 is taken as 0; p * log(p/0) with p > 0 saturates to +inf
//     (it cannot arise from a valid joint, only from mismatched inputs),
//   * distributions must sum to 1 within kSumTolerance at construction and
//     are never renormalized silently (use the normalized() factories),
//   * every value is immutable after construction and safe to share across
//     threads.
#ifndef RDE_PROB_HPP_
#define RDE_PROB_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rde/errors.hpp"

namespace rde {

inline constexpr double kSumTolerance = 1e-12;

// Role of an axis inside a joint distribution. kBoth marks an attribute
// that is revealed and protected at the same time (census-style sources).
enum class AxisRole {
  kPublic,
  kPrivate,
  kBoth,
  kSideInfo,
  kAuxiliary,
  kReconstruction,
};

const char* to_string(AxisRole role);
AxisRole role_from_string(std::string_view s);

// Axis belongs to the revealed attribute collection.
inline bool reveals(AxisRole r) {
  return r == AxisRole::kPublic || r == AxisRole::kBoth;
}
// Axis belongs to the protected attribute collection.
inline bool hides(AxisRole r) {
  return r == AxisRole::kPrivate || r == AxisRole::kBoth;
}
// Axis is a source attribute (as opposed to side information or a
// variable introduced by a coding scheme).
inline bool is_attribute(AxisRole r) { return reveals(r) || hides(r); }

// Which attributes a sanitizing channel may condition on.
enum class EncoderScope {
  kAttributes,    // all public and private attributes
  kRevealedOnly,  // public attributes only
};

// A finite, ordered symbol set.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> labels);

  // "x0", "x1", ... convenience for synthetic alphabets.
  static Alphabet indexed(std::string_view prefix, std::size_t n);
  // Row-major product alphabet with labels "a|b".
  static Alphabet product(const Alphabet& a, const Alphabet& b);
  static Alphabet product(std::span<const Alphabet> parts);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<std::size_t> index_of(std::string_view label) const;

  bool operator==(const Alphabet& other) const = default;

 private:
  std::vector<std::string> labels_;
};

// A named, role-tagged axis of a joint distribution or table schema.
struct Axis {
  std::string name;
  Alphabet alphabet;
  AxisRole role;
};

// Probability mass function over a single alphabet.
class Pmf {
 public:
  Pmf(Alphabet alphabet, std::vector<double> probs);

  // Scales a non-negative mass vector to sum to 1.
  static Pmf normalized(Alphabet alphabet, std::vector<double> mass);
  static Pmf uniform(Alphabet alphabet);

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  Alphabet alphabet_;
  std::vector<double> probs_;
};

// Dense joint distribution over role-tagged axes, stored row-major with the
// last axis fastest.
class JointPmf {
 public:
  JointPmf(std::vector<Axis> axes, std::vector<double> probs);

  static JointPmf normalized(std::vector<Axis> axes, std::vector<double> mass);
  static JointPmf from_pmf(const Pmf& p, std::string name, AxisRole role);

  std::size_t rank() const { return axes_.size(); }
  const std::vector<Axis>& axes() const { return axes_; }
  const Axis& axis(std::size_t i) const { return axes_[i]; }
  std::vector<std::size_t> dims() const;
  std::size_t cell_count() const { return probs_.size(); }
  const std::vector<double>& probs() const { return probs_; }

  std::size_t flat_index(std::span<const std::size_t> idx) const;
  void unflatten(std::size_t flat, std::span<std::size_t> idx) const;

  // Marginal over the listed axes, in the listed order.
  JointPmf marginal(std::span<const std::size_t> keep_axes) const;
  Pmf marginal_pmf(std::size_t axis) const;

  std::vector<std::size_t> axes_where(bool (*pred)(AxisRole)) const;
  std::vector<std::size_t> axes_with_role(AxisRole role) const;
  std::optional<std::size_t> axis_named(std::string_view name) const;

 private:
  std::vector<Axis> axes_;
  std::vector<double> probs_;
  std::vector<std::size_t> strides_;
};

// Row-stochastic conditional distribution: rows are inputs, columns outputs.
class Channel {
 public:
  // Trivial 1x1 channel; the default for value members awaiting assignment.
  Channel();
  Channel(Alphabet input, Alphabet output, std::vector<double> matrix);

  static Channel identity(const Alphabet& a);
  // Every input maps to the same point mass.
  static Channel constant(Alphabet input, Alphabet output,
                          std::size_t out_index);
  // Binary symmetric channel over the given (binary) alphabet.
  static Channel bsc(const Alphabet& a, double crossover);

  const Alphabet& input_alphabet() const { return input_; }
  const Alphabet& output_alphabet() const { return output_; }
  std::size_t n_in() const { return input_.size(); }
  std::size_t n_out() const { return output_.size(); }
  double at(std::size_t in, std::size_t out) const {
    return matrix_[in * output_.size() + out];
  }
  std::span<const double> row(std::size_t in) const {
    return {matrix_.data() + in * output_.size(), output_.size()};
  }
  const std::vector<double>& matrix() const { return matrix_; }

 private:
  Alphabet input_;
  Alphabet output_;
  std::vector<double> matrix_;
};

// Non-negative distortion matrix g(source symbol, reconstruction symbol).
class DistortionSpec {
 public:
  DistortionSpec(std::string name, std::size_t n_source,
                 std::size_t n_reconstruction, std::vector<double> matrix);

  // 0 on the diagonal, 1 elsewhere.
  static DistortionSpec hamming(std::size_t n);

  const std::string& name() const { return name_; }
  std::size_t n_source() const { return n_source_; }
  std::size_t n_reconstruction() const { return n_reconstruction_; }
  double at(std::size_t x, std::size_t xhat) const {
    return matrix_[x * n_reconstruction_ + xhat];
  }
  const std::vector<double>& matrix() const { return matrix_; }
  double max_entry() const;

 private:
  std::string name_;
  std::size_t n_source_;
  std::size_t n_reconstruction_;
  std::vector<double> matrix_;
};

// x * log2(x) with the 0 log 0 = 0 convention.
double xlog2x(double x);
// Entropy in bits of a normalized mass vector.
double shannon_entropy(std::span<const double> probs);
// Binary entropy function h2(p), defined as 0 at the endpoints.
double binary_entropy(double p);

double entropy(const Pmf& p);

// H(target | given) in bits. `given` may be empty, giving the plain
// marginal entropy of the target axes. Axis sets must be disjoint.
double conditional_entropy(const JointPmf& j,
                           std::span<const std::size_t> target_axes,
                           std::span<const std::size_t> given_axes);

// I(A; B) = H(A) - H(A | B), clamped at 0 against roundoff.
double mutual_information(const JointPmf& j, std::span<const std::size_t> a,
                          std::span<const std::size_t> b);

// Extends a joint with a new axis drawn through a channel whose input is
// the row-major product of `input_axes`. The input marginal is preserved
// exactly; the output axis is appended last.
JointPmf push_forward(const JointPmf& j, const Channel& c,
                      std::span<const std::size_t> input_axes,
                      std::string output_name, AxisRole output_role);
JointPmf push_forward(const Pmf& p, const Channel& c,
                      std::string input_name = "x",
                      AxisRole input_role = AxisRole::kBoth,
                      std::string output_name = "xhat",
                      AxisRole output_role = AxisRole::kReconstruction);

// E[g(X_r, Xhat)] over the joint's revealed and reconstruction axes.
double expected_distortion(const JointPmf& j, const DistortionSpec& d);

// Row-major product alphabet over a subset of axes of a joint.
Alphabet product_alphabet(const JointPmf& j,
                          std::span<const std::size_t> axes);

}  // namespace rde

#endif  // RDE_PROB_HPP_
