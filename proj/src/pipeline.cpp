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
#include "rde/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace rde {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void check_label(const std::string& label) {
  if (label.find_first_of(",\"\n\r") != std::string::npos) {
    throw ValidationError("labels may not contain commas, quotes, or newlines: \"" +
                          label + "\"");
  }
}

std::vector<std::size_t> scope_columns(const Table& t, EncoderScope scope) {
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < t.schema.size(); ++i) {
    AxisRole role = t.schema[i].role;
    bool take = scope == EncoderScope::kAttributes ? is_attribute(role)
                                                   : reveals(role);
    if (take) cols.push_back(i);
  }
  return cols;
}

std::size_t composite_of_row(const Table& t, std::size_t row,
                             const std::vector<std::size_t>& cols) {
  std::size_t c = 0;
  for (std::size_t col : cols) {
    c = c * t.schema[col].alphabet.size() + t.at(row, col);
  }
  return c;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

Table ingest_csv(std::istream& in, const std::vector<Axis>& schema) {
  if (schema.empty()) throw ValidationError("ingest_csv: empty schema");
  for (const auto& ax : schema) {
    for (const auto& l : ax.alphabet.labels()) check_label(l);
  }
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("ingest_csv: missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_line(line);
  if (header.size() != schema.size()) {
    std::ostringstream os;
    os << "ingest_csv: header has " << header.size() << " columns, schema has "
       << schema.size();
    throw ValidationError(os.str());
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (header[i] != schema[i].name) {
      throw ValidationError("ingest_csv: header column \"" + header[i] +
                            "\" does not match schema column \"" +
                            schema[i].name + "\"");
    }
  }

  Table t;
  t.schema = schema;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    std::vector<std::string> fields = split_line(line);
    if (fields.size() != schema.size()) {
      std::ostringstream os;
      os << "ingest_csv: row " << row << " has " << fields.size()
         << " fields, expected " << schema.size();
      throw ValidationError(os.str());
    }
    for (std::size_t col = 0; col < schema.size(); ++col) {
      auto ix = schema[col].alphabet.index_of(fields[col]);
      if (!ix) {
        std::ostringstream os;
        os << "ingest_csv: row " << row << ", column \"" << schema[col].name
           << "\": unknown symbol \"" << fields[col] << "\"";
        throw ValidationError(os.str());
      }
      t.cells.push_back(std::uint32_t(*ix));
    }
  }
  if (row == 0) throw ValidationError("ingest_csv: no data rows");
  return t;
}

Table ingest_csv_file(const std::string& path, const std::vector<Axis>& schema) {
  std::ifstream in(path);
  if (!in) throw ValidationError("ingest_csv: cannot open \"" + path + "\"");
  return ingest_csv(in, schema);
}

void write_table_csv(std::ostream& out, const Table& t) {
  for (std::size_t c = 0; c < t.n_cols(); ++c) {
    check_label(t.schema[c].name);
    out << (c ? "," : "") << t.schema[c].name;
  }
  out << "\n";
  for (std::size_t r = 0; r < t.n_rows(); ++r) {
    for (std::size_t c = 0; c < t.n_cols(); ++c) {
      out << (c ? "," : "") << t.schema[c].alphabet.label(t.at(r, c));
    }
    out << "\n";
  }
}

void write_table_csv_file(const std::string& path, const Table& t) {
  std::ofstream out(path);
  if (!out) throw ValidationError("write_table_csv: cannot open \"" + path + "\"");
  write_table_csv(out, t);
}

Table join_columns(const Table& a, const Table& b) {
  if (a.n_rows() != b.n_rows()) {
    throw ValidationError("join_columns: row counts differ");
  }
  Table t;
  t.schema = a.schema;
  t.schema.insert(t.schema.end(), b.schema.begin(), b.schema.end());
  t.cells.reserve(a.cells.size() + b.cells.size());
  for (std::size_t r = 0; r < a.n_rows(); ++r) {
    for (std::size_t c = 0; c < a.n_cols(); ++c) t.cells.push_back(a.at(r, c));
    for (std::size_t c = 0; c < b.n_cols(); ++c) t.cells.push_back(b.at(r, c));
  }
  return t;
}

JointPmf empirical_joint(const Table& t) {
  if (t.n_rows() == 0) throw ValidationError("empirical_joint: empty table");
  std::size_t cells = 1;
  for (const auto& ax : t.schema) cells *= ax.alphabet.size();
  std::vector<double> counts(cells, 0.0);
  std::vector<std::size_t> all(t.n_cols());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  for (std::size_t r = 0; r < t.n_rows(); ++r) {
    std::size_t flat = 0;
    for (std::size_t c = 0; c < t.n_cols(); ++c) {
      flat = flat * t.schema[c].alphabet.size() + t.at(r, c);
    }
    counts[flat] += 1.0;
  }
  double n = double(t.n_rows());
  for (double& v : counts) v /= n;
  return JointPmf(t.schema, std::move(counts));
}

Table sanitize(const Table& t, const Channel& c, EncoderScope scope,
               std::uint64_t seed) {
  std::vector<std::size_t> cols = scope_columns(t, scope);
  if (cols.empty()) throw ValidationError("sanitize: no encoder columns in scope");
  std::size_t prod = 1;
  std::vector<Alphabet> parts;
  for (std::size_t col : cols) {
    prod *= t.schema[col].alphabet.size();
    parts.push_back(t.schema[col].alphabet);
  }
  if (prod != c.n_in() || !(Alphabet::product(parts) == c.input_alphabet())) {
    throw ValidationError(
        "sanitize: channel input does not match the encoder columns");
  }

  Table out;
  out.schema = {Axis{"xhat", c.output_alphabet(), AxisRole::kReconstruction}};
  out.cells.resize(t.n_rows());
  for (std::size_t r = 0; r < t.n_rows(); ++r) {
    std::size_t in = composite_of_row(t, r, cols);
    // Inverse-CDF draw against the row's cumulative channel probabilities;
    // uses only multiply/add/compare, so it is bit-stable everywhere.
    double u = (double(splitmix64(mix_seed(seed, r)) >> 11) + 0.5) * 0x1p-53;
    double acc = 0.0;
    std::uint32_t pick = std::uint32_t(c.n_out() - 1);
    for (std::size_t v = 0; v < c.n_out(); ++v) {
      acc += c.at(in, v);
      if (u <= acc) {
        pick = std::uint32_t(v);
        break;
      }
    }
    out.cells[r] = pick;
  }
  return out;
}

SanitizationRun run_sanitization(Table input, const Channel& c,
                                 EncoderScope scope, std::uint64_t seed) {
  SanitizationRun run{std::move(input), Table{}, c, scope, seed, Metrics{}};
  run.output = sanitize(run.input, c, scope, seed);
  return run;
}

Metrics measure(SanitizationRun& run, const DistortionSpec& d) {
  const Table& in = run.input;
  const Table& out = run.output;
  if (in.n_rows() != out.n_rows()) {
    throw ValidationError("measure: input and output row counts differ");
  }
  std::vector<std::size_t> revealed = scope_columns(in, EncoderScope::kRevealedOnly);
  if (revealed.empty()) throw ValidationError("measure: no revealed columns");
  std::size_t n_r = 1;
  for (std::size_t col : revealed) n_r *= in.schema[col].alphabet.size();
  if (n_r != d.n_source() || out.schema[0].alphabet.size() != d.n_reconstruction()) {
    throw ValidationError("measure: distortion matrix shape mismatch");
  }

  Metrics m;
  for (std::size_t r = 0; r < in.n_rows(); ++r) {
    m.empirical_distortion +=
        d.at(composite_of_row(in, r, revealed), out.at(r, 0));
  }
  m.empirical_distortion /= double(in.n_rows());

  // Plug-in equivocation: H(private | output) of the empirical joint.
  std::vector<std::size_t> priv;
  for (std::size_t i = 0; i < in.schema.size(); ++i) {
    if (hides(in.schema[i].role)) priv.push_back(i);
  }
  if (priv.empty()) throw ValidationError("measure: no private columns");
  JointPmf joined = empirical_joint(join_columns(in, out));
  std::vector<std::size_t> out_axis = {in.n_cols()};
  m.plug_in_equivocation_bits = conditional_entropy(joined, priv, out_axis);

  // Expected metrics of the channel on this table's empirical law.
  JointPmf source = empirical_joint(in);
  std::vector<std::size_t> enc_cols = scope_columns(in, run.scope);
  JointPmf lifted = push_forward(source, run.channel, enc_cols, "xhat",
                                 AxisRole::kReconstruction);
  m.theoretical_distortion = expected_distortion(lifted, d);
  std::vector<std::size_t> xhat_axis = {lifted.rank() - 1};
  m.theoretical_equivocation_bits = conditional_entropy(lifted, priv, xhat_axis);

  run.metrics = m;
  return m;
}

std::size_t QuantileBins::bin(double v) const {
  std::size_t b = 0;
  while (b < edges.size() && v >= edges[b]) ++b;
  return b;
}

QuantileBins quantile_bins(std::vector<double> values, std::size_t k) {
  if (k < 1) throw ArgumentError("quantile_bins: need at least one bin");
  if (values.empty()) throw ValidationError("quantile_bins: no values");
  std::sort(values.begin(), values.end());
  std::vector<double> edges;
  for (std::size_t i = 1; i < k; ++i) {
    std::size_t pos = i * values.size() / k;
    double edge = values[std::min(pos, values.size() - 1)];
    // an edge at or below the minimum would leave its lower bin empty
    if (edge > values.front() && (edges.empty() || edge > edges.back())) {
      edges.push_back(edge);
    }
  }
  return QuantileBins{edges, Alphabet::indexed("q", edges.size() + 1)};
}

}  // namespace rde
