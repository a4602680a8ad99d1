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
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rde/closed_form.hpp"
#include "rde/pipeline.hpp"
#include "test_support.hpp"

using namespace rde;
using namespace rde::testing;

namespace {

std::vector<Axis> two_col_schema() {
  return {Axis{"zip", Alphabet({"10001", "10002"}), AxisRole::kPublic},
          Axis{"diag", Alphabet({"flu", "ok"}), AxisRole::kPrivate}};
}

}  // namespace

TEST_CASE("ingest_csv") {
  SUBCASE("accepts a well-formed file") {
    std::istringstream in(
        "zip,diag\n10001,flu\n10002,ok\n10001,ok\n10002,flu\n");
    Table t = ingest_csv(in, two_col_schema());
    CHECK(t.n_rows() == 4);
    CHECK(t.n_cols() == 2);
    CHECK(t.at(0, 0) == 0);
    CHECK(t.at(3, 1) == 0);
  }
  SUBCASE("unknown symbol names the row and column") {
    std::istringstream in("zip,diag\n10001,flu\n10002,ok\n99999,ok\n");
    try {
      ingest_csv(in, two_col_schema());
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      std::string msg = e.what();
      CHECK(msg.find("row 3") != std::string::npos);
      CHECK(msg.find("\"zip\"") != std::string::npos);
      CHECK(msg.find("99999") != std::string::npos);
    }
  }
  SUBCASE("empty data section is rejected") {
    std::istringstream in("zip,diag\n");
    CHECK_THROWS_AS(ingest_csv(in, two_col_schema()), ValidationError);
  }
  SUBCASE("ragged rows are rejected") {
    std::istringstream in("zip,diag\n10001,flu\n10001\n");
    CHECK_THROWS_AS(ingest_csv(in, two_col_schema()), ValidationError);
  }
  SUBCASE("header mismatch is rejected") {
    std::istringstream in("zip,diagnosis\n10001,flu\n");
    CHECK_THROWS_AS(ingest_csv(in, two_col_schema()), ValidationError);
  }
}

TEST_CASE("table csv round trip") {
  std::istringstream in("zip,diag\n10001,flu\n10002,ok\n");
  Table t = ingest_csv(in, two_col_schema());
  std::ostringstream out;
  write_table_csv(out, t);
  std::istringstream back(out.str());
  Table t2 = ingest_csv(back, two_col_schema());
  CHECK(t2.cells == t.cells);
}

TEST_CASE("empirical joint") {
  SUBCASE("identical rows give a point mass") {
    std::istringstream in("zip,diag\n10001,flu\n10001,flu\n10001,flu\n");
    JointPmf j = empirical_joint(ingest_csv(in, two_col_schema()));
    CHECK(j.probs()[0] == doctest::Approx(1.0));
  }
  SUBCASE("even split over two cells") {
    std::istringstream in("zip,diag\n10001,flu\n10002,ok\n10001,flu\n10002,ok\n");
    JointPmf j = empirical_joint(ingest_csv(in, two_col_schema()));
    CHECK(j.probs()[0] == doctest::Approx(0.5));
    CHECK(j.probs()[3] == doctest::Approx(0.5));
  }
  SUBCASE("large samples approach the source law") {
    JointPmf truth = JointPmf::from_pmf(census_pmf(), "x", AxisRole::kBoth);
    Table t = sample_table(truth, 100000, 42);
    JointPmf est = empirical_joint(t);
    double l1 = 0.0;
    for (std::size_t i = 0; i < est.probs().size(); ++i) {
      l1 += std::abs(est.probs()[i] - truth.probs()[i]);
    }
    CHECK(l1 < 0.02);
  }
}

TEST_CASE("sanitize basics") {
  JointPmf truth = JointPmf::from_pmf(census_pmf(), "x", AxisRole::kBoth);
  Table t = sample_table(truth, 500, 7);
  Alphabet x = census_pmf().alphabet();
  SUBCASE("identity channel copies the revealed column") {
    Table out = sanitize(t, Channel::identity(x), EncoderScope::kRevealedOnly, 1);
    for (std::size_t r = 0; r < t.n_rows(); ++r) CHECK(out.at(r, 0) == t.at(r, 0));
  }
  SUBCASE("constant channel collapses every row") {
    Table out = sanitize(t, Channel::constant(x, x, 2), EncoderScope::kRevealedOnly, 1);
    for (std::size_t r = 0; r < t.n_rows(); ++r) CHECK(out.at(r, 0) == 2);
  }
  SUBCASE("fixed seed reproduces bit-for-bit") {
    Channel c = hamming_waterfill(census_pmf(), 0.2).test_channel;
    // forward channel: rows x, columns xhat
    std::vector<double> fwd(9);
    WaterfillSolution w = hamming_waterfill(census_pmf(), 0.2);
    for (std::size_t xx = 0; xx < 3; ++xx)
      for (std::size_t xh = 0; xh < 3; ++xh)
        fwd[xx * 3 + xh] = w.p_xhat[xh] * w.test_channel.at(xh, xx) / census_pmf()[xx];
    for (std::size_t xx = 0; xx < 3; ++xx) {
      double s = 0.0;
      for (std::size_t u = 0; u < 3; ++u) s += fwd[xx * 3 + u];
      for (std::size_t u = 0; u < 3; ++u) fwd[xx * 3 + u] /= s;
    }
    Channel forward(x, x, fwd);
    Table o1 = sanitize(t, forward, EncoderScope::kRevealedOnly, 99);
    Table o2 = sanitize(t, forward, EncoderScope::kRevealedOnly, 99);
    Table o3 = sanitize(t, forward, EncoderScope::kRevealedOnly, 100);
    CHECK(o1.cells == o2.cells);
    CHECK(o1.cells != o3.cells);
  }
  SUBCASE("channel shape mismatch is rejected") {
    Channel wrong = Channel::identity(Alphabet::indexed("w", 4));
    CHECK_THROWS_AS(sanitize(t, wrong, EncoderScope::kRevealedOnly, 1),
                    ValidationError);
  }
}

TEST_CASE("measure on degenerate channels") {
  JointPmf truth = JointPmf::from_pmf(census_pmf(), "x", AxisRole::kBoth);
  Table t = sample_table(truth, 2000, 11);
  Alphabet x = census_pmf().alphabet();
  DistortionSpec d3 = DistortionSpec::hamming(3);
  SUBCASE("identity sanitization has zero empirical distortion") {
    SanitizationRun run =
        run_sanitization(t, Channel::identity(x), EncoderScope::kRevealedOnly, 5);
    Metrics m = measure(run, d3);
    CHECK(m.empirical_distortion == doctest::Approx(0.0));
    CHECK(m.theoretical_distortion == doctest::Approx(0.0));
    CHECK(m.plug_in_equivocation_bits == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("constant output leaves the full empirical private entropy") {
    SanitizationRun run =
        run_sanitization(t, Channel::constant(x, x, 0), EncoderScope::kRevealedOnly, 5);
    Metrics m = measure(run, d3);
    double h_emp = entropy(empirical_joint(t).marginal_pmf(0));
    CHECK(m.plug_in_equivocation_bits == doctest::Approx(h_emp).epsilon(1e-9));
  }
}

TEST_CASE("waterfill sanitization concentrates at the design point") {
  // forward channel of the D = 0.2 solution applied to 100k sampled rows
  const std::size_t n = 100000;
  JointPmf truth = JointPmf::from_pmf(census_pmf(), "x", AxisRole::kBoth);
  Table t = sample_table(truth, n, 314159);
  WaterfillSolution w = hamming_waterfill(census_pmf(), 0.2);
  Alphabet x = census_pmf().alphabet();
  std::vector<double> fwd(9);
  for (std::size_t xx = 0; xx < 3; ++xx) {
    for (std::size_t xh = 0; xh < 3; ++xh)
      fwd[xx * 3 + xh] = w.p_xhat[xh] * w.test_channel.at(xh, xx) / census_pmf()[xx];
    double s = 0.0;
    for (std::size_t u = 0; u < 3; ++u) s += fwd[xx * 3 + u];
    for (std::size_t u = 0; u < 3; ++u) fwd[xx * 3 + u] /= s;
  }
  Channel forward(x, x, fwd);
  SanitizationRun run = run_sanitization(t, forward, EncoderScope::kRevealedOnly, 2718);
  Metrics m = measure(run, DistortionSpec::hamming(3));
  CHECK(m.empirical_distortion == doctest::Approx(0.2).epsilon(0.025));
  CHECK(std::abs(m.empirical_distortion - 0.2) < 0.005);
  CHECK(std::abs(m.plug_in_equivocation_bits - kGammaAt02) < 0.02);
  // expected metrics derive from the empirical input, not the sample draw
  CHECK(m.theoretical_distortion == doctest::Approx(0.2).epsilon(0.01));
  CHECK(m.theoretical_equivocation_bits == doctest::Approx(kGammaAt02).epsilon(0.01));
}

TEST_CASE("quantile bins") {
  std::vector<double> values;
  for (int i = 0; i < 100; ++i) values.push_back(double(i));
  QuantileBins bins = quantile_bins(values, 4);
  CHECK(bins.alphabet.size() == 4);
  CHECK(bins.bin(0.0) == 0);
  CHECK(bins.bin(30.0) == 1);
  CHECK(bins.bin(99.0) == 3);
  // repeated values collapse duplicate edges
  QuantileBins degenerate = quantile_bins(std::vector<double>(50, 1.0), 4);
  CHECK(degenerate.alphabet.size() == 1);
  CHECK_THROWS_AS(quantile_bins(std::vector<double>{}, 3), ValidationError);
}

TEST_CASE("join_columns validates row counts") {
  std::istringstream in1("zip,diag\n10001,flu\n10002,ok\n");
  Table a = ingest_csv(in1, two_col_schema());
  Table b = a;
  b.schema[0].name = "zip2";
  b.schema[1].name = "diag2";
  Table joined = join_columns(a, b);
  CHECK(joined.n_cols() == 4);
  b.cells.resize(2);
  CHECK_THROWS_AS(join_columns(a, b), ValidationError);
}
