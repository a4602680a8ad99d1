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

#include <cstdio>
#include <random>
#include <sstream>

#include "rde/io.hpp"
#include "test_support.hpp"

using namespace rde;
using namespace rde::testing;

TEST_CASE("channel json round trip is bitwise exact") {
  std::mt19937_64 rng(21);
  Channel c = random_channel(Alphabet::indexed("x", 3), Alphabet::indexed("u", 4), rng);
  Json j = Json::parse(to_json(c).dump());
  Channel back = channel_from_json(j);
  CHECK(back.matrix() == c.matrix());  // exact doubles
  CHECK(back.input_alphabet() == c.input_alphabet());
  CHECK(back.output_alphabet() == c.output_alphabet());
}

TEST_CASE("pmf and joint json round trip") {
  Json j = Json::parse(to_json(census_pmf()).dump());
  Pmf p = pmf_from_json(j);
  CHECK(p.probs() == census_pmf().probs());

  std::mt19937_64 rng(22);
  JointPmf joint = random_joint({Axis{"a", Alphabet::indexed("a", 2), AxisRole::kPublic},
                                 Axis{"b", Alphabet::indexed("b", 3), AxisRole::kPrivate},
                                 Axis{"z", Alphabet::indexed("z", 2), AxisRole::kSideInfo}},
                                rng);
  JointPmf back = joint_from_json(Json::parse(to_json(joint).dump()));
  CHECK(back.probs() == joint.probs());
  CHECK(back.axis(2).role == AxisRole::kSideInfo);
}

TEST_CASE("region point json carries the bound type and certificate") {
  PrivacyProblem prob = census_problem();
  SolverConfig cfg;
  cfg.multistarts = 4;
  cfg.max_iters = 800;
  RegionPoint pt = gamma_of_d(prob, 0.2, cfg);
  Json j = to_json(pt);
  CHECK(j.at("bound_type") == "achievable");
  CHECK(j.at("rate").is_number());
  CHECK(j.at("distortion").is_number());
  CHECK(j.at("equivocation").is_number());
  CHECK(j.at("channel").contains("probs"));
  CHECK(j.at("decoder").is_array());
  CHECK(j.at("decoder").size() == pt.decoder.map.size());
}

TEST_CASE("distortion spec json round trip") {
  DistortionSpec d = DistortionSpec::hamming(3);
  DistortionSpec back = distortion_from_json(Json::parse(to_json(d).dump()));
  CHECK(back.matrix() == d.matrix());
  CHECK(back.name() == "hamming");
}

TEST_CASE("schema parse errors") {
  CHECK_THROWS_AS(pmf_from_json(Json::object()), ValidationError);
  CHECK_THROWS_AS(axes_from_json(Json::parse(R"({"axes": []})")), ValidationError);
  CHECK_THROWS_AS(
      axis_from_json(Json::parse(R"({"name":"x","role":"nope","labels":["a"]})")),
      ValidationError);
  CHECK_THROWS_AS(pmf_from_json(Json::parse(
                      R"({"axes":[{"name":"x","role":"both","labels":["a","b"]}],
                          "probs":[0.5,0.4]})")),
                  ValidationError);
}

TEST_CASE("csv writers") {
  SUBCASE("empty curve emits the header only") {
    std::ostringstream out;
    write_waterfill_curve_csv(out, {});
    CHECK(out.str() == "D,gamma_exact_bits,gamma_formula_bits\n");
  }
  SUBCASE("accuracy curve rows") {
    std::ostringstream out;
    std::vector<AccuracyPoint> pts = {{0.1, 10.0}, {1.0, 1.0}};
    write_accuracy_curve_csv(out, pts);
    CHECK(out.str() == "epsilon,expected_abs_error\n0.1,10\n1,1\n");
  }
  SUBCASE("12 significant digits") {
    CHECK(format_sig12(0.9219280948873623) == "0.921928094887");
    CHECK(format_sig12(1.0) == "1");
  }
  SUBCASE("rd curve") {
    std::ostringstream out;
    std::vector<RDPoint> pts;
    pts.push_back(RDPoint{0.5, 0.25, 2.0, Channel::identity(Alphabet::indexed("x", 2))});
    write_rd_curve_csv(out, pts);
    CHECK(out.str() == "distortion,rate_bits,slope\n0.25,0.5,2\n");
  }
}

TEST_CASE("file io reports the path on failure") {
  CHECK_THROWS_WITH_AS(load_json_file("/nonexistent/p.json"),
                       doctest::Contains("/nonexistent/p.json"), ValidationError);
  CHECK_THROWS_WITH_AS(save_json_file("/nonexistent/p.json", Json::object()),
                       doctest::Contains("/nonexistent/p.json"), ValidationError);
}

TEST_CASE("json file round trip") {
  std::string path = "io_roundtrip_tmp.json";
  save_json_file(path, to_json(census_pmf()));
  Pmf p = pmf_from_json(load_json_file(path));
  CHECK(p.probs() == census_pmf().probs());
  std::remove(path.c_str());
}

TEST_CASE("oracle report json carries the documented fields") {
  OracleConfig cfg{0.25, 1e5};
  OracleReport rep = oracle_rd(Pmf(Alphabet::indexed("x", 2), {0.5, 0.5}),
                               DistortionSpec::hamming(2), 0.25, cfg);
  Json j = to_json(rep);
  for (const char* key : {"value", "channel", "quantization_step",
                          "enumeration_count", "continuity_gap",
                          "distortion_slack", "value_relaxed"}) {
    CHECK(j.contains(key));
  }
}
