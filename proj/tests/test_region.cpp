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
#include <random>

#include "rde/closed_form.hpp"
#include "rde/oracle.hpp"
#include "rde/rd.hpp"
#include "rde/region.hpp"
#include "test_support.hpp"

using namespace rde;
using namespace rde::testing;

namespace {

SolverConfig fast_config() {
  SolverConfig cfg;
  cfg.multistarts = 8;
  cfg.max_iters = 2500;
  return cfg;
}

}  // namespace

TEST_CASE("problem validation and landmarks") {
  CHECK_THROWS_AS(PrivacyProblem(JointPmf::from_pmf(census_pmf(), "x", AxisRole::kPublic),
                                 DistortionSpec::hamming(3)),
                  ValidationError);  // no private axis
  PrivacyProblem census = census_problem();
  CHECK(census.u_cardinality() == 5);  // |X| + 2 by default
  CHECK(census.private_entropy() == doctest::Approx(kCensusEntropy));
  CHECK(census.equivocation_floor() == doctest::Approx(0.0));
  CHECK(census.equivocation_ceiling() == doctest::Approx(kCensusEntropy));
  CHECK(census.max_useful_distortion() == doctest::Approx(0.5));

  PrivacyProblem side = side_info_problem();
  // landmarks computed from the joint by hand
  CHECK(side.private_entropy() == doctest::Approx(0.934068055375491).epsilon(1e-12));
  CHECK(side.equivocation_ceiling() == doctest::Approx(0.761637917211438).epsilon(1e-12));
  CHECK(side.equivocation_floor() == doctest::Approx(0.4776972317545894).epsilon(1e-12));
  CHECK(side.max_useful_distortion() == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("equivocation of a channel") {
  PrivacyProblem census = census_problem(3);
  Alphabet x = census.joint().axis(0).alphabet;
  SUBCASE("constant description leaks nothing") {
    Channel c = Channel::constant(x, Alphabet::indexed("u", 3), 0);
    CHECK(equivocation(census, c) == doctest::Approx(kCensusEntropy).epsilon(1e-12));
    CHECK(rate_objective(census, c) == doctest::Approx(0.0));
  }
  SUBCASE("identity description leaks everything") {
    CHECK(equivocation(census, Channel::identity(x)) == doctest::Approx(0.0));
  }
  SUBCASE("perfect side information forces zero equivocation") {
    // z copies x_h exactly
    Axis xh{"xh", Alphabet::indexed("h", 2), AxisRole::kBoth};
    Axis z{"z", Alphabet::indexed("z", 2), AxisRole::kSideInfo};
    JointPmf j({xh, z}, {0.3, 0.0, 0.0, 0.7});
    PrivacyProblem prob(j, DistortionSpec::hamming(2), 2);
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 10; ++rep) {
      Channel c = random_channel(xh.alphabet, Alphabet::indexed("u", 2), rng);
      CHECK(equivocation(prob, c) == doctest::Approx(0.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("rate objective") {
  SUBCASE("census binary uniform through a 0.1 flip") {
    PrivacyProblem prob = binary_census_problem(2);
    Alphabet x = prob.joint().axis(0).alphabet;
    CHECK(rate_objective(prob, Channel::bsc(x, 0.1)) ==
          doctest::Approx(kBscMi_01).epsilon(1e-10));
  }
  SUBCASE("independent side information does not change the rate") {
    PrivacyProblem with_z = side_info_problem(3, /*z_independent=*/true);
    Axis xr{"xr", Alphabet::indexed("r", 2), AxisRole::kPublic};
    Axis xh{"xh", Alphabet::indexed("h", 2), AxisRole::kPrivate};
    JointPmf no_z_joint({xr, xh}, {0.35, 0.25, 0.0, 0.40});
    PrivacyProblem no_z(no_z_joint, DistortionSpec::hamming(2), 3);
    std::mt19937_64 rng(4);
    Alphabet in = product_alphabet(with_z.joint(), with_z.attribute_axes());
    for (int rep = 0; rep < 10; ++rep) {
      Channel c = random_channel(in, Alphabet::indexed("u", 3), rng);
      CHECK(rate_objective(with_z, c) ==
            doctest::Approx(rate_objective(no_z, c)).epsilon(1e-9));
      CHECK(rate_objective(with_z, c) >= -1e-12);
    }
  }
}

TEST_CASE("optimal decoder") {
  SUBCASE("identity channel decodes identically") {
    PrivacyProblem census = census_problem(3);
    Decoder dec = optimal_decoder(census, Channel::identity(census.joint().axis(0).alphabet));
    for (std::size_t u = 0; u < 3; ++u) CHECK(dec.at(u, 0) == u);
  }
  SUBCASE("constant channel decodes to the mode") {
    PrivacyProblem census = census_problem(3);
    Channel c = Channel::constant(census.joint().axis(0).alphabet,
                                  Alphabet::indexed("u", 3), 1);
    Decoder dec = optimal_decoder(census, c);
    CHECK(dec.at(1, 0) == 0);  // mode of (1/2, 1/4, 1/4)
    CHECK(dec.at(0, 0) == 0);  // dead symbol defaults to index 0
  }
  SUBCASE("constant description with noisy side information follows the MAP rule") {
    // z is a noisy copy of binary uniform x_r (crossover 0.2); with U
    // constant the decoder can only use z, and picking xhat = z minimizes
    // the expected Hamming cost. Verified by enumerating both choices.
    Axis xr{"xr", Alphabet::indexed("r", 2), AxisRole::kPublic};
    Axis xh{"xh", Alphabet::indexed("h", 2), AxisRole::kPrivate};
    Axis z{"z", Alphabet::indexed("z", 2), AxisRole::kSideInfo};
    std::vector<double> probs;
    for (int r = 0; r < 2; ++r)
      for (int h = 0; h < 2; ++h)
        for (int zz = 0; zz < 2; ++zz)
          probs.push_back(0.25 * (zz == r ? 0.8 : 0.2));
    PrivacyProblem prob(JointPmf({xr, xh, z}, probs), DistortionSpec::hamming(2), 2);
    Channel c = Channel::constant(product_alphabet(prob.joint(), prob.attribute_axes()),
                                  Alphabet::indexed("u", 2), 0);
    // exhaustive cross-check of the two candidate reconstructions per z
    for (int zz = 0; zz < 2; ++zz) {
      double cost0 = zz == 0 ? 0.2 : 0.8;  // P(x_r = 1 | z) etc.
      double cost1 = zz == 0 ? 0.8 : 0.2;
      CHECK((cost0 < cost1 ? 0 : 1) == zz);
    }
    Decoder dec = optimal_decoder(prob, c);
    CHECK(dec.at(0, 0) == 0);
    CHECK(dec.at(0, 1) == 1);
  }
}

TEST_CASE("gamma endpoints on the census case") {
  PrivacyProblem census = census_problem();
  SolverConfig cfg = fast_config();
  SUBCASE("slack distortion gives full equivocation at zero rate") {
    RegionPoint pt = gamma_of_d(census, 0.6, cfg);
    CHECK(pt.equivocation == doctest::Approx(kCensusEntropy).epsilon(1e-9));
    CHECK(pt.rate == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("zero distortion gives zero equivocation") {
    // the 1e-9 feasibility slack admits equivocations of order
    // slack * log(1/slack), so allow a little more than the slack itself
    RegionPoint pt = gamma_of_d(census, 0.0, cfg);
    CHECK(pt.equivocation >= 0.0);
    CHECK(pt.equivocation <= 1e-6);
  }
  SUBCASE("negative distortion is rejected") {
    CHECK_THROWS_AS(gamma_of_d(census, -0.1, cfg), ArgumentError);
  }
}

TEST_CASE("census gamma matches the closed form at D = 0.2") {
  RegionPoint pt = gamma_of_d(census_problem(), 0.2, fast_config());
  CHECK(pt.equivocation == doctest::Approx(kGammaAt02).epsilon(1e-5));
  CHECK(pt.distortion <= 0.2 + 1e-9);
}

TEST_CASE("r_of_de census cases") {
  SolverConfig cfg = fast_config();
  SUBCASE("exact disclosure of a uniform bit costs one bit") {
    PrivacyProblem prob = binary_census_problem();
    RegionPoint pt = r_of_de(prob, 0.0, 0.0, cfg);
    CHECK(pt.rate == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("any feasible floor prices at R(D)") {
    PrivacyProblem prob = census_problem();
    DistortionSpec d3 = DistortionSpec::hamming(3);
    for (double dd : {0.1, 0.3}) {
      RDPoint rd = rd_point_at_distortion(census_pmf(), d3, dd);
      WaterfillSolution wf = hamming_waterfill(census_pmf(), dd);
      for (double frac : {0.0, 0.9}) {
        RegionPoint pt = r_of_de(prob, dd, frac * wf.gamma_exact_bits, cfg);
        CHECK(pt.rate == doctest::Approx(rd.rate).epsilon(1e-3));
      }
    }
  }
  SUBCASE("infeasible floor carries the gamma estimate") {
    PrivacyProblem prob = census_problem();
    try {
      r_of_de(prob, 0.1, 1.2, cfg);
      FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
      REQUIRE(e.gamma_estimate.has_value());
      WaterfillSolution wf = hamming_waterfill(census_pmf(), 0.1);
      CHECK(*e.gamma_estimate == doctest::Approx(wf.gamma_exact_bits).epsilon(1e-4));
    }
  }
  SUBCASE("floor outside [0, H(X_h)] is rejected") {
    PrivacyProblem prob = census_problem();
    CHECK_THROWS_AS(r_of_de(prob, 0.1, 1.8, cfg), ArgumentError);
  }
}

TEST_CASE("side information reductions") {
  SolverConfig cfg = fast_config();
  PrivacyProblem with_z = side_info_problem(3, /*z_independent=*/true);
  Axis xr{"xr", Alphabet::indexed("r", 2), AxisRole::kPublic};
  Axis xh{"xh", Alphabet::indexed("h", 2), AxisRole::kPrivate};
  PrivacyProblem no_z(JointPmf({xr, xh}, {0.35, 0.25, 0.0, 0.40}),
                      DistortionSpec::hamming(2), 3);
  RegionPoint g1 = gamma_of_d(with_z, 0.15, cfg);
  RegionPoint g2 = gamma_of_d(no_z, 0.15, cfg);
  CHECK(g1.equivocation == doctest::Approx(g2.equivocation).epsilon(1e-3));
  RegionPoint r1 = r_of_de(with_z, 0.15, 0.3, cfg);
  RegionPoint r2 = r_of_de(no_z, 0.15, 0.3, cfg);
  CHECK(r1.rate == doctest::Approx(r2.rate).epsilon(1e-3));
}

TEST_CASE("feasibility window") {
  SolverConfig cfg = fast_config();
  PrivacyProblem prob = side_info_problem();
  double lo = prob.equivocation_floor();
  double hi = prob.equivocation_ceiling();
  for (double dd : {0.1, 0.2, 0.3}) {
    RegionPoint g = gamma_of_d(prob, dd, cfg);
    CHECK(g.equivocation >= lo - 1e-9);
    CHECK(g.equivocation <= hi + 1e-9);
    RegionPoint r = r_of_de(prob, dd, 0.5 * (lo + g.equivocation), cfg);
    CHECK(r.equivocation >= lo - 1e-9);
    CHECK(r.equivocation <= hi + 1e-9);
  }
}

TEST_CASE("markov-restricted solver") {
  SolverConfig cfg = fast_config();
  SUBCASE("independent attributes pin equivocation at H(X_h)") {
    Axis xr{"xr", Alphabet::indexed("r", 2), AxisRole::kPublic};
    Axis xh{"xh", Alphabet::indexed("h", 2), AxisRole::kPrivate};
    JointPmf j({xr, xh}, {0.6 * 0.3, 0.6 * 0.7, 0.4 * 0.3, 0.4 * 0.7});
    PrivacyProblem prob(j, DistortionSpec::hamming(2), 2);
    double hh = prob.private_entropy();
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 10; ++rep) {
      Channel c = random_channel(Alphabet::indexed("r", 2), Alphabet::indexed("u", 2), rng);
      CHECK(equivocation(prob, c) == doctest::Approx(hh).epsilon(1e-9));
    }
    RegionPoint pt = r_of_de_markov(prob, 0.1, 0.5 * hh, cfg);
    CHECK(pt.equivocation == doctest::Approx(hh).epsilon(1e-9));
  }
  SUBCASE("census restricted equals unrestricted") {
    PrivacyProblem prob = census_problem();
    RegionPoint a = r_of_de(prob, 0.2, 0.5, cfg);
    RegionPoint b = r_of_de_markov(prob, 0.2, 0.5, cfg);
    CHECK(a.rate == doctest::Approx(b.rate).epsilon(1e-9));
  }
  SUBCASE("correlated pair matches an exhaustive scan over p(u|x_r)") {
    Axis xr{"xr", Alphabet::indexed("r", 2), AxisRole::kPublic};
    Axis xh{"xh", Alphabet::indexed("h", 2), AxisRole::kPrivate};
    JointPmf j({xr, xh}, {0.4, 0.1, 0.15, 0.35});
    PrivacyProblem prob(j, DistortionSpec::hamming(2), 2);
    double dd = 0.2, ee = 0.55;
    // grid scan over restricted channels using the public evaluators
    OracleConfig oc{0.02, 1e7};
    double best = 1e9;
    enumerate_channels(2, 2, oc, [&](std::span<const double> m) {
      Channel c(Alphabet::indexed("r", 2), Alphabet::indexed("u", 2),
                std::vector<double>(m.begin(), m.end()));
      Decoder dec = optimal_decoder(prob, c);
      // decoder distortion under the restricted channel
      JointPmf lifted = push_forward(prob.joint(), c, std::vector<std::size_t>{0},
                                     "u", AxisRole::kAuxiliary);
      double dist = 0.0;
      const auto& probs = lifted.probs();
      // axes: xr, xh, u with u fastest
      for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t h = 0; h < 2; ++h)
          for (std::size_t u = 0; u < 2; ++u)
            dist += probs[(r * 2 + h) * 2 + u] * (dec.at(u, 0) != r ? 1.0 : 0.0);
      if (dist <= dd + 1e-12 && equivocation(prob, c) >= ee - 1e-12) {
        best = std::min(best, rate_objective(prob, c));
      }
    });
    RegionPoint pt = r_of_de_markov(prob, dd, ee, cfg);
    CHECK(pt.rate <= best + 1e-6);          // solver at least as good as the grid
    CHECK(pt.rate >= best - 0.08);          // and within the grid's resolution
    RegionPoint un = r_of_de(prob, dd, ee, cfg);
    CHECK(pt.rate >= un.rate - 1e-9);       // restriction cannot help
  }
}

TEST_CASE("solver agrees with the oracle on a tiny instance") {
  SolverConfig cfg = fast_config();
  OracleConfig oc{0.1, 1e6};
  PrivacyProblem prob = side_info_problem(3);
  double dd = 0.15;
  OracleReport og = oracle_gamma(prob, dd, oc);
  RegionPoint sg = gamma_of_d(prob, dd, cfg);
  CHECK(sg.equivocation >= og.value - 1e-6);
  CHECK(sg.equivocation <= og.value + og.continuity_gap);
  double ee = 0.5 * (prob.equivocation_floor() + sg.equivocation);
  OracleReport orate = oracle_rate(prob, dd, ee, oc);
  RegionPoint sr = r_of_de(prob, dd, ee, cfg);
  CHECK(sr.rate <= orate.value + 1e-6);
  CHECK(sr.rate >= orate.value - orate.continuity_gap);
}

TEST_CASE("region curve") {
  SolverConfig cfg = fast_config();
  cfg.multistarts = 6;
  SUBCASE("single point at d_max is the free-privacy corner") {
    PrivacyProblem prob = census_problem();
    RegionCurve curve = region_curve(prob, std::vector<double>{0.5},
                                     std::vector<double>{0.0}, cfg);
    REQUIRE(!curve.entries.empty());
    const RegionCurveEntry& boundary = curve.entries.front();
    CHECK(boundary.on_gamma_boundary);
    CHECK(boundary.point.rate == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(boundary.point.equivocation == doctest::Approx(kCensusEntropy).epsilon(1e-9));
  }
  SUBCASE("binary uniform boundary follows h2(D)") {
    PrivacyProblem prob = binary_census_problem();
    std::vector<double> d_grid;
    for (int i = 1; i <= 8; ++i) d_grid.push_back(0.5 * i / 8.0);
    RegionCurve curve = region_curve(prob, d_grid, std::vector<double>{}, cfg);
    for (const auto& e : curve.entries) {
      if (!e.on_gamma_boundary) continue;
      double analytic = binary_entropy(std::min(e.target_distortion, 0.5));
      CHECK(e.point.equivocation == doctest::Approx(analytic).epsilon(2e-4));
    }
  }
  SUBCASE("surface monotone in both arguments") {
    PrivacyProblem prob = census_problem();
    std::vector<double> d_grid = {0.05, 0.15, 0.25, 0.35, 0.45};
    std::vector<double> e_grid = {0.1, 0.4, 0.7, 1.0, 1.3};
    RegionCurve curve = region_curve(prob, d_grid, e_grid, cfg);
    auto rate_at = [&](double dd, double ee) -> const RegionPoint* {
      for (const auto& e : curve.entries) {
        if (!e.on_gamma_boundary && e.target_distortion == dd &&
            e.target_equivocation == ee) {
          return &e.point;
        }
      }
      return nullptr;
    };
    for (std::size_t i = 0; i < d_grid.size(); ++i) {
      for (std::size_t j = 0; j < e_grid.size(); ++j) {
        const RegionPoint* here = rate_at(d_grid[i], e_grid[j]);
        if (here == nullptr) continue;
        if (i > 0) {
          const RegionPoint* left = rate_at(d_grid[i - 1], e_grid[j]);
          if (left != nullptr) CHECK(here->rate <= left->rate + 1e-6);
        }
        if (j > 0) {
          const RegionPoint* down = rate_at(d_grid[i], e_grid[j - 1]);
          if (down != nullptr) CHECK(here->rate >= down->rate - 1e-6);
        }
      }
    }
    // gamma boundary is non-decreasing
    double prev = -1.0;
    for (const auto& e : curve.entries) {
      if (!e.on_gamma_boundary) continue;
      CHECK(e.point.equivocation >= prev - 1e-9);
      prev = e.point.equivocation;
    }
  }
  SUBCASE("unsorted grids are rejected") {
    PrivacyProblem prob = census_problem();
    CHECK_THROWS_AS(region_curve(prob, std::vector<double>{0.3, 0.1},
                                 std::vector<double>{}, cfg),
                    ArgumentError);
  }
  SUBCASE("side-information surface carries z-aware decoders") {
    PrivacyProblem prob = side_info_problem();
    RegionCurve curve = region_curve(prob, std::vector<double>{0.1, 0.25},
                                     std::vector<double>{0.55, 0.7}, cfg);
    CHECK(curve.skipped.empty());
    std::size_t surface_points = 0;
    for (const auto& e : curve.entries) {
      CHECK(e.point.decoder.n_z == 2);
      CHECK(e.point.decoder.map.size() == e.point.decoder.n_u * 2);
      if (!e.on_gamma_boundary) {
        ++surface_points;
        CHECK(e.point.equivocation >= e.target_equivocation - 1e-9);
        CHECK(e.point.distortion <= e.target_distortion + 1e-9);
      }
    }
    CHECK(surface_points >= 3);  // E = 0.7 is feasible at both distortions
  }
}

TEST_CASE("dominance of the equivocation constraint") {
  SolverConfig cfg = fast_config();
  PrivacyProblem prob = census_problem();
  RegionPoint base = r_of_de(prob, 0.2, 0.0, cfg);
  WaterfillSolution wf = hamming_waterfill(census_pmf(), 0.2);
  // at floors below the rate-distortion-optimal channel's equivocation the
  // price does not move
  RegionPoint same = r_of_de(prob, 0.2, 0.9 * wf.gamma_exact_bits, cfg);
  CHECK(same.rate >= base.rate - 1e-9);
  CHECK(same.rate == doctest::Approx(base.rate).epsilon(1e-4));
}
