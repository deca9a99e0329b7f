#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "tow/analysis.hpp"
#include "tow/solver.hpp"

using tow::ConePair;
using tow::CoupledField;
using tow::DomainSpec;
using tow::ModePair;
using tow::ProblemSpec;
using tow::Vec;

namespace {

ModePair example_pair() {
  return ModePair::from_functions(
      2, [](const Vec& x) { return tow::example1(x, 2).first; },
      [](const Vec& x) { return tow::example1(x, 2).second; });
}

ModePair cone_pair(const ConePair& cone) {
  return ModePair::from_functions(
      2, [cone](const Vec& x) { return tow::cone_eval(cone, x).first; },
      [cone](const Vec& x) { return tow::cone_eval(cone, x).second; });
}

// One coarse solved disk shared by the lattice-backed checks.
const CoupledField& solved_disk() {
  static const CoupledField field = [] {
    ProblemSpec spec;
    spec.domain = DomainSpec::make_ball({0.0, 0.0}, 0.5);
    spec.generator = oracle::symmetric_2state();
    spec.g = {[](const Vec& p) { return tow::example1(p, 2).first; },
              [](const Vec& p) { return tow::example1(p, 2).second; }};
    spec.eps = 0.1;
    spec.h = 0.05;
    spec.D = 32;
    spec.tol = 1e-7;
    return tow::solve(spec).field;
  }();
  return field;
}

}  // namespace

TEST_CASE("sphere slopes of the closed form match their frozen values", "[analysis]") {
  ModePair pair = example_pair();
  tow::SlopeReport half = tow::slope_stats(pair, {0.0, 0.0}, 0.5);
  tow::SlopeReport one = tow::slope_stats(pair, {0.0, 0.0}, 1.0);

  CHECK(std::abs(half.u0[0] - oracle::kV1At0) < 1e-12);
  CHECK(std::abs(half.s_plus[0] - oracle::kS1PlusAtHalf) < 1e-12);
  CHECK(std::abs(one.s_plus[0] - oracle::kS1PlusAtOne) < 1e-12);
  CHECK(std::abs(half.sc_plus[0] - oracle::kSC1PlusAtHalf) < 1e-12);
  CHECK(std::abs(one.sc_plus[0] - oracle::kSC1PlusAtOne) < 1e-12);

  CHECK(half.s_plus[1] == -half.s_minus[0]);
  CHECK(half.samples == 256);
}

TEST_CASE("the single-mode slope ladder of the closed form decreases", "[analysis]") {
  ModePair pair = example_pair();
  std::vector<double> ladder;
  for (double r : {0.25, 0.5, 0.75, 1.0})
    ladder.push_back(tow::slope_stats(pair, {0.0, 0.0}, r).s_plus[0]);
  for (std::size_t k = 1; k < ladder.size(); ++k) CHECK(ladder[k] < ladder[k - 1]);
}

TEST_CASE("the coupled two-radius inequality is tight on the closed form", "[analysis]") {
  ModePair pair = example_pair();
  tow::LemmaSlack slack = tow::check_lemma_Ll(pair, {0.0, 0.0}, 0.5, 1.0);
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(slack.plus[i]) < 1e-9);
    CHECK(std::abs(slack.minus[i]) < 1e-9);
  }
}

TEST_CASE("equal constants have identically zero slack", "[analysis]") {
  ModePair pair = ModePair::from_functions(
      2, [](const Vec&) { return 0.7; }, [](const Vec&) { return 0.7; });
  tow::LemmaSlack slack = tow::check_lemma_Ll(pair, {0.0, 0.0}, 0.3, 0.9);
  for (int i = 0; i < 2; ++i) {
    CHECK(slack.plus[i] == 0.0);
    CHECK(slack.minus[i] == 0.0);
  }
}

TEST_CASE("vertex-centered cone pairs attain equality in the slope inequality", "[analysis]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> radius(0.3, 1.2);
  std::uniform_real_distribution<double> frac(0.1, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    ConePair cone = oracle::random_cone(rng);
    double r = radius(rng);
    double s = r * frac(rng);
    tow::LemmaSlack slack = tow::check_lemma_Ll(cone_pair(cone), cone.vertex, s, r, 64);
    for (int i = 0; i < 2; ++i) {
      CHECK(std::abs(slack.plus[i]) < 1e-9);
      CHECK(std::abs(slack.minus[i]) < 1e-9);
    }
  }
}

TEST_CASE("lemma and ladder arguments are validated", "[analysis]") {
  ModePair pair = example_pair();
  CHECK_THROWS_AS(tow::check_lemma_Ll(pair, {0.0, 0.0}, 0.8, 0.5), tow::RadiusOrder);
  CHECK_THROWS_AS(tow::check_lemma_Ll(pair, {0.0, 0.0}, 0.0, 0.5), tow::NonpositiveRadius);
  CHECK_THROWS_AS(tow::slope_stats(pair, {0.0, 0.0}, 0.5, 8), tow::InvalidArgument);
  CHECK_THROWS_AS(tow::xi(0.0), tow::NonpositiveRadius);
  CHECK_THROWS_AS(tow::check_a_monotone(pair, {0.0, 0.0}, {0.5, 0.5}), tow::RadiusOrder);
  CHECK_THROWS_AS(tow::check_a_monotone(pair, {0.0, 0.0}, {0.5}), tow::InvalidArgument);
  CHECK_THROWS_AS(tow::blowup_deviation(pair, {0.0, 0.0}, {0.1, 0.2}), tow::RadiusOrder);
  CHECK_THROWS_AS(tow::blowup_deviation(pair, {0.0, 0.0}, {0.4}), tow::InvalidArgument);
  CHECK_THROWS_AS(tow::lipschitz_bound_check(pair, {0.0, 0.0}, 0.3, 0.0), tow::InvalidArgument);
}

TEST_CASE("the coupled mean slope is flat where it should be", "[analysis]") {
  tow::MonotoneAReport anti =
      tow::check_a_monotone(example_pair(), {0.0, 0.0}, {0.25, 0.5, 0.75, 1.0});
  for (double a : anti.a) CHECK(std::abs(a) < 1e-12);
  CHECK(anti.nondecreasing);
  CHECK(anti.tolerance == 1e-9);

  ConePair cone{{0.0, 0.0}, 0.1, -0.2, 0.3, 0.0};
  tow::MonotoneAReport rep = tow::check_a_monotone(cone_pair(cone), cone.vertex, {0.5, 1.0});
  for (double a : rep.a) CHECK(std::abs(a - 0.3) < 1e-12);
  CHECK(rep.nondecreasing);
}

TEST_CASE("fitted comparison cones dominate their own sources", "[analysis]") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    ConePair cone = oracle::random_cone(rng);
    CHECK(tow::cone_comparison_check(cone_pair(cone), cone.vertex, 0.8) <= 1e-12);
  }
  CHECK(tow::cone_comparison_check(example_pair(), {0.0, 0.0}, 1.0) <= 1e-10);
}

TEST_CASE("the gradient bound holds with the expected slack", "[analysis]") {
  ModePair constant = ModePair::from_functions(
      2, [](const Vec&) { return 0.4; }, [](const Vec&) { return 0.4; });
  tow::LipschitzReport flat = tow::lipschitz_bound_check(constant, {0.0, 0.0}, 0.3, 1e-4);
  CHECK(flat.gradient_norm == 0.0);
  CHECK(flat.bound == 0.0);
  CHECK(flat.slack == 0.0);

  tow::LipschitzReport ex = tow::lipschitz_bound_check(example_pair(), {0.5, 0.0}, 0.4, 1e-4);
  CHECK(std::abs(ex.gradient_norm - oracle::kGradV1AtHalf) < 1e-6);
  CHECK(ex.slack > 0.0);

  ModePair line = ModePair::from_functions(
      1, [](const Vec& x) { return 0.37 * x[0]; }, [](const Vec& x) { return 0.37 * x[0]; });
  tow::LipschitzReport affine = tow::lipschitz_bound_check(line, {0.2}, 0.3, 1e-4);
  CHECK(std::abs(affine.gradient_norm - 0.37) < 1e-10);
  CHECK(std::abs(affine.slack) < 1e-9);

  // A 2-D slope aligned with a sampled direction keeps the sphere max exact.
  Vec d = tow::probe_directions(2, 64)[5];
  Vec p = 0.7 * d;
  ModePair plane = ModePair::from_functions(
      2, [p](const Vec& x) { return tow::dot(p, x); },
      [p](const Vec& x) { return tow::dot(p, x); });
  tow::LipschitzReport aligned = tow::lipschitz_bound_check(plane, {0.1, -0.2}, 0.3, 1e-4, 64);
  CHECK(std::abs(aligned.slack) < 1e-9);
}

TEST_CASE("affine pairs rescale to themselves", "[analysis]") {
  ModePair line = ModePair::from_functions(
      1, [](const Vec& x) { return 0.6 * x[0] + 0.1; },
      [](const Vec& x) { return -0.2 * x[0] + 0.4; });
  tow::BlowupReport rep = tow::blowup_deviation(line, {0.2}, {0.4, 0.2, 0.1});
  for (int i = 0; i < 2; ++i)
    for (double res : rep.residual[i]) CHECK(res < 1e-12);
  CHECK(std::abs(rep.slope[0].back()[0] - 0.6) < 1e-9);
  CHECK(std::abs(rep.slope[1].back()[0] + 0.2) < 1e-9);
  CHECK(std::abs(rep.extrapolated_s_plus[0] - 0.6) < 1e-9);

  ModePair plane = ModePair::from_functions(
      2, [](const Vec& x) { return 0.3 * x[0] - 0.5 * x[1]; },
      [](const Vec& x) { return 0.1 * x[0] + 0.2 * x[1] - 1.0; });
  tow::BlowupReport rep2 = tow::blowup_deviation(plane, {0.1, 0.3}, {0.4, 0.2});
  for (int i = 0; i < 2; ++i)
    for (double res : rep2.residual[i]) CHECK(res < 1e-12);
  CHECK(std::abs(rep2.slope[0].back()[0] - 0.3) < 1e-9);
  CHECK(std::abs(rep2.slope[0].back()[1] + 0.5) < 1e-9);

  tow::SymmetricSlopeReport sym = tow::symmetric_slope_check(line, {0.2}, {0.4, 0.2, 0.1});
  CHECK(sym.defect[0] < 1e-12);
  CHECK(sym.defect[1] < 1e-12);
}

TEST_CASE("blowups of the closed form converge at the expected rate", "[analysis]") {
  ModePair pair = example_pair();
  std::vector<double> radii = {0.4, 0.2, 0.1, 0.05};

  tow::BlowupReport smooth = tow::blowup_deviation(pair, {0.5, 0.0}, radii);
  for (int i = 0; i < 2; ++i) {
    CHECK(smooth.residuals_decreasing[i]);
    for (std::size_t k = 1; k < radii.size(); ++k)
      CHECK(smooth.residual[i][k] <= 0.7 * smooth.residual[i][k - 1]);
    CHECK(std::abs(tow::norm(smooth.slope[i].back()) - oracle::kGradV1AtHalf) < 1e-3);
  }
  CHECK(std::abs(smooth.extrapolated_s_plus[0] - oracle::kGradV1AtHalf) < 1e-3);

  // Equal exchange coefficients and no linear part make the vertex smooth.
  tow::BlowupReport vertex = tow::blowup_deviation(pair, {0.0, 0.0}, radii);
  CHECK(vertex.residuals_decreasing[0]);
  CHECK(tow::norm(vertex.slope[0].back()) < 1e-3);
  CHECK(std::abs(vertex.extrapolated_s_plus[0]) < 1e-3);

  for (int i = 0; i < 2; ++i)
    for (std::size_t k = 1; k < radii.size(); ++k) {
      CHECK(smooth.running_sup[i][k - 1] >= smooth.running_sup[i][k]);
      double sup = smooth.s_plus[i][k];
      for (std::size_t j = k; j < radii.size(); ++j)
        sup = std::max(sup, smooth.s_plus[i][j]);
      CHECK(smooth.running_sup[i][k] == sup);
    }
}

TEST_CASE("extrapolated slopes of the closed form are antisymmetric", "[analysis]") {
  tow::SymmetricSlopeReport rep =
      tow::symmetric_slope_check(example_pair(), {0.5, 0.0}, {0.2, 0.1, 0.05});
  CHECK(std::abs(rep.s_plus[0] - oracle::kGradV1AtHalf) < 1e-3);
  CHECK(std::abs(rep.s_minus[0] + oracle::kGradV1AtHalf) < 1e-3);
  CHECK(rep.defect[0] < 1e-3);
  CHECK(rep.defect[1] < 1e-3);
}

TEST_CASE("solved fields satisfy the lemma checks within lattice tolerance", "[analysis]") {
  ModePair pair = ModePair::from_field(solved_disk());
  double h = pair.h;
  REQUIRE(h == 0.05);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> offset(-0.2, 0.2);
  std::uniform_real_distribution<double> radius(0.1, 0.21);
  std::uniform_real_distribution<double> frac(0.3, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    Vec x0{offset(rng), offset(rng)};
    double r = radius(rng);
    double s = r * frac(rng);
    tow::LemmaSlack slack = tow::check_lemma_Ll(pair, x0, s, r);
    for (int i = 0; i < 2; ++i) {
      CHECK(slack.plus[i] >= -5 * h);
      CHECK(slack.minus[i] >= -5 * h);
    }
  }

  tow::MonotoneAReport mono = tow::check_a_monotone(pair, {0.0, 0.0}, {0.2, 0.3, 0.4});
  CHECK(mono.tolerance == 5 * h);
  CHECK(mono.nondecreasing);

  CHECK(tow::cone_comparison_check(pair, {0.1, 0.0}, 0.3) <= 5 * h);

  tow::SymmetricSlopeReport sym = tow::symmetric_slope_check(pair, {0.0, 0.0}, {0.4, 0.3, 0.2});
  CHECK(sym.defect[0] <= 10 * h);
  CHECK(sym.defect[1] <= 10 * h);

  CHECK_THROWS_AS(tow::check_lemma_Ll(pair, {0.4, 0.0}, 0.1, 0.3), tow::BallNotContained);
  CHECK_THROWS_AS(tow::blowup_deviation(pair, {0.0, 0.0}, {0.3, 0.1}), tow::InvalidArgument);
}
