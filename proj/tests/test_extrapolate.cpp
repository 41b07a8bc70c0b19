#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kis/extrapolate.hpp"

using namespace kis;

namespace {

GapCurve synthetic_curve(const std::vector<double>& gammas,
                         const std::vector<double>& gaps, bool converged = true) {
  GapCurve curve;
  curve.L = 10;
  curve.h_x = 0.8168;
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    GapResult r;
    r.gamma = gammas[k];
    r.g = gaps[k];
    r.converged = converged;
    curve.points.push_back(r);
  }
  return curve;
}

}  // namespace

TEST_CASE("exact quadratic data is reproduced to machine precision") {
  const double c0 = 0.14, c1 = 0.9, c2 = -1.7;
  std::vector<double> gam = {0.02, 0.04, 0.06, 0.08, 0.10, 0.12};
  std::vector<double> g;
  for (double x : gam) g.push_back(c0 + c1 * x + c2 * x * x);
  auto res = quadratic_extrapolate(synthetic_curve(gam, g));
  CHECK(std::abs(res.gbar - c0) < 1e-12);
  CHECK(std::abs(res.c1 - c1) < 1e-10);
  CHECK(std::abs(res.c2 - c2) < 1e-9);
  CHECK(res.points_used == 6);
  CHECK_FALSE(res.suspicious);
}

TEST_CASE("planted intercept 0.1 with 1e-4 noise lands within 1e-3") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> noise(0.0, 1e-4);
  std::vector<double> gam, g;
  for (int k = 1; k <= 10; ++k) {
    double x = 0.012 * k;
    gam.push_back(x);
    g.push_back(0.1 + 0.8 * x + 0.5 * x * x + noise(rng));
  }
  auto res = quadratic_extrapolate(synthetic_curve(gam, g));
  CHECK(std::abs(res.gbar - 0.1) < 1e-3);
}

TEST_CASE("fit scales linearly with the data") {
  std::vector<double> gam = {0.02, 0.05, 0.08, 0.11, 0.14};
  std::vector<double> g = {0.11, 0.13, 0.18, 0.22, 0.30};
  auto base = quadratic_extrapolate(synthetic_curve(gam, g));
  std::vector<double> scaled;
  for (double v : g) scaled.push_back(3.0 * v);
  auto res = quadratic_extrapolate(synthetic_curve(gam, scaled));
  CHECK(res.gbar == doctest::Approx(3.0 * base.gbar).epsilon(1e-12));
  CHECK(res.c1 == doctest::Approx(3.0 * base.c1).epsilon(1e-12));
}

TEST_CASE("unconverged points are excluded by default") {
  std::vector<double> gam = {0.02, 0.04, 0.06, 0.08, 0.10, 0.12};
  std::vector<double> g;
  for (double x : gam) g.push_back(0.14 + x);
  auto curve = synthetic_curve(gam, g);
  curve.points[5].converged = false;
  curve.points[5].g = 99.0;  // junk that would wreck the fit if included
  auto res = quadratic_extrapolate(curve);
  CHECK(res.points_used == 5);
  CHECK(std::abs(res.gbar - 0.14) < 1e-10);
}

TEST_CASE("negative intercept is flagged suspicious") {
  std::vector<double> gam = {0.02, 0.04, 0.06, 0.08};
  std::vector<double> g = {-0.05, -0.03, -0.01, 0.01};
  auto res = quadratic_extrapolate(synthetic_curve(gam, g));
  CHECK(res.suspicious);
}

TEST_CASE("input validation") {
  // fewer than 4 usable points
  auto small = synthetic_curve({0.02, 0.04, 0.06}, {0.1, 0.11, 0.12});
  CHECK_THROWS_AS(quadratic_extrapolate(small), std::invalid_argument);
  // gamma grid must be strictly increasing and positive
  ModelParams p;
  p.L = 4;
  p.h_x = 0.8168;
  ArnoldiOptions opts;
  CHECK_THROWS_AS(gap_curve(p, {0.0, 0.05}, "global", opts), std::invalid_argument);
  CHECK_THROWS_AS(gap_curve(p, {0.05, 0.05}, "global", opts), std::invalid_argument);
  CHECK_THROWS_AS(gap_curve(p, {0.02, 0.05}, "bogus", opts), std::invalid_argument);
}

TEST_CASE("gap curve wires model parameters through (L=4)") {
  ModelParams p;
  p.L = 4;
  p.h_x = 0.8168;
  ArnoldiOptions opts;
  auto curve = gap_curve(p, {0.03, 0.06}, "global", opts);
  REQUIRE(curve.points.size() == 2);
  CHECK(curve.points[0].gamma == 0.03);
  CHECK(curve.points[1].gamma == 0.06);
  CHECK(curve.points[0].converged);
  CHECK(curve.points[1].g > curve.points[0].g);
  // cross-check against dense gaps
  FloquetModel m(p);
  auto gaps = parity_gaps_dense(DephasingModel(m, 0.03));
  CHECK(std::abs(curve.points[0].g - gaps.global()) < 1e-7);
}

TEST_CASE("correspondence report arithmetic") {
  ExtrapolationResult e;
  e.gbar = 0.1429;
  auto rep = compare_alpha_gap(0.2888, e, 0.8168, 12, 10);
  CHECK(rep.ratio == doctest::Approx(0.2888 / 0.2858).epsilon(1e-12));
  CHECK(rep.discrepancy == doctest::Approx(std::abs(0.2888 - 0.2858)).epsilon(1e-12));
  ExtrapolationResult exact;
  exact.gbar = 0.15;
  auto perfect = compare_alpha_gap(0.30, exact, 0.8, 12, 10);
  CHECK(perfect.ratio == doctest::Approx(1.0).epsilon(1e-14));
}
