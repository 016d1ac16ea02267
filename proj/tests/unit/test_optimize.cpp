#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fsoacq/geometry.hpp"
#include "fsoacq/optimize.hpp"

using fsoacq::make_array_geometry;
using fsoacq::minimize_rho;
using fsoacq::minimize_scalar;
using fsoacq::rho_exponent_limit;
using fsoacq::rho_objective;
using fsoacq::RhoObjective;
using fsoacq::RhoProblem;
using fsoacq::sweep_noise;

namespace {

RhoProblem reference_problem(int n_side, double noise_intensity) {
  RhoProblem p;
  p.geom = make_array_geometry(n_side, 2.0);
  p.beam.power_W = 1e-6;
  p.beam.x0_m = 0.0;
  p.beam.y0_m = 0.0;
  p.chan.noise_intensity_W_m2 = noise_intensity;
  p.chan.eta = 0.5;
  p.chan.wavelength_m = 1550e-9;
  p.chan.pulse_s = 1.25e-11;
  p.ru_m = 50.0;
  p.td_s = 1e-3;
  p.sigma0_m = 10.0;
  p.target_pfu = 7e-10;
  return p;
}

}  // namespace

TEST_SUITE("optimize") {

TEST_CASE("the feasibility limit solves the exponent equation") {
  const auto geom = make_array_geometry(4, 2.0);
  const double limit = rho_exponent_limit(geom);
  CHECK(limit == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  const auto exponent = [&](double rho) {
    return 4.0 / (4.0 * rho * rho) - 2.0 / rho - 2.0;
  };
  CHECK(exponent(limit) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(exponent(limit * 0.999) > 1.0);
  CHECK(exponent(limit * 1.001) < 1.0);
}

TEST_CASE("scalar search recovers a known quadratic minimum") {
  const auto result = minimize_scalar(
      [](double x) { return (x - 0.2) * (x - 0.2) + 1.0; }, 0.05, 0.35);
  CHECK(std::abs(result.x - 0.2) < 1e-4);
  CHECK(result.value == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(result.n_evaluations >= 64);

  // infeasible plateaus are skipped, not fatal
  const auto gated = minimize_scalar(
      [](double x) {
        return x < 0.2 ? std::numeric_limits<double>::infinity()
                       : (x - 0.25) * (x - 0.25);
      },
      0.05, 0.35);
  CHECK(std::abs(gated.x - 0.25) < 1e-4);

  const auto empty = minimize_scalar(
      [](double) { return std::numeric_limits<double>::infinity(); }, 0.0,
      1.0);
  CHECK(!std::isfinite(empty.value));
  CHECK_THROWS_AS(minimize_scalar([](double x) { return x; }, 1.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("objective evaluations honor the false-alarm budget") {
  const RhoProblem p = reference_problem(4, 2.5e-7);
  for (double rho : {0.08, 0.15, 0.2, 0.25, 0.3}) {
    const RhoObjective obj = rho_objective(p, rho);
    REQUIRE(obj.feasible);
    CHECK(obj.gamma0 > 0.0);
    CHECK(obj.pfu_achieved <= p.target_pfu * (1.0 + 1e-9));
    CHECK(std::isfinite(obj.value_s));
    CHECK(obj.exponent >= 1.0);
  }
  CHECK_FALSE(rho_objective(p, 0.34).feasible);
  CHECK(rho_objective(p, 0.34).value_s ==
        std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(rho_objective(p, 0.0), std::invalid_argument);
}

TEST_CASE("the dwell time factors out of the objective") {
  RhoProblem p = reference_problem(4, 2.5e-7);
  const RhoObjective base = rho_objective(p, 0.2);
  p.td_s *= 2.0;
  const RhoObjective doubled = rho_objective(p, 0.2);
  CHECK(doubled.gamma0 == base.gamma0);
  CHECK(doubled.value_s == doctest::Approx(2.0 * base.value_s).epsilon(1e-12));
}

TEST_CASE("a vanishing miss factor leaves only the residual-scan term") {
  RhoProblem p = reference_problem(4, 2.5e-7);
  p.beam.power_W = 1e-3;  // enormous SNR: G underflows to zero
  const RhoObjective obj = rho_objective(p, 0.2);
  REQUIRE(obj.feasible);
  CHECK(obj.g == 0.0);
  CHECK(obj.value_s ==
        doctest::Approx(p.td_s * 2.0 * p.sigma0_m * p.sigma0_m / 0.04)
            .epsilon(1e-12));
}

TEST_CASE("the reference configuration has an interior minimum") {
  const RhoProblem p = reference_problem(4, 2.5e-7);
  const auto result = minimize_rho(p);
  REQUIRE(result.best.feasible);
  CHECK(result.n_evaluations > 64);
  const double lo_end = rho_objective(p, 0.02).feasible
                            ? rho_objective(p, 0.02).value_s
                            : std::numeric_limits<double>::infinity();
  const double hi_end = rho_objective(p, 0.33).feasible
                            ? rho_objective(p, 0.33).value_s
                            : std::numeric_limits<double>::infinity();
  CHECK(result.best.value_s < lo_end);
  CHECK(result.best.value_s < hi_end);
  CHECK(result.best.rho_m > 0.02);
  CHECK(result.best.rho_m < 0.33);

  // refinement never loses to its own seeding grid
  const double limit = rho_exponent_limit(p.geom);
  const double lo = limit / 64.0;
  double grid_best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 64; ++i) {
    const double rho = lo + (limit - lo) * i / 63.0;
    const RhoObjective obj = rho_objective(p, rho);
    if (obj.feasible) grid_best = std::min(grid_best, obj.value_s);
  }
  CHECK(result.best.value_s <= grid_best * (1.0 + 1e-12));
}

TEST_CASE("optimal radius shrinks with noise and grows with array order") {
  // noise powers 0.2..1.0 uW over the 4 m^2 aperture, four array orders
  const std::vector<double> noise_grid{5e-8, 1e-7, 1.5e-7, 2e-7, 2.5e-7};
  std::vector<std::vector<double>> rho_star;
  for (int n_side : {2, 4, 6, 10}) {
    const RhoProblem p = reference_problem(n_side, 2.5e-7);
    const auto rows = sweep_noise(p, noise_grid);
    REQUIRE(rows.size() == noise_grid.size());
    std::vector<double> col;
    double prev_value = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      REQUIRE(rows[i].result.best.feasible);
      CHECK(rows[i].noise_value == noise_grid[i]);
      col.push_back(rows[i].result.best.rho_m);
      if (i > 0) {
        // rho* non-increasing in noise (2e-4 covers search resolution)
        CHECK(col[i] <= col[i - 1] + 2e-4);
        CHECK(rows[i].result.best.value_s >= prev_value * (1.0 - 1e-9));
      }
      prev_value = rows[i].result.best.value_s;
    }
    rho_star.push_back(col);
  }
  for (std::size_t i = 0; i < noise_grid.size(); ++i)
    CHECK(rho_star.back()[i] >= rho_star.front()[i] - 2e-4);

  // single-point sweep reduces to the bare minimizer
  const RhoProblem p = reference_problem(4, 2.5e-7);
  const auto one = sweep_noise(p, {2.5e-7});
  const auto direct = minimize_rho(p);
  CHECK(one.size() == 1);
  CHECK(one[0].result.best.rho_m == direct.best.rho_m);
  CHECK(one[0].result.best.value_s == direct.best.value_s);

  CHECK_THROWS_AS(sweep_noise(p, {}), std::invalid_argument);
}

}  // TEST_SUITE
