#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "fsoacq/beam.hpp"
#include "fsoacq/geometry.hpp"
#include "support/oracles.hpp"

using fsoacq::ArrayGeometry;
using fsoacq::BeamParams;
using fsoacq::beam_radius;
using fsoacq::cell_mean_counts;
using fsoacq::cell_signal_flux;
using fsoacq::cell_signal_fluxes;
using fsoacq::CellBounds;
using fsoacq::ChannelParams;
using fsoacq::make_array_geometry;
using fsoacq::peak_intensity;
using fsoacq::photon_count_factor;

namespace {

double gauss_intensity(const BeamParams& b, double x, double y) {
  const double dx = x - b.x0_m;
  const double dy = y - b.y0_m;
  return peak_intensity(b) *
         std::exp(-(dx * dx + dy * dy) / (2.0 * b.rho_m * b.rho_m));
}

}  // namespace

TEST_SUITE("beam") {

TEST_CASE("diffraction spread of the beam radius") {
  CHECK(beam_radius(0.1, 1550e-9, 0.0) == 0.1);

  // 10 km link with a 0.1 m waist stays near a 0.1 m radius
  const double r10k = beam_radius(0.1, 1550e-9, 1e4);
  const double q = 1550e-9 * 1e4 / (M_PI * 0.1 * 0.1);
  CHECK(r10k == doctest::Approx(0.1 * std::sqrt(1.0 + q * q)).epsilon(1e-15));
  CHECK(r10k > 0.09);
  CHECK(r10k < 0.13);

  const double r100k = beam_radius(0.05, 1550e-9, 1e5);
  const double q2 = 1550e-9 * 1e5 / (M_PI * 0.05 * 0.05);
  CHECK(r100k == doctest::Approx(0.05 * std::sqrt(1.0 + q2 * q2)).epsilon(1e-15));
}

TEST_CASE("peak intensity follows the total-power normalization") {
  const BeamParams b{1e-6, 0.2, 0.0, 0.0};
  CHECK(peak_intensity(b) ==
        doctest::Approx(1e-6 / (2.0 * M_PI * 0.04)).epsilon(1e-15));
}

TEST_CASE("flux over the whole plane recovers the beam power") {
  const BeamParams b{1e-6, 0.2, 0.3, -0.1};
  const CellBounds plane{-1e3, 1e3, -1e3, 1e3};
  CHECK(cell_signal_flux(b, plane) == doctest::Approx(1e-6).epsilon(1e-12));
}

TEST_CASE("flux on a centered cell with half-width equal to rho") {
  const BeamParams b{1e-6, 0.2, 0.0, 0.0};
  const CellBounds cell{-0.2, 0.2, -0.2, 0.2};
  const double one_sigma = std::erf(1.0 / std::sqrt(2.0));
  CHECK(cell_signal_flux(b, cell) ==
        doctest::Approx(1e-6 * one_sigma * one_sigma).epsilon(1e-12));
  CHECK(cell_signal_flux(b, cell) == doctest::Approx(4.661e-7).epsilon(1e-3));
}

TEST_CASE("zero power means zero flux") {
  const BeamParams b{0.0, 0.2, 0.0, 0.0};
  CHECK(cell_signal_flux(b, CellBounds{-1, 1, -1, 1}) == 0.0);
}

TEST_CASE("photon conversion factor") {
  ChannelParams chan;
  chan.eta = 0.5;
  chan.wavelength_m = 1550e-9;
  chan.pulse_s = 1e-6;
  const double k = photon_count_factor(chan);
  const double expected =
      0.5 * 1550e-9 * 1e-6 / (fsoacq::kPlanck * fsoacq::kLightSpeed);
  CHECK(k == doctest::Approx(expected).epsilon(1e-15));
  CHECK(k == doctest::Approx(3.899e12).epsilon(1e-3));
  CHECK(k * 1e-6 == doctest::Approx(3.899e6).epsilon(1e-3));
}

TEST_CASE("cell mean counts add signal and noise terms") {
  const ArrayGeometry g = make_array_geometry(2, 2.0);
  const BeamParams b{1e-6, 0.2, 0.1, -0.3};
  ChannelParams chan;
  chan.noise_intensity_W_m2 = 2.5e-7;
  chan.eta = 0.5;
  chan.wavelength_m = 1550e-9;
  chan.pulse_s = 1e-6;
  const double k = photon_count_factor(chan);
  for (int m = 0; m < 4; ++m) {
    const double flux = cell_signal_flux(b, fsoacq::cell_bounds(g, m));
    const double noise = chan.noise_intensity_W_m2 * fsoacq::cell_area(g);
    CHECK(cell_mean_counts(g, b, chan, m, true) ==
          doctest::Approx(k * (flux + noise)).epsilon(1e-12));
    CHECK(cell_mean_counts(g, b, chan, m, false) ==
          doctest::Approx(k * noise).epsilon(1e-12));
  }
}

TEST_CASE("closed-form flux matches 2-D quadrature") {
  std::mt19937_64 gen(20260815);
  std::uniform_real_distribution<double> us(1e-8, 1e-5);
  std::uniform_real_distribution<double> ur(0.05, 1.0);
  std::uniform_real_distribution<double> uc(-1.5, 1.5);
  std::uniform_real_distribution<double> ue(0.05, 1.2);
  for (int i = 0; i < 200; ++i) {
    BeamParams b;
    b.power_W = us(gen);
    b.rho_m = ur(gen);
    b.x0_m = uc(gen);
    b.y0_m = uc(gen);
    CellBounds cell;
    cell.x_lo = uc(gen);
    cell.x_hi = cell.x_lo + ue(gen);
    cell.y_lo = uc(gen);
    cell.y_hi = cell.y_lo + ue(gen);
    const double got = cell_signal_flux(b, cell);
    const double ref = testsupport::integrate2d(
        [&](double x, double y) { return gauss_intensity(b, x, y); },
        cell.x_lo, cell.x_hi, cell.y_lo, cell.y_hi, 1e-13 * b.power_W);
    CHECK(got == doctest::Approx(ref).epsilon(1e-8));
  }
}

TEST_CASE("flux is additive over cell subdivisions") {
  const BeamParams b{2e-6, 0.31, 0.2, 0.45};
  const CellBounds cell{-0.4, 0.6, -0.7, 0.3};
  const double xm = 0.5 * (cell.x_lo + cell.x_hi);
  const double ym = 0.5 * (cell.y_lo + cell.y_hi);
  const double whole = cell_signal_flux(b, cell);
  const double parts =
      cell_signal_flux(b, CellBounds{cell.x_lo, xm, cell.y_lo, ym}) +
      cell_signal_flux(b, CellBounds{xm, cell.x_hi, cell.y_lo, ym}) +
      cell_signal_flux(b, CellBounds{cell.x_lo, xm, ym, cell.y_hi}) +
      cell_signal_flux(b, CellBounds{xm, cell.x_hi, ym, cell.y_hi});
  CHECK(parts == doctest::Approx(whole).epsilon(1e-12));
}

TEST_CASE("array fluxes conserve power once the array covers the beam") {
  // half-width 1 m, rho 0.12 m: edges sit more than 8 rho away
  const ArrayGeometry g = make_array_geometry(10, 2.0);
  const BeamParams b{1e-6, 0.12, 0.0, 0.0};
  const std::vector<double> fluxes = cell_signal_fluxes(g, b);
  REQUIRE(fluxes.size() == 100);
  double total = 0.0;
  for (double f : fluxes) total += f;
  CHECK(total == doctest::Approx(1e-6).epsilon(1e-6));
}

TEST_CASE("per-cell fluxes agree with the single-cell evaluation") {
  const ArrayGeometry g = make_array_geometry(4, 2.0);
  const BeamParams b{1e-6, 0.2, 0.4, 0.4};
  const std::vector<double> fluxes = cell_signal_fluxes(g, b);
  for (int m = 0; m < 16; ++m) {
    CHECK(fluxes[m] ==
          doctest::Approx(cell_signal_flux(b, fsoacq::cell_bounds(g, m)))
              .epsilon(1e-13));
  }
}

TEST_CASE("parameter validation") {
  BeamParams bad;
  bad.power_W = -1e-9;
  CHECK_THROWS_AS(fsoacq::validate(bad), std::invalid_argument);
  bad.power_W = 1e-6;
  bad.rho_m = 0.0;
  CHECK_THROWS_AS(fsoacq::validate(bad), std::invalid_argument);

  ChannelParams chan;
  chan.eta = 1.5;
  CHECK_THROWS_AS(fsoacq::validate(chan), std::invalid_argument);
  chan.eta = 0.5;
  chan.pulse_s = 0.0;
  CHECK_THROWS_AS(fsoacq::validate(chan), std::invalid_argument);
}

}  // TEST_SUITE
