#include "fsoacq/beam.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fsoacq/numeric.hpp"

namespace fsoacq {

void validate(const BeamParams& beam) {
  if (!(beam.power_W >= 0.0))
    throw std::invalid_argument("beam: power_W must be >= 0");
  if (!(beam.rho_m > 0.0))
    throw std::invalid_argument("beam: rho_m must be > 0");
  if (!std::isfinite(beam.x0_m) || !std::isfinite(beam.y0_m))
    throw std::invalid_argument("beam: center must be finite");
}

void validate(const ChannelParams& chan) {
  if (!(chan.noise_intensity_W_m2 >= 0.0))
    throw std::invalid_argument("channel: noise intensity must be >= 0");
  if (!(chan.eta > 0.0 && chan.eta <= 1.0))
    throw std::invalid_argument("channel: eta must be in (0, 1]");
  if (!(chan.wavelength_m > 0.0))
    throw std::invalid_argument("channel: wavelength_m must be > 0");
  if (!(chan.pulse_s > 0.0))
    throw std::invalid_argument("channel: pulse_s must be > 0");
}

double beam_radius(double rho0_m, double wavelength_m, double range_m) {
  if (!(rho0_m > 0.0))
    throw std::invalid_argument("beam_radius: rho0_m must be > 0");
  if (!(wavelength_m > 0.0))
    throw std::invalid_argument("beam_radius: wavelength_m must be > 0");
  if (!(range_m >= 0.0))
    throw std::invalid_argument("beam_radius: range_m must be >= 0");
  const double spread =
      wavelength_m * range_m / (std::numbers::pi * rho0_m * rho0_m);
  return rho0_m * std::sqrt(1.0 + spread * spread);
}

double photon_count_factor(const ChannelParams& chan) {
  validate(chan);
  return chan.eta * chan.wavelength_m * chan.pulse_s /
         (kPlanck * kLightSpeed);
}

double peak_intensity(const BeamParams& beam) {
  validate(beam);
  return beam.power_W / (2.0 * std::numbers::pi * beam.rho_m * beam.rho_m);
}

double cell_signal_flux(const BeamParams& beam, const CellBounds& cell) {
  validate(beam);
  if (!(cell.x_lo <= cell.x_hi && cell.y_lo <= cell.y_hi))
    throw std::invalid_argument("cell_signal_flux: malformed cell bounds");
  const double inv_rho = 1.0 / beam.rho_m;
  const double mx = normal_cdf_diff((cell.x_lo - beam.x0_m) * inv_rho,
                                    (cell.x_hi - beam.x0_m) * inv_rho);
  const double my = normal_cdf_diff((cell.y_lo - beam.y0_m) * inv_rho,
                                    (cell.y_hi - beam.y0_m) * inv_rho);
  return beam.power_W * mx * my;
}

std::vector<double> cell_signal_fluxes(const ArrayGeometry& geom,
                                       const BeamParams& beam) {
  validate(beam);
  const int n = geom.cells_per_side;
  const double pitch = geom.side_m / n;
  const double half = 0.5 * geom.side_m;
  const double inv_rho = 1.0 / beam.rho_m;
  std::vector<double> dx(n), dy(n);
  for (int i = 0; i < n; ++i) {
    const double lo = -half + i * pitch;
    const double hi = lo + pitch;
    dx[i] = normal_cdf_diff((lo - beam.x0_m) * inv_rho,
                            (hi - beam.x0_m) * inv_rho);
    dy[i] = normal_cdf_diff((lo - beam.y0_m) * inv_rho,
                            (hi - beam.y0_m) * inv_rho);
  }
  std::vector<double> flux(static_cast<std::size_t>(n) * n);
  for (int row = 0; row < n; ++row)
    for (int col = 0; col < n; ++col)
      flux[static_cast<std::size_t>(row) * n + col] =
          beam.power_W * dx[col] * dy[row];
  return flux;
}

double cell_mean_counts(const ArrayGeometry& geom, const BeamParams& beam,
                        const ChannelParams& chan, int m,
                        bool signal_present) {
  validate(chan);
  const double k = photon_count_factor(chan);
  const double noise = chan.noise_intensity_W_m2 * cell_area(geom);
  const double flux =
      signal_present ? cell_signal_flux(beam, cell_bounds(geom, m)) : 0.0;
  return k * (flux + noise);
}

}  // namespace fsoacq
