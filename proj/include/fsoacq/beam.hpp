#pragma once

#include <vector>

#include "fsoacq/geometry.hpp"

namespace fsoacq {

constexpr double kPlanck = 6.62607004e-34;   // J*s
constexpr double kLightSpeed = 3.0e8;        // m/s

/// Gaussian beacon beam parameterized by total power S; the peak intensity
/// I0 = S / (2 pi rho^2) is derived so the full-plane integral equals S for
/// every radius.
struct BeamParams {
  double power_W = 0.0;   // S, total beam power
  double rho_m = 1.0;     // beam radius (Gaussian sigma per axis)
  double x0_m = 0.0;      // beam center
  double y0_m = 0.0;
};

/// Detector channel: uniform background intensity plus the photon-conversion
/// parameters that map optical power to mean photoelectron counts per pulse.
struct ChannelParams {
  double noise_intensity_W_m2 = 0.0;  // lambda_n
  double eta = 1.0;                   // detector quantum efficiency
  double wavelength_m = 1550e-9;
  double pulse_s = 1e-6;              // T_p, observation interval per pulse
};

/// Diffraction spread: rho(z) = rho0 * sqrt(1 + (lambda z / (pi rho0^2))^2).
double beam_radius(double rho0_m, double wavelength_m, double range_m);

/// K = eta * lambda * T_p / (h c): mean counts per watt of optical power.
double photon_count_factor(const ChannelParams& chan);

double peak_intensity(const BeamParams& beam);

/// Signal power falling on [x_lo,x_hi] x [y_lo,y_hi]:
/// S * (Phi((x_hi-x0)/rho) - Phi((x_lo-x0)/rho)) * (same in y).
double cell_signal_flux(const BeamParams& beam, const CellBounds& cell);

/// Signal power per cell for the whole array (row-major), sharing the
/// per-row/per-column CDF differences.
std::vector<double> cell_signal_fluxes(const ArrayGeometry& geom,
                                       const BeamParams& beam);

/// Mean photoelectron count for cell m: K * (flux_m + lambda_n * |A_m|),
/// with flux_m = 0 when no signal is present.
double cell_mean_counts(const ArrayGeometry& geom, const BeamParams& beam,
                        const ChannelParams& chan, int m, bool signal_present);

void validate(const BeamParams& beam);
void validate(const ChannelParams& chan);

}  // namespace fsoacq
