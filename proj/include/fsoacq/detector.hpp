#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fsoacq/beam.hpp"
#include "fsoacq/geometry.hpp"

namespace fsoacq {

/// Log-likelihood-ratio detector: weight alpha_m = ln(1 + SNR_m) per cell,
/// decide "signal present" when sum(alpha_m z_m) >= gamma0.
struct DetectorModel {
  std::vector<double> weights;  // alpha_m, row-major cell order
  double gamma0 = 0.0;          // offset threshold gamma + K * S_assumed
};

/// First and second moments of the detection statistic under both
/// hypotheses, plus the scaled-Poisson matching constants.
struct MomentSummary {
  double mu_s = 0.0;     // E[Y | signal]
  double var_s = 0.0;    // Var[Y | signal]
  double mu_n = 0.0;     // E[Y | noise only]
  double var_n = 0.0;    // Var[Y | noise only]
  double k_s = 0.0;      // mu_s / var_s
  double k_n = 0.0;      // sum(alpha) / sum(alpha^2)
};

/// Per-cell detector weights for an assumed beam. Requires a strictly
/// positive noise intensity (SNR is undefined at zero noise).
std::vector<double> detector_weights(const ArrayGeometry& geom,
                                     const BeamParams& assumed_beam,
                                     const ChannelParams& chan);

/// gamma is the pre-offset threshold; gamma0 = gamma + K * S_assumed.
DetectorModel build_detector(const ArrayGeometry& geom,
                             const BeamParams& assumed_beam,
                             const ChannelParams& chan, double gamma);

/// Same weights with the offset threshold given directly.
DetectorModel build_detector_gamma0(const ArrayGeometry& geom,
                                    const BeamParams& assumed_beam,
                                    const ChannelParams& chan, double gamma0);

/// Y = sum alpha_m z_m, compensated summation.
double detection_statistic(const DetectorModel& model,
                           std::span<const std::int64_t> counts);

/// true = signal present (ties go to "present").
bool decide(const DetectorModel& model, std::span<const std::int64_t> counts);

/// Moments of Y for counts generated by true_beam/chan with the given
/// weights. Throws when every weight is zero (degenerate statistic).
MomentSummary compute_moments(const ArrayGeometry& geom,
                              const BeamParams& true_beam,
                              const ChannelParams& chan,
                              std::span<const double> weights);

}  // namespace fsoacq
