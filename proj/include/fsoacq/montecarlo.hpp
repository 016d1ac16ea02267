#pragma once

#include <cstdint>
#include <vector>

#include "fsoacq/beam.hpp"
#include "fsoacq/detector.hpp"
#include "fsoacq/geometry.hpp"
#include "fsoacq/scan.hpp"

namespace fsoacq {

/// Seeded trial batch. Trials draw from counter-based streams addressed by
/// (seed, operation, trial index), so results are bit-identical for any
/// execution order or thread count.
struct TrialConfig {
  ArrayGeometry geom;
  BeamParams true_beam;
  BeamParams assumed_beam;
  ChannelParams chan;
  double gamma0 = 0.0;
  std::uint64_t seed = 1;
  std::uint64_t n_trials = 10000;
  int n_threads = 1;
};

struct EstimateWithCI {
  double estimate = 0.0;
  double half_width_95 = 0.0;
  double upper_bound_95 = 0.0;  // conservative one-sided bound, see censored
  std::uint64_t n_trials = 0;
  std::uint64_t events = 0;
  /// Fewer than 10 observed events: treat upper_bound_95 as the result, not
  /// the point estimate.
  bool censored = false;
};

/// P(missed detection): counts from the true beam plus noise, detector from
/// the assumed beam, event = statistic < gamma0.
EstimateWithCI estimate_pm(const TrialConfig& cfg);

/// P(false alarm): noise-only counts, event = statistic > gamma0.
EstimateWithCI estimate_pf(const TrialConfig& cfg);

/// Single full-scan missed-detection probability. Per trial the receiver
/// center is offset by a 2-D N(0, sigma0^2 I) draw (Rayleigh radius); the
/// beam is swept along the plan with an independent pulse per step; at every
/// step whose footprint overlaps the array, detection is evaluated at the
/// true relative geometry (matched weights, fixed gamma0). The event is
/// "no overlapping step triggered detection".
EstimateWithCI estimate_scan_pm(const TrialConfig& cfg, const ScanPlan& plan,
                                double sigma0_m);

struct AcqTimeSamples {
  std::vector<double> times_s;  // one per trial
  std::uint64_t censored = 0;   // trials that hit the scan cap
};

/// Repeat full scans (fixed per-trial offset) until a detection occurs at an
/// overlapping step; elapsed time = scans_failed * ts + steps_walked * td.
AcqTimeSamples sample_acq_time(const TrialConfig& cfg, const ScanPlan& plan,
                               double sigma0_m, double ts_s, double td_s,
                               std::uint64_t max_scans = 10000);

enum class SweepParam { AssumedPower, AssumedRho, AssumedX0 };

struct SensitivityRow {
  double value = 0.0;
  EstimateWithCI pm;
  EstimateWithCI pf;
};

/// Re-estimate (P_m, P_f) for each grid value of the assumed parameter;
/// truth and gamma0 stay fixed.
std::vector<SensitivityRow> sensitivity_sweep(const TrialConfig& cfg,
                                              SweepParam param,
                                              const std::vector<double>& grid);

/// True when a footprint of radius rho centered at (x, y) (array frame)
/// overlaps the array square.
bool footprint_overlaps(const ArrayGeometry& geom, double x_m, double y_m,
                        double rho_m);

}  // namespace fsoacq
