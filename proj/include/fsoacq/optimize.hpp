#pragma once

#include <functional>
#include <vector>

#include "fsoacq/beam.hpp"
#include "fsoacq/geometry.hpp"

namespace fsoacq {

/// Beam-radius optimization against the closed-form mean acquisition-time
/// upper bound. At every candidate rho the detector threshold is
/// recalibrated so the scan-level false-alarm upper bound stays at or below
/// target_pfu.
struct RhoProblem {
  ArrayGeometry geom;
  BeamParams beam;      // rho_m is the free variable; power/center fixed
  ChannelParams chan;
  double ru_m = 50.0;
  double td_s = 1e-3;
  double sigma0_m = 10.0;
  double target_pfu = 7e-10;
  double rho_min_m = 0.0;  // <= 0: auto (small fraction of rho_max)
  double rho_max_m = 0.0;  // <= 0: auto (largest rho with exponent >= 1)
};

struct RhoObjective {
  double rho_m = 0.0;
  double value_s = 0.0;    // mean acquisition-time upper bound
  double gamma0 = 0.0;
  double g = 0.0;          // per-look miss factor
  double exponent = 0.0;
  double pfu_achieved = 0.0;
  bool feasible = false;
};

/// Largest rho with |A|/(4 rho^2) - L/rho - 2 >= 1.
double rho_exponent_limit(const ArrayGeometry& geom);

/// Evaluate the objective at one rho (infeasible points carry
/// feasible = false and an infinite value).
RhoObjective rho_objective(const RhoProblem& problem, double rho_m);

struct ScalarMinResult {
  double x = 0.0;
  double value = 0.0;  // +inf when no grid point was finite
  int n_evaluations = 0;
};

/// Search core shared by minimize_rho: a 64-point coarse grid over [lo, hi]
/// seeds golden-section refinement of the bracketing neighbors down to an
/// interval of width tol. Infinite objective values mark infeasible points.
ScalarMinResult minimize_scalar(const std::function<double(double)>& f,
                                double lo, double hi, double tol = 1e-4);

struct RhoOptResult {
  RhoObjective best;
  int n_evaluations = 0;
};

/// 64-point coarse grid over [rho_min, rho_max] followed by golden-section
/// refinement of the bracketing interval down to 1e-4 m.
RhoOptResult minimize_rho(const RhoProblem& problem);

struct NoiseSweepRow {
  double noise_value = 0.0;  // in the problem's noise convention (intensity)
  RhoOptResult result;
};

/// Re-solve the optimum across a grid of noise intensities.
std::vector<NoiseSweepRow> sweep_noise(const RhoProblem& problem,
                                       const std::vector<double>& noise_grid);

}  // namespace fsoacq
