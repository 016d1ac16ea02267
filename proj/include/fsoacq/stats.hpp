#pragma once

#include <cstdint>

#include "fsoacq/detector.hpp"
#include "fsoacq/geometry.hpp"

namespace fsoacq {

/// P_m = P(Y < gamma0 | signal), Gaussian two-moment approximation.
double pm_gaussian(const MomentSummary& mom, double gamma0);

/// P_m via the scaled-Poisson approximation:
/// Q(floor(k_s gamma0 + 1), k_s mu_s). Negative gamma0 clamps to 0 (the
/// statistic is non-negative), giving Q(1, k_s mu_s) = e^{-k_s mu_s}. Exact
/// integer k_s*gamma0 follows the floor convention as written.
double pm_scaled_poisson(const MomentSummary& mom, double gamma0);

/// P_f = P(Y > gamma0 | noise) ~ 1 - Q(floor(k_n gamma0 + 1), k_n mu_n).
double pf_scaled_poisson(const MomentSummary& mom, double gamma0);

/// Smallest gamma0 with pf_scaled_poisson(mom, gamma0) <= target_pf.
/// pf is a right-continuous step function of gamma0 (one step per integer
/// count), so the search runs over the integer step boundaries; the achieved
/// pf lands within one integer step of the target. Returns 0 when the target
/// is already met at gamma0 = 0.
double calibrate_threshold(const MomentSummary& mom, double target_pf);

/// Single-scan missed-detection bounds: lower = pm^n1, upper = pm^floor.
/// Throws std::domain_error when the packing floor was clamped (beam too
/// large for the bound to hold).
struct ScanProbBounds {
  double lower = 0.0;
  double upper = 0.0;
};

ScanProbBounds pm_scan_bounds(double pm, const PackingCounts& pack);

/// Scan-level false-alarm bounds over n_steps total dwells:
/// 1 - (1 - pf)^(n_steps - n1) < P_F < 1 - (1 - pf)^(n_steps - floor),
/// evaluated with log1p/expm1 (the figure-scale values reach 1e-12).
ScanProbBounds pf_scan_bounds(double pf, std::int64_t n_steps,
                              const PackingCounts& pack);

}  // namespace fsoacq
